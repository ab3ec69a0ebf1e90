#include "medianscape/covers.hpp"

#include "medianscape/hajlasz.hpp"
#include "medianscape/maximal.hpp"
#include "medianscape/medians.hpp"
#include "medianscape/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace medianscape {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::invalid_argument("covers: " + msg);
}

void verify_cover(const MetricMeasureSpace& space, CoverAtScale& cov)
{
    const std::size_t n = space.size();
    const double r = cov.r;

    // (a) the half-balls B(x_i, r/2) cover the space
    for (std::size_t x = 0; x < n; ++x) {
        bool covered = false;
        for (PointId c : cov.centers)
            if (space.dist(static_cast<PointId>(x), c) < r / 2) {
                covered = true;
                break;
            }
        if (!covered)
            throw InvariantViolation("cover: point " + std::to_string(x) +
                                     " not covered by any half-ball");
    }

    // (b) bounded overlap of the doubled balls
    int N = 0;
    for (std::size_t x = 0; x < n; ++x) {
        int cnt = 0;
        for (PointId c : cov.centers)
            if (space.dist(static_cast<PointId>(x), c) < 2 * r)
                ++cnt;
        N = std::max(N, cnt);
    }
    cov.overlap_bound = N;

    // (d) partition of unity
    std::vector<double> sum(n, 0.0);
    for (std::size_t i = 0; i < cov.centers.size(); ++i)
        for (std::size_t k = 0; k < cov.support[i].size(); ++k)
            sum[static_cast<std::size_t>(cov.support[i][k])] += cov.phi[i][k];
    double defect = 0;
    for (std::size_t x = 0; x < n; ++x)
        defect = std::max(defect, std::fabs(sum[x] - 1.0));
    cov.partition_defect = defect;
    if (defect > 1e-12)
        throw InvariantViolation("cover: partition of unity defect " + std::to_string(defect));

    // (c) lower bound on the balls and the Lipschitz quotient
    const double lower = (1.0 / N) * (1 - 1e-12);
    for (std::size_t i = 0; i < cov.centers.size(); ++i) {
        std::size_t k = 0;
        for (PointId x : cov.ball[i]) {
            while (cov.support[i][k] != x)
                ++k; // balls are a prefix-ordered subset of the support scan
            if (cov.phi[i][k] < lower)
                throw InvariantViolation("cover: phi below 1/N on its ball");
        }
    }

    // Lipschitz audit: quotients over pairs inside 4B_i; pairs with one end
    // outside 4B_i are dominated analytically (d >= 2r gives quotient <=
    // 1/(2r)); the provable ceiling for this construction is (1 + 2N)/r.
    const std::size_t budget = 1u << 22;
    std::size_t total_pairs = 0, audited = 0;
    std::vector<std::vector<PointId>> wide(cov.centers.size());
    for (std::size_t i = 0; i < cov.centers.size(); ++i) {
        for (std::size_t x = 0; x < n; ++x)
            if (space.dist(static_cast<PointId>(x), cov.centers[i]) < 4 * r)
                wide[i].push_back(static_cast<PointId>(x));
        total_pairs += wide[i].size() * wide[i].size();
    }
    const std::size_t stride = total_pairs <= budget ? 1 : total_pairs / budget + 1;
    double kappa = 0.5; // covers the analytic outside-4B bound 1/(2r)
    std::size_t tick = 0;
    for (std::size_t i = 0; i < cov.centers.size(); ++i) {
        std::vector<double> phix(n, 0.0);
        for (std::size_t k = 0; k < cov.support[i].size(); ++k)
            phix[static_cast<std::size_t>(cov.support[i][k])] = cov.phi[i][k];
        const auto& W = wide[i];
        for (std::size_t a = 0; a < W.size(); ++a)
            for (std::size_t b = a + 1; b < W.size(); ++b) {
                if (tick++ % stride != 0)
                    continue;
                ++audited;
                const double diff = std::fabs(phix[static_cast<std::size_t>(W[a])] -
                                              phix[static_cast<std::size_t>(W[b])]);
                if (diff == 0)
                    continue;
                kappa = std::max(kappa, diff * r / space.dist(W[a], W[b]));
            }
    }
    cov.kappa = kappa;
    cov.lipschitz_fraction =
        total_pairs == 0 ? 1.0 : static_cast<double>(audited * stride) / total_pairs;
    if (kappa > (1.0 + 2.0 * N) * (1 + 1e-9))
        throw InvariantViolation("cover: Lipschitz quotient above the (1+2N)/r ceiling");
}

} // namespace

CoverAtScale build_cover(const MetricMeasureSpace& space, double r)
{
    if (!(r > 0) || !std::isfinite(r))
        fail("cover scale must be positive and finite");
    const std::size_t n = space.size();
    CoverAtScale cov;
    cov.r = r;
    cov.space_size = n;

    // greedy maximal r/2-separated net in ascending id order
    for (std::size_t x = 0; x < n; ++x) {
        bool separated = true;
        for (PointId c : cov.centers)
            if (space.dist(static_cast<PointId>(x), c) < r / 2) {
                separated = false;
                break;
            }
        if (separated)
            cov.centers.push_back(static_cast<PointId>(x));
    }

    const std::size_t m = cov.centers.size();
    cov.ball.resize(m);
    cov.support.resize(m);
    cov.phi.resize(m);

    std::vector<std::vector<double>> psi(m);
    std::vector<double> psum(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t x = 0; x < n; ++x) {
            const double d = space.dist(static_cast<PointId>(x), cov.centers[i]);
            const double p = std::clamp(2.0 - d / r, 0.0, 1.0);
            if (p > 0) {
                cov.support[i].push_back(static_cast<PointId>(x));
                psi[i].push_back(p);
                psum[x] += p;
                if (d < r)
                    cov.ball[i].push_back(static_cast<PointId>(x));
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        cov.phi[i].resize(psi[i].size());
        for (std::size_t k = 0; k < psi[i].size(); ++k)
            cov.phi[i][k] = psi[i][k] / psum[static_cast<std::size_t>(cov.support[i][k])];
    }

    verify_cover(space, cov);
    return cov;
}

ScaleLadder build_scale_ladder(const MetricMeasureSpace& space, double R)
{
    if (!(R > 0) || !std::isfinite(R))
        fail("scale ladder needs a finite positive R");
    ScaleLadder lad;
    lad.R = R;
    const double r_min = space.min_positive_distance() / 2;
    int K = static_cast<int>(std::ceil(std::log2(R / r_min)));
    K = std::max(K, 1);
    for (int k = 1; k <= K; ++k)
        lad.scales.push_back(R * std::pow(2.0, -k));
    return lad;
}

std::vector<double> discrete_convolution(const MetricMeasureSpace& space,
                                         std::span<const double> u, const CoverAtScale& cover)
{
    const std::size_t n = space.size();
    if (u.size() != n || cover.space_size != n)
        fail("discrete convolution: space mismatch");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < cover.centers.size(); ++i) {
        double num = 0, den = 0;
        for (PointId x : cover.ball[i]) {
            num += space.mass(x) * u[static_cast<std::size_t>(x)];
            den += space.mass(x);
        }
        const double avg = num / den;
        for (std::size_t k = 0; k < cover.support[i].size(); ++k)
            out[static_cast<std::size_t>(cover.support[i][k])] += avg * cover.phi[i][k];
    }
    return out;
}

std::vector<double> discrete_median_convolution(const MetricMeasureSpace& space,
                                                std::span<const double> u, double gamma,
                                                const CoverAtScale& cover)
{
    const std::size_t n = space.size();
    if (u.size() != n || cover.space_size != n)
        fail("discrete median convolution: space mismatch");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < cover.centers.size(); ++i) {
        const double med = gamma_median(space, u, cover.ball[i], gamma);
        for (std::size_t k = 0; k < cover.support[i].size(); ++k)
            out[static_cast<std::size_t>(cover.support[i][k])] += med * cover.phi[i][k];
    }
    return out;
}

namespace {

std::vector<double> abs_values(std::span<const double> u)
{
    std::vector<double> a(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        a[i] = std::fabs(u[i]);
    return a;
}

} // namespace

std::vector<double> discrete_maximal(const MetricMeasureSpace& space,
                                     std::span<const double> u,
                                     const std::vector<CoverAtScale>& covers)
{
    if (covers.empty())
        fail("discrete maximal: empty ladder");
    const std::vector<double> au = abs_values(u);
    std::vector<double> out(space.size(), -kInf);
    for (const auto& cov : covers) {
        const std::vector<double> conv = discrete_convolution(space, au, cov);
        for (std::size_t x = 0; x < out.size(); ++x)
            out[x] = std::max(out[x], conv[x]);
    }
    return out;
}

std::vector<double> discrete_median_maximal(const MetricMeasureSpace& space,
                                            std::span<const double> u, double gamma,
                                            const std::vector<CoverAtScale>& covers)
{
    if (covers.empty())
        fail("discrete median maximal: empty ladder");
    const std::vector<double> au = abs_values(u);
    std::vector<double> out(space.size(), -kInf);
    for (const auto& cov : covers) {
        const std::vector<double> conv = discrete_median_convolution(space, au, gamma, cov);
        for (std::size_t x = 0; x < out.size(); ++x)
            out[x] = std::max(out[x], conv[x]);
    }
    return out;
}

std::vector<double> discrete_maximal(const MetricMeasureSpace& space,
                                     std::span<const double> u, const ScaleLadder& ladder)
{
    std::vector<CoverAtScale> covers;
    covers.reserve(ladder.scales.size());
    for (double r : ladder.scales)
        covers.push_back(build_cover(space, r));
    return discrete_maximal(space, u, covers);
}

std::vector<double> discrete_median_maximal(const MetricMeasureSpace& space,
                                            std::span<const double> u, double gamma,
                                            const ScaleLadder& ladder)
{
    std::vector<CoverAtScale> covers;
    covers.reserve(ladder.scales.size());
    for (double r : ladder.scales)
        covers.push_back(build_cover(space, r));
    return discrete_median_maximal(space, u, gamma, covers);
}

namespace {

WitnessResult witness_search(const MetricMeasureSpace& space,
                             const std::vector<double>& target, double s, double c_d,
                             const std::function<std::vector<double>(double)>& candidate_for)
{
    double worst = kInf;
    for (int k = 0; k <= 8; ++k) {
        const double C = std::pow(c_d, k);
        std::vector<double> cand = candidate_for(C);
        double scale = 1;
        for (double v : cand)
            scale = std::max(scale, std::fabs(v));
        for (double v : target)
            scale = std::max(scale, std::fabs(v));
        const double defect = gradient_defect(space, target, cand, s);
        if (defect <= 1e-12 * scale) {
            WitnessResult res;
            res.candidate = std::move(cand);
            res.constant = C;
            res.exponent = k;
            res.defect = defect;
            return res;
        }
        worst = std::min(worst, defect);
    }
    std::ostringstream os;
    os << "gradient witness: no constant in the c_d^k grid suffices "
       << "(smallest violation " << worst << ")";
    throw InvariantViolation(os.str());
}

} // namespace

WitnessResult median_maximal_gradient_witness(const MetricMeasureSpace& space,
                                              std::span<const double> u,
                                              std::span<const double> g, double gamma,
                                              double R, double s, double c_d)
{
    if (!(gamma > 0) || gamma > 0.5)
        fail("median witness: gamma must lie in (0, 1/2]");
    if (!(R > 0) || !std::isfinite(R))
        fail("median witness: R must be finite and positive");
    if (gradient_defect(space, u, g, s) != 0)
        fail("median witness: input gradient is not feasible");
    const ScaleLadder lad = build_scale_ladder(space, R);
    const std::vector<double> target = discrete_median_maximal(space, u, gamma, lad);
    return witness_search(space, target, s, c_d, [&](double C) {
        std::vector<double> m = median_maximal(space, g, gamma / C, 3 * R);
        for (auto& v : m)
            v *= C;
        return m;
    });
}

WitnessResult maximal_gradient_witness(const MetricMeasureSpace& space,
                                       std::span<const double> u, std::span<const double> g,
                                       double R, double s, double Q, double c_d)
{
    if (!(R > 0) || !std::isfinite(R))
        fail("maximal witness: R must be finite and positive");
    if (!(Q > 0))
        fail("maximal witness: Q must be positive (condition (Q) exponent)");
    if (gradient_defect(space, u, g, s) != 0)
        fail("maximal witness: input gradient is not feasible");
    const double q = Q / (Q + s);
    const ScaleLadder lad = build_scale_ladder(space, R);
    const std::vector<double> target = discrete_maximal(space, u, lad);
    std::vector<double> gq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        gq[i] = std::pow(g[i], q);
    return witness_search(space, target, s, c_d, [&](double C) {
        std::vector<double> m = hl_maximal(space, gq, 6 * R);
        for (auto& v : m)
            v = C * std::pow(v, 1.0 / q);
        return m;
    });
}

} // namespace medianscape
