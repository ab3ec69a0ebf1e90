#include "medianscape/boyd.hpp"

#include "medianscape/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace medianscape {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::invalid_argument("boyd: " + msg);
}

struct Candidate {
    std::vector<double> f;
    bool indicator = false;
};

std::vector<Candidate> build_candidates(const MetricMeasureSpace& space,
                                        const CandidateFamily& family)
{
    const std::size_t n = space.size();
    std::vector<Candidate> out;

    auto add_indicator = [&](const std::vector<PointId>& pts) {
        Candidate c;
        c.indicator = true;
        c.f.assign(n, 0.0);
        for (PointId p : pts)
            c.f[static_cast<std::size_t>(p)] = 1.0;
        out.push_back(std::move(c));
    };

    // chi_P anchors every family: its ratio is exactly 1
    {
        std::vector<PointId> all(n);
        for (std::size_t i = 0; i < n; ++i)
            all[i] = static_cast<PointId>(i);
        add_indicator(all);
    }

    switch (family.kind) {
    case CandidateFamily::Kind::ball_indicators: {
        const PointId centers[3] = {static_cast<PointId>(n / 2), static_cast<PointId>(n / 4),
                                    static_cast<PointId>((3 * n) / 4)};
        for (PointId c : centers) {
            double r = space.min_positive_distance() * 1.5;
            for (int k = 0; k < 40 && r < space.max_distance(); ++k, r *= 2) {
                auto members = space.ball_members(c, r);
                if (members.size() >= n)
                    break;
                add_indicator(members);
            }
        }
        break;
    }
    case CandidateFamily::Kind::union_indicators: {
        const std::size_t k = std::max<std::size_t>(2, family.count);
        for (int scale = 0; scale < 4; ++scale) {
            const double r = space.min_positive_distance() * (2 << scale);
            std::vector<PointId> pts;
            for (std::size_t j = 0; j < k; ++j) {
                const PointId c = static_cast<PointId>(((j + 1) * n) / (k + 1));
                for (PointId p : space.ball_members(c, r))
                    pts.push_back(p);
            }
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            add_indicator(pts);
        }
        break;
    }
    case CandidateFamily::Kind::rearranged_profiles: {
        for (double theta : {0.5, 1.0, 2.0}) {
            Candidate c;
            c.f.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                c.f[i] = std::pow(1.0 - static_cast<double>(i) / n, theta);
            out.push_back(std::move(c));
        }
        Candidate e;
        e.f.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            e.f[i] = std::exp(-8.0 * static_cast<double>(i) / n);
        out.push_back(std::move(e));
        break;
    }
    case CandidateFamily::Kind::seeded_random: {
        std::mt19937_64 rng(family.seed);
        std::uniform_real_distribution<double> val(0.0, 1.0);
        for (std::size_t m = 0; m < family.count; ++m) {
            Candidate c;
            c.f.resize(n);
            for (auto& v : c.f)
                v = val(rng);
            out.push_back(std::move(c));
        }
        break;
    }
    }
    return out;
}

} // namespace

CandidateFamily CandidateFamily::ball_indicators()
{
    return {Kind::ball_indicators, 0, 0};
}
CandidateFamily CandidateFamily::union_indicators(std::size_t k)
{
    return {Kind::union_indicators, k, 0};
}
CandidateFamily CandidateFamily::rearranged_profiles()
{
    return {Kind::rearranged_profiles, 0, 0};
}
CandidateFamily CandidateFamily::seeded_random(std::size_t m, std::uint64_t seed)
{
    return {Kind::seeded_random, m, seed};
}

std::string CandidateFamily::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case Kind::ball_indicators:
        os << "ball_indicators";
        break;
    case Kind::union_indicators:
        os << "union_indicators(" << count << ")";
        break;
    case Kind::rearranged_profiles:
        os << "rearranged_profiles";
        break;
    case Kind::seeded_random:
        os << "seeded_random(" << count << ")";
        break;
    }
    return os.str();
}

std::vector<double> phi_x_grid(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                               const std::vector<double>& gammas,
                               const CandidateFamily& family)
{
    for (double g : gammas)
        if (!(g > 0) || !(g < 1))
            fail("gamma grid entries must lie in (0,1)");
    const std::vector<Candidate> cands = build_candidates(space, family);
    if (cands.empty())
        fail("empty candidate family");

    const std::size_t n = space.size();
    std::vector<double> best(gammas.size(), 0.0);
    for (const auto& cand : cands) {
        const double base = quasinorm(spec, space, cand.f);
        if (!(base > 0))
            continue;
        if (cand.indicator) {
            // M^gamma chi_E = chi_{M chi_E >= gamma}: one maximal pass, then a
            // threshold per gamma
            const std::vector<double> hl = hl_maximal(space, cand.f);
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                std::vector<double> mg(n, 0.0);
                for (std::size_t x = 0; x < n; ++x)
                    mg[x] = hl[x] >= gammas[gi] ? 1.0 : 0.0;
                best[gi] = std::max(best[gi], quasinorm(spec, space, mg) / base);
            }
        } else {
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                const std::vector<double> mg = median_maximal(space, cand.f, gammas[gi]);
                best[gi] = std::max(best[gi], quasinorm(spec, space, mg) / base);
            }
        }
    }
    return best;
}

double phi_x(const QuasinormSpec& spec, const MetricMeasureSpace& space, double gamma,
             const CandidateFamily& family)
{
    return phi_x_grid(spec, space, {gamma}, family)[0];
}

BoydEstimate boyd_index(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                        const std::vector<double>& gamma_grid, const CandidateFamily& family)
{
    if (gamma_grid.size() < 4)
        fail("gamma grid needs at least 4 points");
    std::vector<double> gs = gamma_grid;
    std::sort(gs.begin(), gs.end(), std::greater<>());
    if (std::log10(gs.front() / gs.back()) < 2.0 - 1e-9)
        fail("gamma grid must span at least two decades");
    double min_fraction = kInf;
    for (std::size_t i = 0; i < space.size(); ++i)
        min_fraction = std::min(min_fraction, space.mass(static_cast<PointId>(i)));
    min_fraction /= space.total_mass();
    if (gs.back() <= min_fraction)
        fail("gamma grid below the space's resolution limit (minimal ball mass fraction)");

    BoydEstimate est;
    est.gammas = gs;
    est.phi_hat = phi_x_grid(spec, space, gs, family);
    est.family = family.describe();
    est.ceiling = spec.boyd_ceiling();

    // regression over the smallest-gamma half (the gamma -> 0 end)
    const std::size_t m = gs.size();
    const std::size_t lo = m / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t cnt = m - lo;
    for (std::size_t i = lo; i < m; ++i) {
        const double x = std::log(1.0 / gs[i]);
        const double y = std::log(std::max(est.phi_hat[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = cnt * sxx - sx * sx;
    est.alpha_hat = denom > 0 ? (cnt * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - est.alpha_hat * sx) / cnt;
    double rss = 0;
    for (std::size_t i = lo; i < m; ++i) {
        const double x = std::log(1.0 / gs[i]);
        const double y = std::log(std::max(est.phi_hat[i], 1e-300));
        const double e = y - (intercept + est.alpha_hat * x);
        rss += e * e;
    }
    est.residual = std::sqrt(rss / cnt);
    return est;
}

} // namespace medianscape
