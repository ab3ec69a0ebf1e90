#include "medianscape/hajlasz.hpp"

#include "medianscape/lp.hpp"
#include "medianscape/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace medianscape {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::invalid_argument("hajlasz: " + msg);
}

double dist_pow(const MetricMeasureSpace& space, PointId i, PointId j, double s)
{
    const double d = space.dist(i, j);
    return s == 1.0 ? d : std::pow(d, s);
}

/// Scales g up by the smallest power of (1 + 2^-40) that removes an
/// ulp-scale defect. The underlying inequalities hold in real arithmetic;
/// this only undoes rounding, never more than a 1e-9 relative change.
void lift_ulp_defect(const MetricMeasureSpace& space, std::span<const double> u,
                     std::vector<double>& g, double s, const char* what)
{
    for (int k = 0; k < 12; ++k) {
        if (gradient_defect(space, u, g, s) == 0)
            return;
        for (auto& v : g)
            v *= 1.0 + 0x1p-40;
    }
    fail(std::string(what) + ": defect persists beyond rounding scale");
}

} // namespace

double gradient_defect(const MetricMeasureSpace& space, std::span<const double> u,
                       std::span<const double> g, double s)
{
    const std::size_t n = space.size();
    if (u.size() != n || g.size() != n)
        fail("function/gradient length does not match the space");
    if (!(s > 0) || s > 1)
        fail("s must lie in (0, 1]");
    for (double v : g)
        if (!(v >= 0))
            fail("gradient has a negative entry");

    return parallel_max(n, 0.0, [&](std::size_t i) {
        double worst = 0;
        const double ui = u[i], gi = g[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double lhs = std::fabs(ui - u[j]);
            const double rhs =
                dist_pow(space, static_cast<PointId>(i), static_cast<PointId>(j), s) *
                (gi + g[j]);
            worst = std::max(worst, lhs - rhs);
        }
        return worst;
    });
}

GradientCandidate canonical_gradient(const MetricMeasureSpace& space,
                                     std::span<const double> u, double s)
{
    const std::size_t n = space.size();
    if (u.size() != n)
        fail("function length does not match the space");
    GradientCandidate out;
    out.s = s;
    out.g.assign(n, 0.0);
    out.tag = "canonical";
    if (n == 1)
        return out;

    parallel_for(n, [&](std::size_t i) {
        double m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            const double diff = std::fabs(u[i] - u[j]);
            if (diff == 0)
                continue;
            m = std::max(m, diff / dist_pow(space, static_cast<PointId>(i),
                                            static_cast<PointId>(j), s));
        }
        out.g[i] = 0.5 * m;
    });
    lift_ulp_defect(space, u, out.g, s, "canonical_gradient");
    out.defect = 0;
    return out;
}

namespace {

GradientCandidate minimal_gradient_lp(const MetricMeasureSpace& space,
                                      std::span<const double> u, double s)
{
    const std::size_t n = space.size();
    std::vector<PairConstraint> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::fabs(u[i] - u[j]);
            if (diff > 0)
                pairs.push_back({static_cast<int>(i), static_cast<int>(j),
                                 diff / dist_pow(space, static_cast<PointId>(i),
                                                 static_cast<PointId>(j), s)});
        }
    std::vector<double> w(space.masses().begin(), space.masses().end());
    CoveringLpResult lp = solve_covering_lp(w, pairs);

    GradientCandidate out;
    out.s = s;
    out.g = std::move(lp.g);
    out.tag = "exact (lp, gap " + std::to_string(lp.duality_gap) + ")";
    lift_ulp_defect(space, u, out.g, s, "minimal_gradient(L1)");
    out.defect = 0;
    return out;
}

GradientCandidate minimal_gradient_maxnorm(const MetricMeasureSpace& space,
                                           std::span<const double> u, double s)
{
    const std::size_t n = space.size();
    double half = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::fabs(u[i] - u[j]);
            if (diff > 0)
                half = std::max(half, diff / dist_pow(space, static_cast<PointId>(i),
                                                      static_cast<PointId>(j), s));
        }
    GradientCandidate out;
    out.s = s;
    out.g.assign(n, 0.5 * half);
    out.tag = "exact (half Holder seminorm)";
    lift_ulp_defect(space, u, out.g, s, "minimal_gradient(max-norm)");
    out.defect = 0;
    return out;
}

GradientCandidate minimal_gradient_subgradient(const MetricMeasureSpace& space,
                                               std::span<const double> u, double s,
                                               const QuasinormSpec& spec)
{
    const std::size_t n = space.size();
    const double p = spec.p();
    GradientCandidate cur = canonical_gradient(space, u, s);

    // constraint levels c_ij, skipping inactive pairs
    struct Pair {
        std::int32_t i, j;
        double c;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::fabs(u[i] - u[j]);
            if (diff > 0)
                pairs.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                                 diff / dist_pow(space, static_cast<PointId>(i),
                                                 static_cast<PointId>(j), s)});
        }

    auto objective = [&](const std::vector<double>& g) {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i)
            acc += space.mass(static_cast<PointId>(i)) * std::pow(g[i], p);
        return std::pow(acc, 1.0 / p);
    };

    std::vector<double> g = cur.g;
    std::vector<double> best = g;
    double best_val = objective(g);
    double scale = 0;
    for (double v : g)
        scale = std::max(scale, v);
    if (scale == 0)
        scale = 1;

    const int iterations = 500;
    std::vector<double> grad(n);
    for (int k = 1; k <= iterations; ++k) {
        const double F = objective(g);
        if (F == 0)
            break;
        double norm2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = space.mass(static_cast<PointId>(i)) *
                      std::pow(std::max(g[i], 1e-300), p - 1) * std::pow(F, 1.0 - p);
            norm2 += grad[i] * grad[i];
        }
        norm2 = std::sqrt(norm2);
        if (norm2 == 0)
            break;
        const double step = scale / static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = std::max(0.0, g[i] - step * grad[i] / norm2);
        // one lift pass restores feasibility: lifts only raise values, so
        // earlier pairs stay satisfied
        for (const auto& pr : pairs) {
            const double deficit = pr.c - g[pr.i] - g[pr.j];
            if (deficit > 0) {
                g[pr.i] += deficit / 2;
                g[pr.j] += deficit / 2;
            }
        }
        const double val = objective(g);
        if (val < best_val) {
            best_val = val;
            best = g;
        }
    }

    GradientCandidate out;
    out.s = s;
    out.g = std::move(best);
    out.tag = "upper bound (projected subgradient)";
    lift_ulp_defect(space, u, out.g, s, "minimal_gradient(subgradient)");
    out.defect = 0;
    return out;
}

} // namespace

GradientCandidate minimal_gradient(const MetricMeasureSpace& space, std::span<const double> u,
                                   double s, const QuasinormSpec& spec)
{
    if (u.size() != space.size())
        fail("function length does not match the space");
    const bool is_lp = spec.family() == QuasinormSpec::Family::Lp;
    if (is_lp && spec.p() == 1.0 && space.size() <= 1024)
        return minimal_gradient_lp(space, u, s);
    if (is_lp && std::isinf(spec.p()))
        return minimal_gradient_maxnorm(space, u, s);
    if (is_lp && spec.p() > 1 && std::isfinite(spec.p()) && space.size() <= 2048)
        return minimal_gradient_subgradient(space, u, s, spec);
    GradientCandidate out = canonical_gradient(space, u, s);
    out.tag = "upper bound (canonical)";
    return out;
}

HajlaszNorm hajlasz_norm(const MetricMeasureSpace& space, std::span<const double> u, double s,
                         const QuasinormSpec& spec)
{
    GradientCandidate g = minimal_gradient(space, u, s, spec);
    HajlaszNorm out;
    out.homogeneous = quasinorm(spec, space, g.g);
    out.full = quasinorm(spec, space, u) + out.homogeneous;
    out.tag = g.tag;
    return out;
}

GradientCandidate max_min_gradient(const MetricMeasureSpace& space, std::span<const double> u,
                                   const GradientCandidate& gu, std::span<const double> v,
                                   const GradientCandidate& gv)
{
    const std::size_t n = space.size();
    if (gu.s != gv.s)
        fail("max_min_gradient: mixed exponents");
    if (gradient_defect(space, u, gu.g, gu.s) != 0 ||
        gradient_defect(space, v, gv.g, gv.s) != 0)
        fail("max_min_gradient: inputs are not feasible gradients");
    GradientCandidate out;
    out.s = gu.s;
    out.g.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.g[i] = std::max(gu.g[i], gv.g[i]);
    out.defect = 0;
    out.tag = "max";
    return out;
}

GradientCandidate sup_gradient(const MetricMeasureSpace& space,
                               const std::vector<std::vector<double>>& us,
                               const std::vector<GradientCandidate>& gs)
{
    if (us.empty() || us.size() != gs.size())
        fail("sup_gradient: empty or mismatched family");
    const std::size_t n = space.size();
    for (std::size_t k = 0; k < us.size(); ++k)
        if (gradient_defect(space, us[k], gs[k].g, gs[k].s) != 0)
            fail("sup_gradient: input " + std::to_string(k) + " is not feasible");
    GradientCandidate out;
    out.s = gs.front().s;
    out.g.assign(n, 0.0);
    for (const auto& g : gs)
        for (std::size_t i = 0; i < n; ++i)
            out.g[i] = std::max(out.g[i], g.g[i]);
    out.defect = 0;
    out.tag = "sup";
    return out;
}

LipschitzBump make_bump(const MetricMeasureSpace& space, std::vector<double> phi)
{
    const std::size_t n = space.size();
    if (phi.size() != n)
        fail("bump length does not match the space");
    LipschitzBump b;
    b.phi = std::move(phi);
    for (std::size_t i = 0; i < n; ++i) {
        b.sup_norm = std::max(b.sup_norm, std::fabs(b.phi[i]));
        if (b.phi[i] != 0)
            b.support.push_back(static_cast<PointId>(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::fabs(b.phi[i] - b.phi[j]);
            if (diff > 0)
                b.lipschitz = std::max(
                    b.lipschitz,
                    diff / space.dist(static_cast<PointId>(i), static_cast<PointId>(j)));
        }
    }
    return b;
}

GradientCandidate product_gradient(const MetricMeasureSpace& space, std::span<const double> u,
                                   const GradientCandidate& g, const LipschitzBump& bump,
                                   double s)
{
    const std::size_t n = space.size();
    if (gradient_defect(space, u, g.g, s) != 0)
        fail("product_gradient: input gradient is not feasible");
    std::vector<bool> in_support(n, false);
    for (PointId i : bump.support)
        in_support[static_cast<std::size_t>(i)] = true;

    const double A = bump.sup_norm;
    const double B = std::pow(2 * A, 1.0 - s) * std::pow(bump.lipschitz, s);
    GradientCandidate out;
    out.s = s;
    out.g.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (in_support[i])
            out.g[i] = A * g.g[i] + B * std::fabs(u[i]);

    std::vector<double> uphi(n);
    for (std::size_t i = 0; i < n; ++i)
        uphi[i] = u[i] * bump.phi[i];
    lift_ulp_defect(space, uphi, out.g, s, "product_gradient");
    out.defect = 0;
    out.tag = "product";
    return out;
}

HolderApproximation holder_approximate(const MetricMeasureSpace& space,
                                       std::span<const double> u, const GradientCandidate& g,
                                       double s, double lambda)
{
    const std::size_t n = space.size();
    if (!(lambda > 0))
        fail("holder_approximate: lambda must be positive");
    if (gradient_defect(space, u, g.g, s) != 0)
        fail("holder_approximate: input gradient is not feasible");

    HolderApproximation out;
    for (std::size_t i = 0; i < n; ++i)
        if (g.g[i] <= lambda)
            out.good_set.push_back(static_cast<PointId>(i));
    if (out.good_set.empty())
        fail("holder_approximate: lambda below min gradient");

    double lo = u[0], hi = u[0];
    for (double v : u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    out.u_lambda.assign(n, 0.0);
    std::vector<bool> good(n, false);
    for (PointId i : out.good_set)
        good[static_cast<std::size_t>(i)] = true;
    for (std::size_t x = 0; x < n; ++x) {
        if (good[x]) {
            // the McShane minimum equals u(x) on E_lambda; set it exactly
            out.u_lambda[x] = u[x];
            continue;
        }
        double m = kInf;
        for (PointId y : out.good_set)
            m = std::min(m, u[static_cast<std::size_t>(y)] +
                                2 * lambda *
                                    dist_pow(space, static_cast<PointId>(x), y, s));
        out.u_lambda[x] = std::clamp(m, lo, hi);
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::fabs(out.u_lambda[i] - out.u_lambda[j]);
            if (diff > 0)
                out.holder_quotient = std::max(
                    out.holder_quotient,
                    diff / dist_pow(space, static_cast<PointId>(i),
                                    static_cast<PointId>(j), s));
        }

    out.residual.s = s;
    out.residual.g.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (!good[i])
            out.residual.g[i] = g.g[i] + 3 * lambda;
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i)
        diff[i] = u[i] - out.u_lambda[i];
    lift_ulp_defect(space, diff, out.residual.g, s, "holder_approximate residual");
    out.residual.defect = 0;
    out.residual.tag = "holder residual";
    return out;
}

CapacityBound capacity_upper(const MetricMeasureSpace& space, std::span<const PointId> E,
                             double s, const QuasinormSpec& spec,
                             std::span<const double> radii_grid)
{
    const std::size_t n = space.size();
    CapacityBound out;
    out.set.assign(E.begin(), E.end());
    if (E.empty()) {
        out.value = 0;
        out.witness_u.assign(n, 0.0);
        out.witness_g.g.assign(n, 0.0);
        out.witness_g.s = s;
        out.tag = "empty set";
        return out;
    }
    if (radii_grid.empty())
        fail("capacity_upper: empty radii grid");

    std::vector<double> dE(n, kInf);
    parallel_for(n, [&](std::size_t x) {
        for (PointId e : E)
            dE[x] = std::min(dE[x], space.dist(static_cast<PointId>(x), e));
    });

    out.value = kInf;
    for (double delta : radii_grid) {
        if (!(delta > 0))
            fail("capacity_upper: radii must be positive");
        std::vector<double> u(n);
        const double ds = s == 1.0 ? delta : std::pow(delta, s);
        for (std::size_t x = 0; x < n; ++x) {
            const double t = (s == 1.0 ? dE[x] : std::pow(dE[x], s)) / ds;
            u[x] = std::clamp(1.0 - t, 0.0, 1.0);
        }
        GradientCandidate g = minimal_gradient(space, u, s, spec);
        const double value = quasinorm(spec, space, u) + quasinorm(spec, space, g.g);
        if (value < out.value) {
            out.value = value;
            out.delta = delta;
            out.witness_u = std::move(u);
            out.tag = g.tag;
            out.witness_g = std::move(g);
        }
    }
    return out;
}

} // namespace medianscape
