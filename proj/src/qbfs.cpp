#include "medianscape/qbfs.hpp"

#include "medianscape/medians.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace medianscape {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::invalid_argument("qbfs: " + msg);
}

} // namespace

// ---------------------------------------------------------------- Orlicz ---

double OrliczFunction::operator()(double t) const
{
    if (t <= 0)
        return 0;
    switch (kind_) {
    case Kind::power:
        return std::pow(t, p_);
    case Kind::power_log:
        return std::pow(t, p_) * std::log(std::exp(1.0) + t);
    case Kind::exp_minus_one:
        return std::expm1(t);
    case Kind::table: {
        // piecewise power-law interpolation; boundary segments extrapolate
        const auto& T = table_;
        if (t <= T.front().first)
            return T.front().second * std::pow(t / T.front().first, lo_slope_);
        if (t >= T.back().first)
            return T.back().second * std::pow(t / T.back().first, hi_slope_);
        auto it = std::lower_bound(T.begin(), T.end(), t,
                                   [](const auto& a, double v) { return a.first < v; });
        const auto& [t2, y2] = *it;
        const auto& [t1, y1] = *(it - 1);
        if (t == t2)
            return y2;
        const double slope = std::log(y2 / y1) / std::log(t2 / t1);
        return y1 * std::pow(t / t1, slope);
    }
    }
    return 0;
}

void OrliczFunction::audit()
{
    // log-grid audit of monotonicity, the halving condition and doubling;
    // the grid is truncated where the function overflows (exp-type growth)
    std::vector<double> grid;
    for (int k = -24; k <= 24; ++k) {
        const double t = std::pow(2.0, k);
        if (!std::isfinite((*this)(2 * t)))
            break;
        grid.push_back(t);
    }
    if (grid.size() < 8)
        fail("Orlicz function overflows too early for a meaningful audit");

    double prev = 0;
    for (double t : grid) {
        const double v = (*this)(t);
        if (!(v >= prev) || !std::isfinite(v))
            fail("Orlicz function is not increasing and finite on the audit grid");
        prev = v;
    }
    if ((*this)(grid.back()) <= 0)
        fail("Orlicz function vanishes identically on the audit grid");

    // find C with Phi(t/C) <= Phi(t)/2 everywhere on the grid
    double C = 1;
    for (int tries = 0; tries < 64; ++tries) {
        C *= 1.5;
        bool ok = true;
        for (double t : grid)
            if ((*this)(t) > 0 && (*this)(t / C) > (*this)(t) / 2) {
                ok = false;
                break;
            }
        if (ok) {
            growth_C_ = C;
            break;
        }
        if (tries == 63)
            fail("Orlicz growth condition Phi(t/C) <= Phi(t)/2 failed on the audit grid");
    }

    // beta = inf log-slope over grid pairs; C0 adjusted so the bound holds
    double beta = kInf;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double y1 = (*this)(grid[i]), y2 = (*this)(grid[i + 1]);
        if (y1 > 0 && y2 > 0)
            beta = std::min(beta, std::log(y2 / y1) / std::log(grid[i + 1] / grid[i]));
    }
    if (!std::isfinite(beta) || beta <= 0)
        fail("Orlicz function has no positive lower growth exponent on the audit grid");
    if (kind_ == Kind::table)
        beta_ = beta;
    double c0 = 1;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j) {
            const double s = grid[i], t = grid[j];
            const double ft = (*this)(t);
            if (ft <= 0)
                continue;
            const double bound = std::pow(s / t, beta_) * ft;
            if (bound > 0)
                c0 = std::max(c0, (*this)(s) / bound);
        }
    C0_ = c0;

    // doubling: ratio Phi(2t)/Phi(t) bounded across the grid
    double worst = 1, top = 1;
    for (double t : grid) {
        const double ft = (*this)(t);
        if (ft <= 0)
            continue;
        const double ratio = (*this)(2 * t) / ft;
        worst = std::max(worst, ratio);
        top = ratio;
    }
    doubling_C_ = worst;
    if (kind_ == Kind::table)
        doubling_ = top <= 4 * std::max(1.0, (*this)(2.0) / (*this)(1.0));
}

OrliczFunction OrliczFunction::power(double p)
{
    if (!(p > 0))
        fail("Orlicz power exponent must be positive");
    OrliczFunction f;
    f.kind_ = Kind::power;
    f.p_ = p;
    f.beta_ = p;
    f.C0_ = 1;
    f.growth_C_ = std::pow(2.0, 1.0 / p);
    f.doubling_C_ = std::pow(2.0, p);
    f.doubling_ = true;
    f.audit();
    return f;
}

OrliczFunction OrliczFunction::power_log(double p)
{
    if (!(p > 0))
        fail("Orlicz power exponent must be positive");
    OrliczFunction f;
    f.kind_ = Kind::power_log;
    f.p_ = p;
    f.beta_ = p;
    f.doubling_ = true;
    f.audit();
    return f;
}

OrliczFunction OrliczFunction::exp_minus_one()
{
    OrliczFunction f;
    f.kind_ = Kind::exp_minus_one;
    f.p_ = 1;
    f.beta_ = 1;
    f.doubling_ = false;
    f.audit();
    return f;
}

OrliczFunction OrliczFunction::from_table(std::vector<std::pair<double, double>> pts)
{
    if (pts.size() < 2)
        fail("Orlicz table needs at least two points");
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i].first > 0) || !(pts[i].second > 0))
            fail("Orlicz table entries must be positive");
        if (!(pts[i + 1].second >= pts[i].second))
            fail("Orlicz table is not increasing");
    }
    OrliczFunction f;
    f.kind_ = Kind::table;
    f.table_ = std::move(pts);
    const auto seg_slope = [&](std::size_t a, std::size_t b) {
        return std::log(f.table_[b].second / f.table_[a].second) /
               std::log(f.table_[b].first / f.table_[a].first);
    };
    f.lo_slope_ = std::max(seg_slope(0, 1), 1e-9);
    f.hi_slope_ = std::max(seg_slope(f.table_.size() - 2, f.table_.size() - 1), 1e-9);
    f.beta_ = 1;
    f.audit();
    return f;
}

std::string OrliczFunction::describe() const
{
    std::ostringstream os;
    switch (kind_) {
    case Kind::power:
        os << "power(" << p_ << ")";
        break;
    case Kind::power_log:
        os << "power_log(" << p_ << ")";
        break;
    case Kind::exp_minus_one:
        os << "exp_minus_one";
        break;
    case Kind::table:
        os << "table[" << table_.size() << "]";
        break;
    }
    return os.str();
}

// ------------------------------------------------------------- exponents ---

ExponentField make_exponent_field(const MetricMeasureSpace& space, std::vector<double> p)
{
    if (p.size() != space.size())
        fail("exponent field length does not match the space");
    ExponentField f;
    f.p = std::move(p);
    f.p_minus = kInf;
    f.p_plus = 0;
    for (double v : f.p) {
        if (!(v > 0) || !std::isfinite(v))
            fail("variable exponent must be positive and finite");
        f.p_minus = std::min(f.p_minus, v);
        f.p_plus = std::max(f.p_plus, v);
    }
    const std::size_t n = space.size();
    f.audit_exhaustive = n <= 2048;
    double C = 0;
    if (f.audit_exhaustive) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = space.dist(static_cast<PointId>(i), static_cast<PointId>(j));
                C = std::max(C, std::fabs(f.p[i] - f.p[j]) * std::log(std::exp(1.0) + 1 / d));
            }
    } else {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t t = 0; t < 16 * n; ++t) {
            const std::size_t i = pick(rng), j = pick(rng);
            if (i == j)
                continue;
            const double d = space.dist(static_cast<PointId>(i), static_cast<PointId>(j));
            C = std::max(C, std::fabs(f.p[i] - f.p[j]) * std::log(std::exp(1.0) + 1 / d));
        }
    }
    f.log_holder_C = C;
    return f;
}

// ------------------------------------------------------------------ spec ---

QuasinormSpec QuasinormSpec::lp(double p)
{
    if (!(p > 0))
        fail("Lp exponent must be positive");
    QuasinormSpec s;
    s.family_ = Family::Lp;
    s.p_ = p;
    s.q_ = p;
    s.rho_ = std::isinf(p) ? 1.0 : std::min(1.0, p);
    s.absolutely_continuous_ = !std::isinf(p);
    s.ac_justification_ = std::isinf(p) ? "max-norm: indicator tails do not vanish"
                                        : "Lp with p < infinity";
    return s;
}

QuasinormSpec QuasinormSpec::lorentz(double p, double q)
{
    if (!(p > 0) || std::isinf(p))
        fail("Lorentz p must lie in (0, infinity)");
    if (!(q > 0))
        fail("Lorentz q must be positive");
    QuasinormSpec s;
    s.family_ = Family::Lorentz;
    s.p_ = p;
    s.q_ = q;
    s.rho_ = std::isinf(q) ? std::min(1.0, p) : std::min({1.0, p, q});
    s.absolutely_continuous_ = !std::isinf(q);
    s.ac_justification_ = std::isinf(q) ? "weak-type Lorentz(p,inf) is not absolutely continuous"
                                        : "Lorentz with 0 < p, q < infinity";
    return s;
}

QuasinormSpec QuasinormSpec::orlicz(OrliczFunction phi)
{
    QuasinormSpec s;
    s.family_ = Family::Orlicz;
    s.phi_ = std::move(phi);
    s.p_ = s.phi_.exponent();
    s.rho_ = std::min(1.0, s.phi_.kind() == OrliczFunction::Kind::power ? s.phi_.exponent()
                                                                        : s.phi_.beta());
    s.rho_empirical_ = s.phi_.kind() != OrliczFunction::Kind::power;
    s.absolutely_continuous_ = s.phi_.doubling();
    s.ac_justification_ = s.phi_.doubling() ? "doubling Orlicz function"
                                            : "non-doubling Orlicz function";
    return s;
}

QuasinormSpec QuasinormSpec::varexp(ExponentField field)
{
    QuasinormSpec s;
    s.family_ = Family::VarExp;
    s.exponents_ = std::make_shared<ExponentField>(std::move(field));
    s.p_ = s.exponents_->p_minus;
    s.q_ = s.exponents_->p_plus;
    s.rho_ = std::min(1.0, s.exponents_->p_minus);
    s.absolutely_continuous_ = std::isfinite(s.exponents_->p_plus);
    s.ac_justification_ = "variable exponent with p_+ < infinity";
    return s;
}

double QuasinormSpec::boyd_ceiling() const
{
    switch (family_) {
    case Family::Lp:
        return std::isinf(p_) ? 0.0 : 1.0 / p_;
    case Family::Lorentz:
        return 1.0 / p_;
    case Family::Orlicz:
        return 1.0 / phi_.beta();
    case Family::VarExp:
        return 1.0 / exponents_->p_minus;
    }
    return kInf;
}

std::string QuasinormSpec::describe() const
{
    std::ostringstream os;
    switch (family_) {
    case Family::Lp:
        os << "Lp(p=" << p_ << ")";
        break;
    case Family::Lorentz:
        os << "Lorentz(p=" << p_ << ",q=" << q_ << ")";
        break;
    case Family::Orlicz:
        os << "Orlicz(" << phi_.describe() << ")";
        break;
    case Family::VarExp:
        os << "VarExp(p_-=" << exponents_->p_minus << ",p_+=" << exponents_->p_plus << ")";
        break;
    }
    return os.str();
}

// ------------------------------------------------------------- quasinorm ---

namespace {

double lp_norm(const MetricMeasureSpace& space, std::span<const double> u, double p)
{
    if (std::isinf(p)) {
        double m = 0;
        for (double v : u)
            m = std::max(m, std::fabs(v));
        return m;
    }
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += space.mass(static_cast<PointId>(i)) * std::pow(std::fabs(u[i]), p);
    return std::pow(s, 1.0 / p);
}

std::vector<PointId> all_points(const MetricMeasureSpace& space)
{
    std::vector<PointId> a(space.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = static_cast<PointId>(i);
    return a;
}

double lorentz_norm(const MetricMeasureSpace& space, std::span<const double> u, double p,
                    double q)
{
    const auto pts = all_points(space);
    const StepRearrangement r = decreasing_rearrangement(space, u, pts);
    if (r.levels.size() == 1 && r.levels[0] == 0)
        return 0;
    if (std::isinf(q)) {
        // sup over lambda of lambda * mu(|u| > lambda)^{1/p}: attained in the
        // limit lambda -> level from below, where the superlevel mass is the
        // cumulative mass at that level.
        double best = 0;
        for (std::size_t k = 0; k < r.levels.size(); ++k)
            best = std::max(best, r.levels[k] * std::pow(r.breakpoints[k], 1.0 / p));
        return best;
    }
    // integral of q lambda^{q-1} mu(|u| > lambda)^{q/p} with the step
    // superlevel profile: on [level_{k+1}, level_k) the mass is breakpoint_k.
    double acc = 0;
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
        const double hi = r.levels[k];
        const double lo = k + 1 < r.levels.size() ? r.levels[k + 1] : 0.0;
        if (hi <= 0)
            continue;
        acc += std::pow(r.breakpoints[k], q / p) *
               (std::pow(hi, q) - std::pow(lo, q)) / q;
    }
    return std::pow(acc, 1.0 / q);
}

} // namespace

double luxemburg_modular(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                         std::span<const double> u, double lambda)
{
    double s = 0;
    if (spec.family() == QuasinormSpec::Family::Orlicz) {
        const auto& phi = spec.phi();
        for (std::size_t i = 0; i < u.size(); ++i)
            s += space.mass(static_cast<PointId>(i)) * phi(std::fabs(u[i]) / lambda);
    } else {
        const auto& p = spec.exponents().p;
        for (std::size_t i = 0; i < u.size(); ++i)
            s += space.mass(static_cast<PointId>(i)) *
                 std::pow(std::fabs(u[i]) / lambda, p[i]);
    }
    return s;
}

namespace {

double luxemburg_norm(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                      std::span<const double> u)
{
    double umax = 0;
    for (double v : u)
        umax = std::max(umax, std::fabs(v));
    if (umax == 0)
        return 0;

    // bracket the crossing modular(lambda) = 1 (modular strictly decreasing)
    double hi = umax;
    int guard = 0;
    while (luxemburg_modular(spec, space, u, hi) > 1 && guard++ < 2048)
        hi *= 2;
    double lo = hi;
    guard = 0;
    while (luxemburg_modular(spec, space, u, lo / 2) <= 1 && guard++ < 2048)
        lo /= 2;
    lo /= 2;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (luxemburg_modular(spec, space, u, mid) <= 1)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

double quasinorm(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                 std::span<const double> u)
{
    if (u.size() != space.size())
        fail("quasinorm: function length does not match the space");
    switch (spec.family()) {
    case QuasinormSpec::Family::Lp:
        return lp_norm(space, u, spec.p());
    case QuasinormSpec::Family::Lorentz:
        return lorentz_norm(space, u, spec.p(), spec.q());
    case QuasinormSpec::Family::Orlicz:
    case QuasinormSpec::Family::VarExp:
        return luxemburg_norm(spec, space, u);
    }
    return 0;
}

// ------------------------------------------------------- structural audit ---

double aoki_exponent(const QuasinormSpec& spec)
{
    return spec.rho();
}

AokiAudit aoki_exponent_audited(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                                std::size_t trials, std::uint64_t seed)
{
    AokiAudit out;
    out.rho = spec.rho();
    out.trials = trials;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> kdist(2, 3);

    const std::size_t n = space.size();
    for (int attempt = 0; attempt < 40; ++attempt) {
        rng.seed(seed);
        double worst = 0;
        bool ok = true;
        for (std::size_t t = 0; t < trials; ++t) {
            const int k = kdist(rng);
            std::vector<double> sum(n, 0.0);
            double rhs = 0;
            for (int j = 0; j < k; ++j) {
                std::vector<double> f(n);
                for (auto& v : f)
                    v = val(rng);
                for (std::size_t i = 0; i < n; ++i)
                    sum[i] += f[i];
                rhs += std::pow(quasinorm(spec, space, f), out.rho);
            }
            rhs = std::pow(4.0, 1.0 / out.rho) * std::pow(rhs, 1.0 / out.rho);
            const double lhs = quasinorm(spec, space, sum);
            if (rhs > 0)
                worst = std::max(worst, lhs / rhs);
            if (lhs > rhs * (1 + 1e-9)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out.worst_ratio = worst;
            return out;
        }
        out.rho *= 0.9;
        out.empirical = true;
    }
    fail("Aoki-Rolewicz audit failed even after shrinking rho; the analytic "
         "exponent for " +
         spec.describe() + " looks wrong");
}

double estimate_c_delta(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                        std::size_t trials, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    const std::size_t n = space.size();
    double c = 1;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> f(n), g(n), s(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = val(rng);
            g[i] = val(rng);
            s[i] = f[i] + g[i];
        }
        const double den = quasinorm(spec, space, f) + quasinorm(spec, space, g);
        if (den > 0)
            c = std::max(c, quasinorm(spec, space, s) / den);
    }
    return c;
}

AxiomReport verify_axioms(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                          std::size_t trials, std::uint64_t seed)
{
    if (trials < 1)
        fail("verify_axioms: trials must be at least 1");
    AxiomReport rep;
    rep.trials = trials;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const std::size_t n = space.size();

    for (std::size_t t = 0; t < trials; ++t) {
        // lattice: |f| <= |g| implies ||f|| <= ||g||
        std::vector<double> g(n), f(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = val(rng);
            f[i] = g[i] * frac(rng);
        }
        const double ng = quasinorm(spec, space, g);
        const double nf = quasinorm(spec, space, f);
        rep.lattice_slack = std::max(rep.lattice_slack, nf - ng);
        if (nf > ng * (1 + 1e-9) + 1e-14)
            rep.lattice_ok = false;

        // indicators have finite norm
        std::vector<double> chi(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (frac(rng) < 0.5)
                chi[i] = 1.0;
        if (!std::isfinite(quasinorm(spec, space, chi)))
            rep.indicators_finite = false;

        // monotone convergence along 0 <= f_k up to f
        std::vector<double> h(n);
        for (auto& v : h)
            v = std::fabs(val(rng));
        const double nh = quasinorm(spec, space, h);
        double prev = 0;
        const int K = 6;
        for (int k = 1; k <= K; ++k) {
            std::vector<double> hk(n);
            for (std::size_t i = 0; i < n; ++i)
                hk[i] = h[i] * (static_cast<double>(k) / K);
            const double nk = quasinorm(spec, space, hk);
            rep.fatou_slack = std::max(rep.fatou_slack, prev - nk);
            if (nk < prev * (1 - 1e-9) - 1e-14)
                rep.fatou_ok = false;
            prev = nk;
        }
        rep.fatou_slack = std::max(rep.fatou_slack, std::fabs(prev - nh));
        if (std::fabs(prev - nh) > 1e-9 * std::max(1.0, nh))
            rep.fatou_ok = false;
    }
    return rep;
}

} // namespace medianscape
