#include "medianscape/lebesgue.hpp"

#include "medianscape/covers.hpp"
#include "medianscape/medians.hpp"
#include "medianscape/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace medianscape {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::invalid_argument("lebesgue: " + msg);
}

bool fat_cantor_member(double x)
{
    double lo = 0, hi = 1;
    for (int k = 1; k <= 26; ++k) {
        const double gap = std::pow(4.0, -k);
        const double c = 0.5 * (lo + hi);
        if (x > c - gap / 2 && x < c + gap / 2)
            return false;
        if (x <= c - gap / 2)
            hi = c - gap / 2;
        else
            lo = c + gap / 2;
    }
    return true;
}

} // namespace

double ContinuumFunction::eval(double x) const
{
    switch (kind) {
    case Kind::constant:
        return value;
    case Kind::interval_indicator:
        return (x >= a && x <= b) ? 1.0 : 0.0;
    case Kind::power_singularity: {
        const double d = std::fabs(x - x0);
        if (d == 0)
            return cap;
        return std::min(cap, std::pow(d, -alpha));
    }
    case Kind::fat_cantor:
        return fat_cantor_member(x) ? 1.0 : 0.0;
    case Kind::holder_ramp:
        return std::pow(std::max(x, 0.0), exponent);
    }
    return 0;
}

std::string ContinuumFunction::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case Kind::constant:
        os << "constant(" << value << ")";
        break;
    case Kind::interval_indicator:
        os << "indicator(" << a << "," << b << ")";
        break;
    case Kind::power_singularity:
        os << "singularity(" << x0 << "," << alpha << "," << cap << ")";
        break;
    case Kind::fat_cantor:
        os << "fat_cantor";
        break;
    case Kind::holder_ramp:
        os << "ramp(" << exponent << ")";
        break;
    }
    return os.str();
}

ContinuumFunction ContinuumFunction::constant(double c)
{
    ContinuumFunction f;
    f.kind = Kind::constant;
    f.value = c;
    return f;
}
ContinuumFunction ContinuumFunction::interval_indicator(double a, double b)
{
    ContinuumFunction f;
    f.kind = Kind::interval_indicator;
    f.a = a;
    f.b = b;
    return f;
}
ContinuumFunction ContinuumFunction::power_singularity(double x0, double alpha, double cap)
{
    ContinuumFunction f;
    f.kind = Kind::power_singularity;
    f.x0 = x0;
    f.alpha = alpha;
    f.cap = cap;
    return f;
}
ContinuumFunction ContinuumFunction::fat_cantor()
{
    ContinuumFunction f;
    f.kind = Kind::fat_cantor;
    return f;
}
ContinuumFunction ContinuumFunction::holder_ramp(double s)
{
    ContinuumFunction f;
    f.kind = Kind::holder_ramp;
    f.exponent = s;
    return f;
}

ContinuumFunction ContinuumFunction::parse(const std::string& text)
{
    auto args = [&](std::size_t expect) {
        const auto lp = text.find('(');
        const auto rp = text.rfind(')');
        std::vector<double> out;
        if (lp == std::string::npos || rp == std::string::npos || rp < lp)
            fail("cannot parse function '" + text + "'");
        std::string body = text.substr(lp + 1, rp - lp - 1);
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ','))
            out.push_back(std::stod(tok));
        if (out.size() != expect)
            fail("function '" + text + "' expects " + std::to_string(expect) + " arguments");
        return out;
    };
    if (text.rfind("constant", 0) == 0) {
        const auto a = args(1);
        return constant(a[0]);
    }
    if (text.rfind("indicator", 0) == 0) {
        const auto a = args(2);
        return interval_indicator(a[0], a[1]);
    }
    if (text.rfind("singularity", 0) == 0) {
        const auto a = args(3);
        return power_singularity(a[0], a[1], a[2]);
    }
    if (text.rfind("fat_cantor", 0) == 0)
        return fat_cantor();
    if (text.rfind("ramp", 0) == 0) {
        const auto a = args(1);
        return holder_ramp(a[0]);
    }
    fail("unknown catalog function '" + text + "'");
}

ResolutionFamily::ResolutionFamily(std::vector<std::size_t> resolutions, ContinuumFunction u)
    : resolutions_(std::move(resolutions)), u_(u)
{
    if (resolutions_.empty())
        fail("family needs at least one resolution");
    for (std::size_t i = 0; i + 1 < resolutions_.size(); ++i)
        if (resolutions_[i] >= resolutions_[i + 1])
            fail("resolutions must be strictly increasing");
    for (std::size_t n : resolutions_) {
        spaces_.push_back(generate_grid1d(n));
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = u_.eval(spaces_.back().coord(static_cast<PointId>(i)));
        values_.push_back(std::move(v));
    }
}

namespace {

// open-ball index interval (lo, hi] style: [first, last] inclusive
std::pair<std::size_t, std::size_t> line_ball(const MetricMeasureSpace& space, std::size_t ix,
                                              double r)
{
    const std::size_t n = space.size();
    const double cx = space.coord(static_cast<PointId>(ix));
    std::size_t lo = ix, hi = ix;
    while (lo > 0 && space.apply_snowflake(cx - space.coord(static_cast<PointId>(lo - 1))) < r)
        --lo;
    while (hi + 1 < n &&
           space.apply_snowflake(space.coord(static_cast<PointId>(hi + 1)) - cx) < r)
        ++hi;
    return {lo, hi};
}

struct BallStats {
    double avg_val = 0, avg_osc = 0;
    std::vector<double> med_val, med_osc; // per gamma
};

BallStats ball_stats(const MetricMeasureSpace& space, const std::vector<double>& u,
                     std::size_t ix, std::size_t lo, std::size_t hi,
                     const std::vector<double>& gammas)
{
    BallStats st;
    const double ux = u[ix];
    double W = 0, sv = 0, so = 0;
    std::vector<std::pair<double, double>> pv, po;
    pv.reserve(hi - lo + 1);
    po.reserve(hi - lo + 1);
    for (std::size_t j = lo; j <= hi; ++j) {
        const double m = space.mass(static_cast<PointId>(j));
        W += m;
        sv += m * u[j];
        so += m * std::fabs(u[j] - ux);
        pv.emplace_back(u[j], m);
        po.emplace_back(std::fabs(u[j] - ux), m);
    }
    st.avg_val = sv / W;
    st.avg_osc = so / W;
    for (double g : gammas) {
        auto pv2 = pv;
        auto po2 = po;
        st.med_val.push_back(gamma_median_pairs(pv2, g));
        st.med_osc.push_back(gamma_median_pairs(po2, g));
    }
    return st;
}

PointTrace trace_point(const ResolutionFamily& family, double x,
                       const std::vector<double>& gammas, double r0)
{
    PointTrace tr;
    tr.x_requested = x;
    tr.gammas = gammas;
    tr.min_scale = kInf;
    tr.max_scale = 0;
    for (std::size_t level = 0; level < family.levels(); ++level) {
        const auto& space = family.space(level);
        const auto& u = family.values(level);
        const std::size_t n = space.size();
        // snap to the nearest node
        std::size_t ix = 0;
        double bestd = kInf;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::fabs(space.coord(static_cast<PointId>(j)) - x);
            if (d < bestd) {
                bestd = d;
                ix = j;
            }
        }
        tr.x_snapped.push_back(space.coord(static_cast<PointId>(ix)));
        tr.snap_dist.push_back(bestd);

        const double h = space.min_positive_distance();
        bool any = false;
        for (double r = r0; r >= 4 * h; r /= 2) {
            any = true;
            const auto [lo, hi] = line_ball(space, ix, r);
            const BallStats st = ball_stats(space, u, ix, lo, hi, gammas);
            tr.min_scale = std::min(tr.min_scale, r);
            tr.max_scale = std::max(tr.max_scale, r);
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                TraceRow row;
                row.resolution = family.resolution(level);
                row.scale = r;
                row.gamma = gammas[gi];
                row.median_val = st.med_val[gi];
                row.median_osc = st.med_osc[gi];
                row.avg_val = st.avg_val;
                row.avg_osc = st.avg_osc;
                tr.rows.push_back(row);
            }
        }
        if (!any)
            fail("scale-resolution separation violated: r0 below 4 grid steps at resolution " +
                 std::to_string(n));
    }
    return tr;
}

} // namespace

PointTrace median_trace(const ResolutionFamily& family, double x,
                        const std::vector<double>& gammas, double r0)
{
    if (gammas.empty())
        fail("median_trace: empty gamma list");
    for (double g : gammas)
        if (!(g > 0) || !(g < 1))
            fail("median_trace: gamma outside (0,1)");
    return trace_point(family, x, gammas, r0);
}

PointTrace average_trace(const ResolutionFamily& family, double x, double r0)
{
    return trace_point(family, x, {0.5}, r0);
}

Classification classify_point(const PointTrace& trace, double tol)
{
    if (!(trace.max_scale / trace.min_scale >= 1000.0))
        fail("classify_point: trace spans fewer than 3 scale decades");
    // finest resolution, smallest admissible scale
    std::size_t finest = 0;
    double smallest = kInf;
    for (const auto& row : trace.rows)
        finest = std::max(finest, row.resolution);
    for (const auto& row : trace.rows)
        if (row.resolution == finest)
            smallest = std::min(smallest, row.scale);

    Classification cl;
    bool all_gamma = true;
    for (double g : trace.gammas) {
        bool pass = false;
        for (const auto& row : trace.rows)
            if (row.resolution == finest && row.scale == smallest && row.gamma == g)
                pass = row.median_osc < tol;
        cl.per_gamma.emplace_back(g, pass);
        all_gamma = all_gamma && pass;
    }
    for (const auto& row : trace.rows)
        if (row.resolution == finest && row.scale == smallest)
            cl.avg_pass = row.avg_osc < tol;

    if (cl.avg_pass)
        cl.verdict = Classification::Verdict::lebesgue;
    else if (all_gamma)
        cl.verdict = Classification::Verdict::generalized_lebesgue;
    else
        cl.verdict = Classification::Verdict::neither;
    return cl;
}

namespace {

// Bottom-scale pass rule for the node sweep: below tolerance at scale 2h, or
// decaying toward it (the oscillation of an s-Holder function behaves like
// r^s, which a fixed tolerance at finite h would misclassify).
bool sweep_pass(double osc2, double osc8, double tol)
{
    constexpr double kDecay = 0.70710678118654752; // 4^{-1/4}
    if (osc2 < tol)
        return true;
    return osc8 > 0 && osc2 <= kDecay * osc8;
}

} // namespace

SweepReport exceptional_set_report(const ResolutionFamily& family,
                                   const std::vector<double>& gammas, double tol, double s,
                                   const QuasinormSpec& spec)
{
    if (gammas.empty())
        fail("exceptional_set_report: empty gamma list");
    SweepReport rep;
    rep.tol = tol;
    for (std::size_t level = 0; level < family.levels(); ++level) {
        const auto& space = family.space(level);
        const auto& u = family.values(level);
        const std::size_t n = space.size();
        if (n > (1u << 14))
            fail("exceptional_set_report: resolution above the sweep limit 2^14");
        const double h = space.min_positive_distance();

        SweepLevelReport lv;
        lv.resolution = family.resolution(level);
        lv.sweep_scale = 2 * h;

        std::vector<char> fail_avg(n, 0), fail_med(n, 0);
        parallel_for(n, [&](std::size_t ix) {
            const auto [lo2, hi2] = line_ball(space, ix, 2 * h);
            const auto [lo8, hi8] = line_ball(space, ix, 8 * h);
            const BallStats near = ball_stats(space, u, ix, lo2, hi2, gammas);
            const BallStats far = ball_stats(space, u, ix, lo8, hi8, gammas);
            fail_avg[ix] = !sweep_pass(near.avg_osc, far.avg_osc, tol);
            bool med_ok = true;
            for (std::size_t gi = 0; gi < gammas.size(); ++gi)
                med_ok = med_ok && sweep_pass(near.med_osc[gi], far.med_osc[gi], tol);
            fail_med[ix] = !med_ok;
        });

        for (std::size_t ix = 0; ix < n; ++ix) {
            if (fail_avg[ix]) {
                lv.failures_avg.push_back(static_cast<PointId>(ix));
                lv.failure_mass_avg += space.mass(static_cast<PointId>(ix));
            }
            if (fail_med[ix]) {
                lv.failures_median.push_back(static_cast<PointId>(ix));
                lv.failure_mass_median += space.mass(static_cast<PointId>(ix));
            }
        }

        // capacity of the average-failure set from the standard bump grid
        if (lv.failures_avg.empty()) {
            lv.capacity_of_failures = 0;
        } else {
            std::vector<double> radii;
            for (double d = 2 * h; d <= 0.25; d *= 4)
                radii.push_back(d);
            const CapacityBound cb =
                capacity_upper(space, lv.failures_avg, s, spec, radii);
            lv.capacity_of_failures = cb.value;
        }
        rep.levels.push_back(std::move(lv));
    }
    return rep;
}

double sobolev_poincare_probe(const MetricMeasureSpace& space, std::span<const double> u,
                              std::span<const double> g, double s, double Q)
{
    const std::size_t n = space.size();
    if (u.size() != n || g.size() != n)
        fail("sobolev probe: length mismatch");
    if (!(Q > 0))
        fail("sobolev probe: Q must be positive");
    const double q = Q / (Q + s);

    std::vector<double> worst(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, PointId>> nb;
        space.sorted_neighbors(static_cast<PointId>(i), nb);
        std::vector<double> pm(n + 1, 0.0), pgq(n + 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double m = space.mass(nb[k].second);
            pm[k + 1] = pm[k] + m;
            pgq[k + 1] = pgq[k] + m * std::pow(g[static_cast<std::size_t>(nb[k].second)], q);
        }
        double w = 0;
        std::vector<std::pair<double, double>> scratch;
        for (std::size_t k = 0; k < n; ++k) {
            const bool rung_end = (k + 1 == n) || nb[k + 1].first > nb[k].first;
            if (!rung_end)
                continue;
            // representative radius for this prefix
            double r;
            if (k + 1 == n)
                r = nb[k].first > 0 ? nb[k].first * (1.0 + 0x1p-20) : 1.0;
            else
                r = nb[k].first + (nb[k + 1].first - nb[k].first) / 2;

            // exact inf_c of the weighted L1 deviation: the weighted median
            scratch.clear();
            for (std::size_t t = 0; t <= k; ++t)
                scratch.emplace_back(u[static_cast<std::size_t>(nb[t].second)],
                                     space.mass(nb[t].second));
            const double c = gamma_median_pairs(scratch, 0.5);
            double dev = 0;
            for (std::size_t t = 0; t <= k; ++t)
                dev += space.mass(nb[t].second) *
                       std::fabs(u[static_cast<std::size_t>(nb[t].second)] - c);
            dev /= pm[k + 1];
            if (dev == 0)
                continue;

            // (g^q)-average over B(x, 2r)
            const auto it = std::lower_bound(
                nb.begin(), nb.end(), std::make_pair(2 * r, static_cast<PointId>(-1)));
            const std::size_t cnt = static_cast<std::size_t>(it - nb.begin());
            const double core = std::pow(pgq[cnt] / pm[cnt], 1.0 / q);
            const double denom = std::pow(r, s) * core;
            if (denom > 0)
                w = std::max(w, dev / denom);
        }
        worst[i] = w;
    });
    double w = 0;
    for (double v : worst)
        w = std::max(w, v);
    return w;
}

WeakTypeProbe capacitary_weak_type_probe(const MetricMeasureSpace& space,
                                         std::span<const double> u, double s,
                                         const QuasinormSpec& spec, double gamma,
                                         double lambda, PointId ball_center,
                                         double ball_radius, double R)
{
    if (!(lambda > 0))
        fail("weak-type probe: lambda must be positive");
    const ScaleLadder ladder = build_scale_ladder(space, R);
    const std::vector<double> T = discrete_median_maximal(space, u, gamma, ladder);

    WeakTypeProbe out;
    std::vector<PointId> E;
    for (std::size_t x = 0; x < space.size(); ++x)
        if (space.dist(static_cast<PointId>(x), ball_center) < ball_radius && T[x] > lambda)
            E.push_back(static_cast<PointId>(x));
    out.superlevel_count = E.size();

    std::vector<double> radii;
    for (double d = space.min_positive_distance() * 2; d <= 0.5; d *= 4)
        radii.push_back(d);
    const CapacityBound cb = capacity_upper(space, E, s, spec, radii);
    out.capacity = cb.value;
    const HajlaszNorm hn = hajlasz_norm(space, u, s, spec);
    out.hajlasz_full = hn.full;
    out.ratio = hn.full > 0 ? cb.value * lambda / hn.full : 0.0;
    return out;
}

} // namespace medianscape
