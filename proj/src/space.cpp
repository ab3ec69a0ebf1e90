#include "medianscape/space.hpp"

#include "medianscape/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace medianscape {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::invalid_argument("space: " + msg);
}

void check_masses(const std::vector<double>& masses)
{
    if (masses.empty())
        fail("empty point set");
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (!(masses[i] > 0) || !std::isfinite(masses[i])) {
            std::ostringstream os;
            os << "non-positive mass at index " << i;
            fail(os.str());
        }
    }
}

} // namespace

SampledFunction make_function(const MetricMeasureSpace& space, std::vector<double> values)
{
    if (values.size() != space.size())
        fail("function length does not match the space");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) {
            std::ostringstream os;
            os << "non-finite value at index " << i;
            fail(os.str());
        }
    return SampledFunction{&space, std::move(values)};
}

void MetricMeasureSpace::finalize()
{
    check_masses(masses_);
    total_mass_ = 0;
    for (double m : masses_)
        total_mass_ += m;
    equal_mass_ = true;
    for (double m : masses_)
        if (m != masses_[0]) {
            equal_mass_ = false;
            break;
        }

    const std::size_t n = size();
    is_line_ = table_.empty() && dim_ == 1 && n >= 1;
    if (is_line_)
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(coords_[i] < coords_[i + 1])) {
                is_line_ = false;
                break;
            }

    min_pos_dist_ = kInf;
    max_dist_ = 0;
    near_uniform_ = false;
    if (is_line_) {
        double gmin = kInf, gmax = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double g = coords_[i + 1] - coords_[i];
            gmin = std::min(gmin, g);
            gmax = std::max(gmax, g);
        }
        if (n > 1) {
            min_pos_dist_ = apply_snowflake(gmin);
            max_dist_ = apply_snowflake(coords_[n - 1] - coords_[0]);
            near_uniform_ = gmax - gmin < gmin / (2.0 * static_cast<double>(n));
        } else {
            near_uniform_ = true;
        }
    } else if (!table_.empty()) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = table_[i * n + j];
                min_pos_dist_ = std::min(min_pos_dist_, d);
                max_dist_ = std::max(max_dist_, d);
            }
    } else {
        // Coordinate form: exact pair scan up to 8192 points, else a grid
        // lower bound for the minimum and the bounding-box diagonal upper
        // bound for the maximum (only used to size scale ladders).
        if (n <= 8192) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double d = dist(static_cast<PointId>(i), static_cast<PointId>(j));
                    min_pos_dist_ = std::min(min_pos_dist_, d);
                    max_dist_ = std::max(max_dist_, d);
                }
        } else {
            double lo = kInf, diag = 0;
            for (int d = 0; d < dim_; ++d) {
                double cmin = kInf, cmax = -kInf;
                for (std::size_t i = 0; i < n; ++i) {
                    cmin = std::min(cmin, coords_[i * dim_ + d]);
                    cmax = std::max(cmax, coords_[i * dim_ + d]);
                }
                diag += (cmax - cmin) * (cmax - cmin);
            }
            std::mt19937 rng(12345);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (int t = 0; t < 4096; ++t) {
                const PointId i = static_cast<PointId>(pick(rng));
                const PointId j = static_cast<PointId>(pick(rng));
                if (i == j)
                    continue;
                lo = std::min(lo, dist(i, j));
            }
            min_pos_dist_ = lo;
            max_dist_ = apply_snowflake(std::sqrt(diag));
        }
    }
    if (n == 1)
        min_pos_dist_ = 1.0;
}

void MetricMeasureSpace::audit_table_metric()
{
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        if (table_[i * n + i] != 0)
            fail("nonzero diagonal at index " + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = table_[i * n + j];
            if (dij != table_[j * n + i]) {
                std::ostringstream os;
                os << "non-symmetric table at (" << i << "," << j << ")";
                fail(os.str());
            }
            if (!(dij > 0) || !std::isfinite(dij)) {
                std::ostringstream os;
                os << "non-positive distance at (" << i << "," << j << ")";
                fail(os.str());
            }
        }
    }

    auto check_triple = [&](std::size_t a, std::size_t b, std::size_t c) {
        const double ab = table_[a * n + b];
        const double bc = table_[b * n + c];
        const double ac = table_[a * n + c];
        if (ac > ab + bc) {
            std::ostringstream os;
            os << "triangle inequality violated by triple (" << a << "," << b << "," << c
               << "): d(" << a << "," << c << ")=" << ac << " > " << ab + bc;
            fail(os.str());
        }
    };

    if (n <= 512) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    if (a != b && b != c && a != c)
                        check_triple(a, b, c);
        audit_.mode = MetricAudit::Mode::exhaustive;
        audit_.triples_checked = n * (n - 1) * (n - 2);
        audit_.fraction = 1.0;
    } else {
        const std::size_t budget = 16 * n * n;
        std::mt19937_64 rng(0x6d65646961ULL); // fixed seed: audit is deterministic
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t t = 0; t < budget; ++t) {
            const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
            if (a != b && b != c && a != c)
                check_triple(a, b, c);
        }
        audit_.mode = MetricAudit::Mode::sampled;
        audit_.triples_checked = budget;
        audit_.fraction =
            static_cast<double>(budget) / (static_cast<double>(n) * (n - 1) * (n - 2));
    }
}

MetricMeasureSpace MetricMeasureSpace::from_coords(std::vector<double> coords, int dim,
                                                   std::vector<double> masses,
                                                   double snowflake)
{
    if (dim < 1)
        fail("dimension must be at least 1");
    if (!(snowflake > 0) || snowflake > 1)
        fail("snowflake exponent must lie in (0, 1]");
    if (coords.size() != masses.size() * static_cast<std::size_t>(dim))
        fail("coordinate row count does not match mass count");
    for (double c : coords)
        if (!std::isfinite(c))
            fail("non-finite coordinate");
    MetricMeasureSpace s;
    s.coords_ = std::move(coords);
    s.dim_ = dim;
    s.snowflake_ = snowflake;
    s.masses_ = std::move(masses);
    // Snowflaked Euclidean distance is a metric for exponents in (0,1]; no
    // numeric triangle audit is needed.
    s.audit_.mode = MetricAudit::Mode::structural;
    // Distinct points required: d(x,y) > 0 for x != y.
    s.finalize();
    if (s.size() > 1) {
        if (s.is_line_) {
            // strict ascent already guarantees distinctness
        } else if (s.size() <= 8192) {
            if (!(s.min_pos_dist_ > 0))
                fail("duplicate points (zero distance between distinct ids)");
        }
    }
    return s;
}

MetricMeasureSpace MetricMeasureSpace::from_table(std::vector<double> table,
                                                  std::vector<double> masses)
{
    const std::size_t n = masses.size();
    if (table.size() != n * n)
        fail("distance table is not n-by-n");
    MetricMeasureSpace s;
    s.table_ = std::move(table);
    s.masses_ = std::move(masses);
    check_masses(s.masses_);
    s.audit_table_metric();
    s.finalize();
    return s;
}

void MetricMeasureSpace::sorted_neighbors(PointId x,
                                          std::vector<std::pair<double, PointId>>& out) const
{
    const std::size_t n = size();
    out.clear();
    out.reserve(n);
    if (is_line_) {
        // Two-pointer merge outward from x; |coordinate gap| is monotone
        // under the snowflake map.
        PointId l = x, r = x;
        out.emplace_back(0.0, x);
        const double cx = coords_[static_cast<std::size_t>(x)];
        while (out.size() < n) {
            const double dl = l > 0 ? cx - coords_[static_cast<std::size_t>(l - 1)] : kInf;
            const double dr = r + 1 < static_cast<PointId>(n)
                                  ? coords_[static_cast<std::size_t>(r + 1)] - cx
                                  : kInf;
            if (dl < dr || (dl == dr && l - 1 < r + 1)) {
                --l;
                out.emplace_back(apply_snowflake(dl), l);
            } else {
                ++r;
                out.emplace_back(apply_snowflake(dr), r);
            }
        }
        return;
    }
    for (std::size_t j = 0; j < n; ++j)
        out.emplace_back(dist(x, static_cast<PointId>(j)), static_cast<PointId>(j));
    std::sort(out.begin(), out.end());
}

std::vector<PointId> MetricMeasureSpace::ball_members(PointId x, double r) const
{
    std::vector<PointId> out;
    const std::size_t n = size();
    for (std::size_t j = 0; j < n; ++j)
        if (dist(x, static_cast<PointId>(j)) < r)
            out.push_back(static_cast<PointId>(j));
    return out;
}

double MetricMeasureSpace::ball_mass(PointId x, double r) const
{
    double m = 0;
    const std::size_t n = size();
    for (std::size_t j = 0; j < n; ++j)
        if (dist(x, static_cast<PointId>(j)) < r)
            m += masses_[j];
    return m;
}

DistanceLadder build_distance_ladder(const MetricMeasureSpace& space, PointId x, double R)
{
    if (!(R > 0))
        fail("radius bound R must be positive");
    DistanceLadder lad;
    std::vector<std::pair<double, PointId>> nb;
    space.sorted_neighbors(x, nb);
    lad.order.reserve(nb.size());
    lad.dist.reserve(nb.size());
    for (auto& [d, id] : nb) {
        lad.order.push_back(id);
        lad.dist.push_back(d);
    }
    const std::size_t n = lad.order.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double dk = lad.dist[k];
        if (!(dk < R))
            break;
        const bool last_of_group = (k + 1 == n) || lad.dist[k + 1] > dk;
        if (!last_of_group)
            continue;
        // Representative radius realizing exactly this prefix: the midpoint
        // of the gap to the next distinct distance, capped below R; the
        // final prefix uses a 2^-20 relative bump.
        double rep;
        if (k + 1 == n) {
            rep = dk > 0 ? dk * (1.0 + 0x1p-20) : 1.0;
            if (!(rep < R))
                rep = dk + (R - dk) / 2;
        } else {
            const double next = std::min(lad.dist[k + 1], R);
            rep = dk + (next - dk) / 2;
        }
        lad.rung_end.push_back(static_cast<std::int64_t>(k + 1));
        lad.radius.push_back(rep);
    }
    return lad;
}

std::vector<Ball> radius_ladder(const MetricMeasureSpace& space, PointId x, double R)
{
    DistanceLadder lad = build_distance_ladder(space, x, R);
    std::vector<Ball> out;
    out.reserve(lad.rung_end.size());
    for (std::size_t k = 0; k < lad.rung_end.size(); ++k) {
        Ball b;
        b.center = x;
        b.radius = lad.radius[k];
        b.members.assign(lad.order.begin(), lad.order.begin() + lad.rung_end[k]);
        std::sort(b.members.begin(), b.members.end());
        out.push_back(std::move(b));
    }
    return out;
}

StructureReport estimate_structure(const MetricMeasureSpace& space)
{
    const std::size_t n = space.size();
    StructureReport rep;
    rep.exhaustive = n <= 512;

    // Deterministic audit set: every point for small spaces, an even stride
    // of 512 points above; per point the rung radii, strided to at most 64.
    std::vector<PointId> centers;
    if (rep.exhaustive)
        for (std::size_t i = 0; i < n; ++i)
            centers.push_back(static_cast<PointId>(i));
    else {
        const std::size_t stride = (n + 511) / 512;
        for (std::size_t i = 0; i < n; i += stride)
            centers.push_back(static_cast<PointId>(i));
    }

    struct Sample {
        double log_ratio, log_rr;
        PointId x, y;
        double r, R;
    };
    std::vector<double> cds(centers.size(), 1.0);
    std::vector<std::vector<Sample>> samples(centers.size());
    std::vector<std::size_t> pair_counts(centers.size(), 0);
    // pooled slope accumulators: differences along one y-ladder cancel the
    // constant offsets (boundary clipping, mass normalization)
    std::vector<double> slope_num(centers.size(), 0.0), slope_den(centers.size(), 0.0);
    const double r_floor = 2 * space.min_positive_distance();
    // keep slope differences below saturation (balls covering most of the
    // space grow slower than the power law)
    const double r_ceil = space.max_distance() / 4;

    parallel_for(centers.size(), [&](std::size_t ci) {
        const PointId x = centers[ci];
        DistanceLadder lx = build_distance_ladder(space, x);
        // prefix masses along the distance order
        std::vector<double> pm(lx.order.size() + 1, 0.0);
        for (std::size_t k = 0; k < lx.order.size(); ++k)
            pm[k + 1] = pm[k] + space.mass(lx.order[k]);
        auto mass_below = [&](double r) {
            // mass of the open ball {d(.,x) < r}
            const auto it = std::lower_bound(lx.dist.begin(), lx.dist.end(), r);
            return pm[static_cast<std::size_t>(it - lx.dist.begin())];
        };

        std::size_t nr = lx.radius.size();
        std::size_t rstride = rep.exhaustive ? 1 : std::max<std::size_t>(1, nr / 64);
        double cd = 1.0;
        for (std::size_t k = 0; k < nr; k += rstride) {
            const double r = lx.radius[k];
            const double m1 = pm[lx.rung_end[k]];
            const double m2 = mass_below(2 * r);
            cd = std::max(cd, m2 / m1);
            ++pair_counts[ci];
        }
        cds[ci] = cd;

        // (Q) condition triples: y in B(x, Rr), r a rung radius of y with
        // r <= Rr. Exhaustive for n <= 64, strided above.
        const bool full = n <= 64;
        const std::size_t ystride = full ? 1 : std::max<std::size_t>(1, lx.order.size() / 8);
        const std::size_t kstride = full ? 1 : std::max<std::size_t>(1, nr / 8);
        for (std::size_t k = 0; k < nr; k += kstride) {
            const double Rr = lx.radius[k];
            const double mR = pm[lx.rung_end[k]];
            for (std::size_t yi = 0; yi < static_cast<std::size_t>(lx.rung_end[k]);
                 yi += ystride) {
                const PointId y = lx.order[yi];
                DistanceLadder ly = build_distance_ladder(space, y, Rr);
                std::vector<double> pmy(ly.order.size() + 1, 0.0);
                for (std::size_t t = 0; t < ly.order.size(); ++t)
                    pmy[t + 1] = pmy[t] + space.mass(ly.order[t]);
                const std::size_t nry = ly.radius.size();
                const std::size_t tstride = full ? 1 : std::max<std::size_t>(1, nry / 8);
                double prev_lr = 0, prev_lm = 0;
                bool have_prev = false;
                for (std::size_t t = 0; t < nry; t += tstride) {
                    const double r = std::min(ly.radius[t], Rr);
                    if (!(r > 0) || r > Rr)
                        continue;
                    const double my = pmy[ly.rung_end[t]];
                    Sample s;
                    s.log_ratio = std::log(my / mR);
                    s.log_rr = std::log(r / Rr);
                    s.x = x;
                    s.y = y;
                    s.r = r;
                    s.R = Rr;
                    samples[ci].push_back(s);
                    if (r >= r_floor && r <= std::min(Rr / 2, r_ceil)) {
                        if (have_prev) {
                            slope_num[ci] += std::log(my) - prev_lm;
                            slope_den[ci] += std::log(r) - prev_lr;
                        }
                        prev_lr = std::log(r);
                        prev_lm = std::log(my);
                        have_prev = true;
                    }
                }
            }
        }
    });

    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        rep.c_d = std::max(rep.c_d, cds[ci]);
        rep.pairs_audited += pair_counts[ci];
    }

    std::vector<Sample> all;
    for (auto& v : samples)
        all.insert(all.end(), v.begin(), v.end());
    rep.triples_audited = all.size();

    // Pooled log-log slope from in-regime differences along each y-ladder,
    // then shrink c_Q so the bound holds on every audited triple. Falls back
    // to a plain regression when the scaling window is empty (tiny spaces).
    double num = 0, den = 0;
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        num += slope_num[ci];
        den += slope_den[ci];
    }
    if (den > 1e-9) {
        rep.Q = std::max(0.0, num / den);
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t m = 0;
        for (const auto& s : all) {
            if (s.log_rr >= 0)
                continue;
            sx += s.log_rr;
            sy += s.log_ratio;
            sxx += s.log_rr * s.log_rr;
            sxy += s.log_rr * s.log_ratio;
            ++m;
        }
        rep.Q = (m >= 2 && sxx * m - sx * sx > 1e-12)
                    ? std::max(0.0, (m * sxy - sx * sy) / (m * sxx - sx * sx))
                    : 0.0;
    }
    double log_cq = 0.0; // c_Q <= 1 always (triple with r == R, y == x gives ratio 1)
    for (const auto& s : all)
        log_cq = std::min(log_cq, s.log_ratio - rep.Q * s.log_rr);
    rep.c_Q = std::exp(log_cq);

    // Keep the tightest witnesses for the report.
    std::sort(all.begin(), all.end(), [&](const Sample& a, const Sample& b) {
        return a.log_ratio - rep.Q * a.log_rr < b.log_ratio - rep.Q * b.log_rr;
    });
    for (std::size_t i = 0; i < std::min<std::size_t>(8, all.size()); ++i) {
        StructureReport::Witness w;
        w.x = all[i].x;
        w.y = all[i].y;
        w.r = all[i].r;
        w.R = all[i].R;
        w.slack = all[i].log_ratio - rep.Q * all[i].log_rr - log_cq;
        rep.worst.push_back(w);
    }
    return rep;
}

MetricMeasureSpace generate_grid1d(std::size_t n)
{
    if (n == 0)
        fail("grid1d needs at least one node");
    std::vector<double> coords(n), masses(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        coords[i] = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    return MetricMeasureSpace::from_coords(std::move(coords), 1, std::move(masses));
}

MetricMeasureSpace generate_grid2d(std::size_t side)
{
    if (side == 0)
        fail("grid2d needs at least one node per side");
    const std::size_t n = side * side;
    std::vector<double> coords(2 * n), masses(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            const std::size_t k = i * side + j;
            coords[2 * k] = side == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(side - 1);
            coords[2 * k + 1] =
                side == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(side - 1);
        }
    return MetricMeasureSpace::from_coords(std::move(coords), 2, std::move(masses));
}

MetricMeasureSpace generate_weighted_grid(std::size_t n, double weight_exponent)
{
    if (n == 0)
        fail("weighted_grid needs at least one node");
    // Midpoint nodes keep every quadrature weight strictly positive.
    std::vector<double> coords(n), masses(n);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        masses[i] = std::pow(coords[i], weight_exponent);
        total += masses[i];
    }
    for (auto& w : masses)
        w /= total;
    return MetricMeasureSpace::from_coords(std::move(coords), 1, std::move(masses));
}

MetricMeasureSpace generate_snowflake(double a, const MetricMeasureSpace& base)
{
    if (base.has_table()) {
        const std::size_t n = base.size();
        std::vector<double> table(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    table[i * n + j] = std::pow(
                        base.dist(static_cast<PointId>(i), static_cast<PointId>(j)), a);
        std::vector<double> masses(base.masses().begin(), base.masses().end());
        return MetricMeasureSpace::from_table(std::move(table), std::move(masses));
    }
    std::vector<double> coords;
    coords.reserve(base.size() * base.dim());
    for (std::size_t i = 0; i < base.size(); ++i)
        for (int d = 0; d < base.dim(); ++d)
            coords.push_back(base.coord(static_cast<PointId>(i), d));
    std::vector<double> masses(base.masses().begin(), base.masses().end());
    const double combined = base.snowflake_exponent() * a;
    return MetricMeasureSpace::from_coords(std::move(coords), base.dim(), std::move(masses),
                                           combined);
}

} // namespace medianscape
