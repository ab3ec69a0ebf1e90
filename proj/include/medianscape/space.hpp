#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace medianscape {

using PointId = std::int32_t;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Finite metric measure space: points with pairwise distances and strictly
/// positive masses. The metric is given either as an explicit symmetric table
/// or as a coordinate set with (snowflaked) Euclidean distance evaluated on
/// demand. Immutable after construction; all queries are pure.
class MetricMeasureSpace {
public:
    struct MetricAudit {
        enum class Mode { structural, exhaustive, sampled };
        Mode mode = Mode::structural;
        std::size_t triples_checked = 0;
        double fraction = 1.0; // checked triples / all triples
    };

    std::size_t size() const { return masses_.size(); }
    int dim() const { return dim_; }
    bool has_table() const { return !table_.empty(); }
    double snowflake_exponent() const { return snowflake_; }

    double mass(PointId i) const { return masses_[static_cast<std::size_t>(i)]; }
    std::span<const double> masses() const { return masses_; }
    double total_mass() const { return total_mass_; }
    /// True when all masses are bit-identical; ball masses are then exact
    /// multiples of unit_mass().
    bool equal_mass() const { return equal_mass_; }
    double unit_mass() const { return masses_[0]; }

    double coord(PointId i, int d = 0) const
    {
        return coords_[static_cast<std::size_t>(i) * dim_ + d];
    }

    double dist(PointId i, PointId j) const
    {
        if (!table_.empty())
            return table_[static_cast<std::size_t>(i) * size() + j];
        double s = 0;
        for (int d = 0; d < dim_; ++d) {
            const double t = coord(i, d) - coord(j, d);
            s += t * t;
        }
        return apply_snowflake(std::sqrt(s));
    }

    double apply_snowflake(double euclid) const
    {
        if (snowflake_ == 1.0)
            return euclid;
        if (snowflake_ == 0.5)
            return std::sqrt(euclid);
        return std::pow(euclid, snowflake_);
    }

    /// Coordinate space with dim == 1 and strictly increasing coordinates.
    /// Balls are then index intervals; the fast maximal-operator paths key
    /// off this.
    bool is_line() const { return is_line_; }

    /// Line with gap spread below gmin / 2n: around any center the k-th
    /// neighbors on both sides enter the distance order before anything of
    /// step k+1, so balls are the windows [i-k, i+k-1], [i-k+1, i+k],
    /// [i-k, i+k] and their boundary clips.
    bool near_uniform() const { return near_uniform_; }

    double min_positive_distance() const { return min_pos_dist_; }
    double max_distance() const { return max_dist_; }

    const MetricAudit& metric_audit() const { return audit_; }

    /// All points sorted by distance from x, ties by id. O(n log n), or an
    /// O(n) two-pointer merge on line spaces.
    void sorted_neighbors(PointId x, std::vector<std::pair<double, PointId>>& out) const;

    /// Members of the open ball B(x, r) = {y : d(y,x) < r}.
    std::vector<PointId> ball_members(PointId x, double r) const;
    double ball_mass(PointId x, double r) const;

    static MetricMeasureSpace from_coords(std::vector<double> coords, int dim,
                                          std::vector<double> masses,
                                          double snowflake = 1.0);
    static MetricMeasureSpace from_table(std::vector<double> table,
                                         std::vector<double> masses);

private:
    MetricMeasureSpace() = default;
    void finalize();
    void audit_table_metric();

    std::vector<double> coords_; // row-major [n * dim], empty for table form
    int dim_ = 0;
    double snowflake_ = 1.0;
    std::vector<double> table_; // [n * n], empty for coordinate form
    std::vector<double> masses_;
    double total_mass_ = 0;
    bool equal_mass_ = false;
    bool is_line_ = false;
    bool near_uniform_ = false;
    double min_pos_dist_ = 0;
    double max_dist_ = 0;
    MetricAudit audit_;
};

/// A real value per point; the artifact's stand-in for u in L^0. Values are
/// required finite on construction.
struct SampledFunction {
    const MetricMeasureSpace* space = nullptr;
    std::vector<double> values;

    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

SampledFunction make_function(const MetricMeasureSpace& space, std::vector<double> values);

struct Ball {
    PointId center = 0;
    double radius = 0;
    std::vector<PointId> members;
};

/// The distinct open balls centered at one point, as prefixes of the
/// distance-sorted neighbor list. rung k covers order[0 .. rung_end[k]) and
/// radius[k] is a representative radius realizing exactly that member set
/// (midpoint of the distance gap, capped below R).
struct DistanceLadder {
    std::vector<PointId> order;
    std::vector<double> dist;          // ascending, dist[0] == 0 (the center)
    std::vector<std::int64_t> rung_end; // exclusive prefix length per rung
    std::vector<double> radius;        // representative radius per rung
};

DistanceLadder build_distance_ladder(const MetricMeasureSpace& space, PointId x,
                                     double R = kInf);

/// Exact enumeration of the distinct nonempty open balls B(x, r), r < R,
/// sorted by member count (strictly increasing).
std::vector<Ball> radius_ladder(const MetricMeasureSpace& space, PointId x,
                                double R = kInf);

/// Empirical structural constants: doubling constant and lower mass bound
/// exponent. Audited exhaustively for n <= 512, on a deterministic sample
/// above.
struct StructureReport {
    double c_d = 1.0;   // max over audited (x, r) of mu(B(x,2r)) / mu(B(x,r))
    double Q = 0.0;     // lower-mass exponent (least-squares slope, clamped >= 0)
    double c_Q = 1.0;   // constant adjusted so the bound holds on every audited triple
    bool exhaustive = true;
    std::size_t pairs_audited = 0;
    std::size_t triples_audited = 0;
    struct Witness {
        PointId x = 0, y = 0;
        double r = 0, R = 0;
        double slack = 0; // log(ratio) - (log c_Q + Q log(r/R))
    };
    std::vector<Witness> worst; // tightest triples for the (Q) condition
};

StructureReport estimate_structure(const MetricMeasureSpace& space);

/// Deterministic space generators. grid1d(n): n nodes on [0,1] with equal
/// masses 1/n. grid2d(m): m x m nodes on [0,1]^2, masses 1/m^2.
/// weighted_grid(n, p): midpoint nodes with masses proportional to x^p,
/// normalized. snowflake(a, base): base space with d replaced by d^a.
MetricMeasureSpace generate_grid1d(std::size_t n);
MetricMeasureSpace generate_grid2d(std::size_t side);
MetricMeasureSpace generate_weighted_grid(std::size_t n, double weight_exponent = 1.0);
MetricMeasureSpace generate_snowflake(double a, const MetricMeasureSpace& base);

} // namespace medianscape
