#pragma once

#include "medianscape/hajlasz.hpp"
#include "medianscape/qbfs.hpp"
#include "medianscape/space.hpp"

#include <string>
#include <vector>

namespace medianscape {

/// Closed-form catalog of continuum functions sampled at every resolution.
struct ContinuumFunction {
    enum class Kind { constant, interval_indicator, power_singularity, fat_cantor, holder_ramp };
    Kind kind = Kind::constant;
    double value = 1;          // constant
    double a = 0, b = 0.5;     // indicator of [a, b]
    double x0 = 0.5;           // singularity location
    double alpha = 0.5;        // |x - x0|^{-alpha}
    double cap = 100;          // truncation of the singularity
    double exponent = 1;       // ramp x^s

    double eval(double x) const;
    std::string describe() const;

    static ContinuumFunction constant(double c);
    static ContinuumFunction interval_indicator(double a, double b);
    static ContinuumFunction power_singularity(double x0, double alpha, double cap);
    static ContinuumFunction fat_cantor();
    static ContinuumFunction holder_ramp(double s);
    /// Parses "constant(c)", "indicator(a,b)", "singularity(x0,alpha,M)",
    /// "fat_cantor", "ramp(s)".
    static ContinuumFunction parse(const std::string& text);
};

/// One continuum descriptor sampled on grid1d at strictly increasing
/// resolutions. Spaces and samples are built once and shared.
class ResolutionFamily {
public:
    ResolutionFamily(std::vector<std::size_t> resolutions, ContinuumFunction u);

    std::size_t levels() const { return spaces_.size(); }
    std::size_t resolution(std::size_t level) const { return resolutions_[level]; }
    const MetricMeasureSpace& space(std::size_t level) const { return spaces_[level]; }
    const std::vector<double>& values(std::size_t level) const { return values_[level]; }
    const ContinuumFunction& descriptor() const { return u_; }

private:
    std::vector<std::size_t> resolutions_;
    ContinuumFunction u_;
    std::vector<MetricMeasureSpace> spaces_;
    std::vector<std::vector<double>> values_;
};

struct TraceRow {
    std::size_t resolution = 0;
    double scale = 0;
    double gamma = 0;
    double median_osc = 0; // m^gamma_{|u - u(x)|}(B(x, r))
    double median_val = 0; // m^gamma_u(B(x, r))
    double avg_osc = 0;    // ball average of |u - u(x)|
    double avg_val = 0;    // ball average of u
};

struct PointTrace {
    double x_requested = 0;
    std::vector<double> x_snapped;  // per level
    std::vector<double> snap_dist;  // per level
    std::vector<double> gammas;
    std::vector<TraceRow> rows;
    double min_scale = 0, max_scale = 0;
};

/// Exact medians and averages at each (resolution, scale, gamma) with the
/// dyadic scale grid r_j = r0 2^{-j} kept above 4 grid steps per resolution
/// (the scale-resolution separation).
PointTrace median_trace(const ResolutionFamily& family, double x,
                        const std::vector<double>& gammas, double r0 = 0.25);
PointTrace average_trace(const ResolutionFamily& family, double x, double r0 = 0.25);

struct Classification {
    enum class Verdict { lebesgue, generalized_lebesgue, neither };
    Verdict verdict = Verdict::neither;
    bool avg_pass = false;
    std::vector<std::pair<double, bool>> per_gamma; // (gamma, median-osc pass)
};

/// Tolerance-based verdicts from the finest resolution at its smallest
/// admissible scale; requires the trace to span at least three scale
/// decades. These are empirical labels, not theorems.
Classification classify_point(const PointTrace& trace, double tol);

struct SweepLevelReport {
    std::size_t resolution = 0;
    double sweep_scale = 0;           // 2 * grid step
    double failure_mass_avg = 0;      // Lebesgue (average) diagnostic failures
    double failure_mass_median = 0;   // generalized (median) diagnostic failures
    std::vector<PointId> failures_avg;
    std::vector<PointId> failures_median;
    double capacity_of_failures = 0;  // capacity_upper of the average-failure set
};

struct SweepReport {
    std::vector<SweepLevelReport> levels;
    double tol = 0;
};

/// Sweeps every node of every resolution. A node fails when its oscillation
/// at the bottom scale 2h neither sits below tol nor decays (ratio to the
/// 8h scale at least 4^{-1/4}); the decay clause keeps continuous catalog
/// functions, whose oscillation shrinks like r^s but never reaches a fixed
/// tolerance at finite h, out of the failure set.
SweepReport exceptional_set_report(const ResolutionFamily& family,
                                   const std::vector<double>& gammas, double tol, double s,
                                   const QuasinormSpec& spec);

/// Worst empirical constant in the Sobolev-Poincare inequality
/// inf_c |u - c|_{B(x,r)} <= C r^s ((g^q)_{B(x,2r)})^{1/q}, q = Q/(Q+s),
/// over every point and ladder radius.
double sobolev_poincare_probe(const MetricMeasureSpace& space, std::span<const double> u,
                              std::span<const double> g, double s, double Q);

struct WeakTypeProbe {
    double ratio = 0;          // capacity * lambda / ||u||_{M^{s,X}}
    double capacity = 0;
    double hajlasz_full = 0;
    std::size_t superlevel_count = 0;
};

/// Capacitary weak-type probe for M^{gamma,*}_{R}: both the capacity and the
/// Hajlasz norm are upper bounds, so bounded ratios across instances are a
/// consistency signal, not a verification.
WeakTypeProbe capacitary_weak_type_probe(const MetricMeasureSpace& space,
                                         std::span<const double> u, double s,
                                         const QuasinormSpec& spec, double gamma,
                                         double lambda, PointId ball_center,
                                         double ball_radius, double R = 1.0 / 3.0);

} // namespace medianscape
