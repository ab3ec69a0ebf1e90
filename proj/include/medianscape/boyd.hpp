#pragma once

#include "medianscape/qbfs.hpp"
#include "medianscape/space.hpp"

#include <string>
#include <vector>

namespace medianscape {

/// Candidate families for the Phi_X estimator. The sup over all f with
/// ||f||_X <= 1 is uncomputable; each family yields an explicit finite max,
/// so every estimate is a LOWER bound of Phi_X(gamma). Indicators are
/// first-class: M^gamma of an indicator is again an indicator, which is the
/// extremal mechanism behind the weak-type bound.
struct CandidateFamily {
    enum class Kind { ball_indicators, union_indicators, rearranged_profiles, seeded_random };
    Kind kind = Kind::ball_indicators;
    std::size_t count = 4;    // union pieces or random draws
    std::uint64_t seed = 1;

    static CandidateFamily ball_indicators();
    static CandidateFamily union_indicators(std::size_t k);
    static CandidateFamily rearranged_profiles();
    static CandidateFamily seeded_random(std::size_t m, std::uint64_t seed = 1);
    std::string describe() const;
};

/// Lower-bound estimate of Phi_X(gamma) = sup ||M^gamma f|| / ||f|| over the
/// finite candidate family.
double phi_x(const QuasinormSpec& spec, const MetricMeasureSpace& space, double gamma,
             const CandidateFamily& family);

/// One pass across a gamma grid, reusing per-candidate work (for indicator
/// families M^gamma f = chi_{M chi_E >= gamma}, so one Hardy-Littlewood pass
/// serves every gamma).
std::vector<double> phi_x_grid(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                               const std::vector<double>& gammas,
                               const CandidateFamily& family);

struct BoydEstimate {
    std::vector<double> gammas;   // decreasing
    std::vector<double> phi_hat;  // per-gamma lower bounds, >= 1
    double alpha_hat = 0;         // regression slope of log phi vs log(1/gamma)
    double residual = 0;          // rms residual of the regression
    double ceiling = 0;           // analytic bound when available (else +inf)
    std::string family;
};

/// Empirical generalized upper Boyd index: regression over the smallest-gamma
/// half of the grid. The grid must have at least 4 points, span at least two
/// decades, and stay above the space's minimal ball mass fraction.
BoydEstimate boyd_index(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                        const std::vector<double>& gamma_grid, const CandidateFamily& family);

} // namespace medianscape
