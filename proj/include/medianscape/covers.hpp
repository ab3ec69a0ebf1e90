#pragma once

#include "medianscape/space.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace medianscape {

/// Thrown when a constructed object fails its own invariant verification
/// (distinct from bad input). The CLI maps this to exit code 3.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Partition-of-unity cover at one scale: a greedy maximal r/2-separated net
/// (ascending point-id order), balls B_i = B(x_i, r), and weights
/// phi_i = psi_i / sum psi with the tent profile
/// psi_i(x) = clamp(2 - d(x, x_i)/r, 0, 1), which is identically 1 on B_i
/// and vanishes outside 2B_i. All four partition-lemma properties are
/// verified before the cover is returned.
struct CoverAtScale {
    double r = 0;
    std::vector<PointId> centers;
    std::vector<std::vector<PointId>> ball;     // members of B_i
    std::vector<std::vector<PointId>> support;  // members of {psi_i > 0} (inside 2B_i)
    std::vector<std::vector<double>> phi;       // phi_i over support, aligned
    int overlap_bound = 0;                       // N: max of sum chi_{2B_i}
    double kappa = 0;                            // measured max Lipschitz quotient * r
    double lipschitz_fraction = 1;               // audited fraction of quotient pairs
    double partition_defect = 0;                 // max |sum_i phi_i(x) - 1|
    std::size_t space_size = 0;
};

CoverAtScale build_cover(const MetricMeasureSpace& space, double r);

/// Finite realization of the rational sup over scales in (0, R): the
/// geometric ladder r_k = R 2^{-k}, k = 1..K, descending to half the
/// minimal positive distance (below which all balls are singletons).
struct ScaleLadder {
    double R = 0;
    std::vector<double> scales; // strictly decreasing, within (0, R)
};

ScaleLadder build_scale_ladder(const MetricMeasureSpace& space, double R);

std::vector<double> discrete_convolution(const MetricMeasureSpace& space,
                                         std::span<const double> u, const CoverAtScale& cover);

std::vector<double> discrete_median_convolution(const MetricMeasureSpace& space,
                                                std::span<const double> u, double gamma,
                                                const CoverAtScale& cover);

/// Discrete (median) maximal functions: the pointwise max over the ladder's
/// scales of the discrete convolutions of |u|.
std::vector<double> discrete_maximal(const MetricMeasureSpace& space,
                                     std::span<const double> u, const ScaleLadder& ladder);

std::vector<double> discrete_median_maximal(const MetricMeasureSpace& space,
                                            std::span<const double> u, double gamma,
                                            const ScaleLadder& ladder);

/// Variants over prebuilt covers (one per ladder scale, same order).
std::vector<double> discrete_maximal(const MetricMeasureSpace& space,
                                     std::span<const double> u,
                                     const std::vector<CoverAtScale>& covers);
std::vector<double> discrete_median_maximal(const MetricMeasureSpace& space,
                                            std::span<const double> u, double gamma,
                                            const std::vector<CoverAtScale>& covers);

/// Gradient witness search for the discrete median maximal function: the
/// smallest C = c_d^k, k = 0..8, making C * M^{gamma/C}_{3R} g a feasible
/// s-gradient of M^{gamma,*}_R u. Requires 0 < gamma <= 1/2 and a feasible
/// input gradient.
struct WitnessResult {
    std::vector<double> candidate;
    double constant = 1;   // the witness constant C
    int exponent = 0;      // C = c_d^exponent
    double defect = 0;     // residual defect of the accepted candidate
};

WitnessResult median_maximal_gradient_witness(const MetricMeasureSpace& space,
                                              std::span<const double> u,
                                              std::span<const double> g, double gamma,
                                              double R, double s, double c_d);

/// Same search for the discrete maximal function with candidates
/// C * (M_{6R} g^q)^{1/q}, q = Q/(Q+s).
WitnessResult maximal_gradient_witness(const MetricMeasureSpace& space,
                                       std::span<const double> u, std::span<const double> g,
                                       double R, double s, double Q, double c_d);

} // namespace medianscape
