#pragma once

#include "medianscape/space.hpp"

#include <span>
#include <utility>
#include <vector>

namespace medianscape {

/// gamma-median of u over the point set A:
///   inf{ a : mu({x in A : u(x) > a}) < gamma * mu(A) }.
/// The infimum is attained at one of the values u takes on A; the strict
/// inequality is applied literally, with no tolerance.
double gamma_median(const MetricMeasureSpace& space, std::span<const double> u,
                    std::span<const PointId> A, double gamma);

/// Same median over explicit (value, mass) pairs; sorts the scratch in place.
double gamma_median_pairs(std::vector<std::pair<double, double>>& pairs, double gamma);

/// Right-continuous nonincreasing step profile of |u| against cumulative
/// mass: value_at(t) = inf{ a >= 0 : mu({|u| > a}) < t } for t in (0, mu(A)].
/// value_at(gamma * mu(A)) recovers the gamma-median of |u|.
struct StepRearrangement {
    std::vector<double> levels;      // strictly decreasing
    std::vector<double> breakpoints; // increasing cumulative masses; back() == mu(A)
    double total_mass = 0;

    double value_at(double t) const;
};

StepRearrangement decreasing_rearrangement(const MetricMeasureSpace& space,
                                           std::span<const double> u,
                                           std::span<const PointId> A);

/// Both routes of the rearrangement identity over a ball: the mass-weighted
/// mean of |u|^p, and the exact piecewise integral of
/// gamma -> m^gamma_{|u|}(B)^p over (0,1). The two agree up to rounding.
std::pair<double, double> pth_mean_via_medians(const MetricMeasureSpace& space,
                                               std::span<const double> u,
                                               std::span<const PointId> ball, double p);

} // namespace medianscape
