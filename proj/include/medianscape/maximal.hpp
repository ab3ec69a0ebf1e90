#pragma once

#include "medianscape/space.hpp"

#include <span>
#include <vector>

namespace medianscape {

/// Restricted Hardy-Littlewood maximal function: at each point the exact
/// maximum of mass-weighted averages of |u| over the distinct open balls of
/// radius < R. Parallel over points; a two-pointer walk on line spaces, a
/// distance sort elsewhere.
std::vector<double> hl_maximal(const MetricMeasureSpace& space, std::span<const double> u,
                               double R = kInf);

/// Restricted median maximal function: the exact maximum of gamma-medians
/// of |u| over the same ball ladder. Line spaces with equal masses and
/// distinct |u| values run an amortized O(1)-per-point median finger; the
/// general path keeps a Fenwick tree over value ranks per center.
std::vector<double> median_maximal(const MetricMeasureSpace& space, std::span<const double> u,
                                   double gamma, double R = kInf);

} // namespace medianscape
