#include "medianscape/medians.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace medianscape {

double gamma_median_pairs(std::vector<std::pair<double, double>>& pairs, double gamma)
{
    if (pairs.empty())
        throw std::invalid_argument("gamma_median: empty set");
    if (!(gamma > 0) || !(gamma < 1))
        throw std::invalid_argument("gamma_median: gamma must lie in (0,1)");

    double total = 0;
    for (const auto& [v, m] : pairs)
        total += m;

    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    // Walk distinct values downward; above(v) = mu({u > v}) grows as v falls.
    // The median is the smallest value still satisfying above(v) < gamma*mu(A).
    const double threshold = gamma * total;
    double ans = pairs.front().first;
    double above = 0;
    std::size_t i = 0;
    while (i < pairs.size()) {
        const double v = pairs[i].first;
        double group = 0;
        while (i < pairs.size() && pairs[i].first == v) {
            group += pairs[i].second;
            ++i;
        }
        if (above < threshold)
            ans = v;
        else
            break;
        above += group;
    }
    return ans;
}

double gamma_median(const MetricMeasureSpace& space, std::span<const double> u,
                    std::span<const PointId> A, double gamma)
{
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(A.size());
    for (PointId i : A)
        pairs.emplace_back(u[static_cast<std::size_t>(i)], space.mass(i));
    return gamma_median_pairs(pairs, gamma);
}

double StepRearrangement::value_at(double t) const
{
    if (!(t > 0) || t > total_mass)
        throw std::invalid_argument("rearrangement: t outside (0, mu(A)]");
    // smallest breakpoint >= t selects the level
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
    return levels[static_cast<std::size_t>(it - breakpoints.begin())];
}

StepRearrangement decreasing_rearrangement(const MetricMeasureSpace& space,
                                           std::span<const double> u,
                                           std::span<const PointId> A)
{
    if (A.empty())
        throw std::invalid_argument("rearrangement: empty set");
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(A.size());
    for (PointId i : A)
        pairs.emplace_back(std::fabs(u[static_cast<std::size_t>(i)]), space.mass(i));
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    StepRearrangement r;
    double cum = 0;
    std::size_t i = 0;
    while (i < pairs.size()) {
        const double v = pairs[i].first;
        double group = 0;
        while (i < pairs.size() && pairs[i].first == v) {
            group += pairs[i].second;
            ++i;
        }
        cum += group;
        r.levels.push_back(v);
        r.breakpoints.push_back(cum);
    }
    r.total_mass = cum;
    return r;
}

std::pair<double, double> pth_mean_via_medians(const MetricMeasureSpace& space,
                                               std::span<const double> u,
                                               std::span<const PointId> ball, double p)
{
    if (ball.empty())
        throw std::invalid_argument("pth_mean_via_medians: empty ball");
    if (!(p > 0))
        throw std::invalid_argument("pth_mean_via_medians: p must be positive");

    double mass = 0, lhs = 0;
    for (PointId i : ball) {
        const double m = space.mass(i);
        mass += m;
        lhs += m * std::pow(std::fabs(u[static_cast<std::size_t>(i)]), p);
    }
    lhs /= mass;

    // gamma -> m^gamma_{|u|}(B) is the step function v*(gamma*mu(B)); its
    // p-th power integrates in closed form over the rearrangement steps.
    const StepRearrangement r = decreasing_rearrangement(space, u, ball);
    double rhs = 0;
    double prev = 0;
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
        rhs += std::pow(r.levels[k], p) * (r.breakpoints[k] - prev);
        prev = r.breakpoints[k];
    }
    rhs /= r.total_mass;
    return {lhs, rhs};
}

} // namespace medianscape
