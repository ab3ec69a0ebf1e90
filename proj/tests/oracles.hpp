// Brute-force reference implementations used as independent oracles. They
// follow the definitions literally (candidate-level enumeration over balls
// from the radius ladder) and never share code with the library paths they
// check.
#pragma once

#include "medianscape/space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using medianscape::MetricMeasureSpace;
using medianscape::PointId;

// smallest candidate level a with mu({u > a}) < gamma * mu(A)
inline double gamma_median(const std::vector<double>& values, const std::vector<double>& masses,
                           double gamma)
{
    double total = 0;
    for (double m : masses)
        total += m;
    std::vector<double> levels = values;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (double a : levels) {
        double above = 0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] > a)
                above += masses[i];
        if (above < gamma * total)
            return a;
    }
    return levels.back();
}

inline double gamma_median_on(const MetricMeasureSpace& space, const std::vector<double>& u,
                              const std::vector<PointId>& A, double gamma)
{
    std::vector<double> v, m;
    for (PointId i : A) {
        v.push_back(u[static_cast<std::size_t>(i)]);
        m.push_back(space.mass(i));
    }
    return gamma_median(v, m, gamma);
}

inline double ball_average_abs(const MetricMeasureSpace& space, const std::vector<double>& u,
                               const std::vector<PointId>& A)
{
    double num = 0, den = 0;
    for (PointId i : A) {
        num += space.mass(i) * std::fabs(u[static_cast<std::size_t>(i)]);
        den += space.mass(i);
    }
    return num / den;
}

inline std::vector<double> hl_maximal(const MetricMeasureSpace& space,
                                      const std::vector<double>& u, double R)
{
    std::vector<double> out(space.size());
    for (std::size_t x = 0; x < space.size(); ++x) {
        double best = 0;
        for (const auto& ball : medianscape::radius_ladder(space, static_cast<PointId>(x), R))
            best = std::max(best, ball_average_abs(space, u, ball.members));
        out[x] = best;
    }
    return out;
}

inline std::vector<double> median_maximal(const MetricMeasureSpace& space,
                                          const std::vector<double>& u, double gamma, double R)
{
    std::vector<double> absu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        absu[i] = std::fabs(u[i]);
    std::vector<double> out(space.size());
    for (std::size_t x = 0; x < space.size(); ++x) {
        double best = -medianscape::kInf;
        for (const auto& ball : medianscape::radius_ladder(space, static_cast<PointId>(x), R))
            best = std::max(best, gamma_median_on(space, absu, ball.members, gamma));
        out[x] = best;
    }
    return out;
}

// seeded random finite metric measure spaces: coordinate form (1-D or 2-D)
// or a perturbed-metric table
inline MetricMeasureSpace random_space(std::mt19937_64& rng, std::size_t n,
                                       bool allow_table = true)
{
    std::uniform_real_distribution<double> mass(0.1, 10.0);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::uniform_int_distribution<int> kind(0, allow_table ? 2 : 1);
    const int k = kind(rng);
    std::vector<double> masses(n);
    for (auto& m : masses)
        m = mass(rng);
    if (k == 0) {
        // random 1-D point set, strictly increasing coordinates
        std::vector<double> xs(n);
        for (auto& x : xs)
            x = coord(rng);
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (xs[i + 1] <= xs[i])
                xs[i + 1] = std::nextafter(xs[i], 2.0);
        return MetricMeasureSpace::from_coords(std::move(xs), 1, std::move(masses));
    }
    if (k == 1) {
        std::vector<double> xs(2 * n);
        for (auto& x : xs)
            x = coord(rng);
        return MetricMeasureSpace::from_coords(std::move(xs), 2, std::move(masses));
    }
    // table form: Euclidean distances warped by a random power in (0,1]
    std::vector<double> xs(2 * n);
    for (auto& x : xs)
        x = coord(rng);
    std::uniform_real_distribution<double> pow_dist(0.3, 1.0);
    const double a = pow_dist(rng);
    std::vector<double> table(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = xs[2 * i] - xs[2 * j];
            const double dy = xs[2 * i + 1] - xs[2 * j + 1];
            const double d = std::pow(std::sqrt(dx * dx + dy * dy) + 1e-9, a);
            table[i * n + j] = d;
            table[j * n + i] = d;
        }
    return MetricMeasureSpace::from_table(std::move(table), std::move(masses));
}

inline std::vector<double> random_function(std::mt19937_64& rng, std::size_t n, double lo = -1,
                                           double hi = 1)
{
    std::uniform_real_distribution<double> val(lo, hi);
    std::vector<double> u(n);
    for (auto& v : u)
        v = val(rng);
    return u;
}

} // namespace oracle
