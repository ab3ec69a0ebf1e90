#pragma once

#include <cstddef>
#include <vector>

namespace medianscape {

/// Exact solver for the covering program behind minimal L1 gradients:
///
///   minimize  sum_i w_i g_i
///   s.t.      g_i + g_j >= c_k   for pairs (i_k, j_k)
///             g >= 0
///
/// solved as a revised primal simplex on the dual (a fractional b-matching
/// with n rows), whose simplex multipliers at optimality are the primal g.
struct CoveringLpResult {
    std::vector<double> g;
    double value = 0;
    double duality_gap = 0;        // |primal - dual| / (1 + |primal|)
    double primal_infeasibility = 0; // max constraint violation of g
    std::size_t iterations = 0;
};

struct PairConstraint {
    int i, j;
    double c;
};

CoveringLpResult solve_covering_lp(const std::vector<double>& weights,
                                   const std::vector<PairConstraint>& pairs);

} // namespace medianscape
