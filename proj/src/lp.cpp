#include "medianscape/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace medianscape {

// Dual of the covering program:
//   maximize  sum_k c_k y_k
//   s.t.      sum_{k : i in pair k} y_k <= w_i   for every point i
//             y >= 0
// Rows are points, columns are pair variables plus one slack per row. The
// slack basis is feasible (w > 0), so no phase one is needed. The dual is
// bounded (each y_k <= min(w_i, w_j)), so the simplex terminates at an
// optimum whose row multipliers pi are the primal gradient g.
CoveringLpResult solve_covering_lp(const std::vector<double>& weights,
                                   const std::vector<PairConstraint>& pairs)
{
    const int n = static_cast<int>(weights.size());
    for (double w : weights)
        if (!(w > 0))
            throw std::invalid_argument("covering lp: weights must be positive");

    std::vector<PairConstraint> cols;
    cols.reserve(pairs.size());
    for (const auto& p : pairs)
        if (p.c > 0 && p.i != p.j)
            cols.push_back(p);
    const int K = static_cast<int>(cols.size());

    CoveringLpResult out;
    out.g.assign(weights.size(), 0.0);
    if (K == 0)
        return out;

    // basis[r] = column index in [0, K) for a pair column, or K + r0 for the
    // slack of row r0. Binv is the dense basis inverse.
    std::vector<int> basis(n);
    std::vector<double> Binv(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r) {
        basis[r] = K + r;
        Binv[static_cast<std::size_t>(r) * n + r] = 1.0;
    }
    std::vector<double> xB(weights); // basic values, start at the slacks = w

    auto obj_of = [&](int col) { return col < K ? cols[col].c : 0.0; };

    std::vector<double> pi(n, 0.0);
    std::vector<double> d(n, 0.0);

    const double eps = 1e-11;
    std::size_t iter = 0;
    const std::size_t max_iter = 20000 + 40 * static_cast<std::size_t>(n) +
                                 4 * static_cast<std::size_t>(K);
    bool bland = false;
    std::size_t stalled = 0;

    while (true) {
        if (++iter > max_iter)
            throw std::runtime_error("covering lp: iteration limit reached");

        // pi = c_B^T Binv
        std::fill(pi.begin(), pi.end(), 0.0);
        for (int r = 0; r < n; ++r) {
            const double cb = obj_of(basis[r]);
            if (cb == 0)
                continue;
            const double* row = &Binv[static_cast<std::size_t>(r) * n];
            for (int c = 0; c < n; ++c)
                pi[c] += cb * row[c];
        }

        // price: pair column k has reduced cost c_k - pi_i - pi_j; slack of
        // row r has -pi_r
        int enter = -1;
        double best = eps;
        for (int k = 0; k < K; ++k) {
            const double rc = cols[k].c - pi[cols[k].i] - pi[cols[k].j];
            if (rc > best + 0.0) {
                if (bland) {
                    enter = k;
                    break;
                }
                best = rc;
                enter = k;
            }
        }
        if (enter < 0) {
            for (int r = 0; r < n; ++r) {
                const double rc = -pi[r];
                if (rc > eps) {
                    enter = K + r;
                    break;
                }
            }
        }
        if (enter < 0)
            break; // optimal

        // direction d = Binv * A[enter]
        if (enter < K) {
            const int a = cols[enter].i, b = cols[enter].j;
            for (int r = 0; r < n; ++r) {
                const double* row = &Binv[static_cast<std::size_t>(r) * n];
                d[r] = row[a] + row[b];
            }
        } else {
            const int a = enter - K;
            for (int r = 0; r < n; ++r)
                d[r] = Binv[static_cast<std::size_t>(r) * n + a];
        }

        // ratio test
        int leave = -1;
        double theta = 0;
        for (int r = 0; r < n; ++r) {
            if (d[r] > eps) {
                const double t = xB[r] / d[r];
                if (leave < 0 || t < theta - 1e-15 ||
                    (bland && std::fabs(t - theta) <= 1e-15 && basis[r] < basis[leave])) {
                    theta = t;
                    leave = r;
                }
            }
        }
        if (leave < 0)
            throw std::runtime_error("covering lp: dual unbounded (should be impossible)");

        if (theta <= 1e-13)
            ++stalled;
        else
            stalled = 0;
        bland = stalled > 64;

        // pivot: update Binv and xB
        const double piv = d[leave];
        double* lrow = &Binv[static_cast<std::size_t>(leave) * n];
        for (int c = 0; c < n; ++c)
            lrow[c] /= piv;
        xB[leave] = theta;
        for (int r = 0; r < n; ++r) {
            if (r == leave)
                continue;
            const double f = d[r];
            if (f == 0)
                continue;
            double* row = &Binv[static_cast<std::size_t>(r) * n];
            for (int c = 0; c < n; ++c)
                row[c] -= f * lrow[c];
            xB[r] -= theta * f;
            if (xB[r] < 0 && xB[r] > -1e-12)
                xB[r] = 0;
        }
        basis[leave] = enter;
    }

    out.iterations = iter;
    // primal solution = row multipliers, clipped at zero roundoff
    double primal = 0;
    for (int r = 0; r < n; ++r) {
        out.g[r] = std::max(0.0, pi[r]);
        primal += weights[r] * out.g[r];
    }
    double dual = 0;
    for (int r = 0; r < n; ++r)
        dual += obj_of(basis[r]) * xB[r];
    out.value = primal;
    out.duality_gap = std::fabs(primal - dual) / (1 + std::fabs(primal));
    for (const auto& p : cols)
        out.primal_infeasibility =
            std::max(out.primal_infeasibility, p.c - out.g[p.i] - out.g[p.j]);
    return out;
}

} // namespace medianscape
