#pragma once

#include "medianscape/qbfs.hpp"
#include "medianscape/space.hpp"

#include <span>
#include <string>
#include <vector>

namespace medianscape {

/// Candidate s-gradient: nonnegative values with the feasibility defect
///   max over pairs of (|u(x)-u(y)| - d(x,y)^s (g(x)+g(y)))^+ .
/// defect == 0 means g lies in D^s(u). On finite spaces the exceptional
/// null set of the definition is empty (every atom has positive mass).
struct GradientCandidate {
    std::vector<double> g;
    double s = 1;
    double defect = 0;
    std::string tag; // "exact", "upper bound", ...
};

double gradient_defect(const MetricMeasureSpace& space, std::span<const double> u,
                       std::span<const double> g, double s);

/// Always-feasible construction g0(x) = 1/2 max_{y != x} |u(x)-u(y)| / d(x,y)^s.
/// Pairwise sums of g0 dominate every difference quotient; rounding can leave
/// an ulp-scale defect, removed by a relative lift far below 1e-12.
GradientCandidate canonical_gradient(const MetricMeasureSpace& space,
                                     std::span<const double> u, double s);

/// Minimal-quasinorm gradient. Exact routes: L1 (covering linear program
/// with its optimality certificate), max-norm (closed form
/// g == 1/2 max |u(x)-u(y)|/d^s). Lp with 1 < p < infinity runs a projected
/// subgradient descent from the canonical gradient with feasibility restored
/// by a per-constraint lift after each step. Everything else returns the
/// canonical gradient tagged "upper bound".
GradientCandidate minimal_gradient(const MetricMeasureSpace& space, std::span<const double> u,
                                   double s, const QuasinormSpec& spec);

struct HajlaszNorm {
    double homogeneous = 0; // quasinorm of the minimal gradient
    double full = 0;        // ||u||_X + homogeneous
    std::string tag;        // minimality tag carried from the gradient
};

HajlaszNorm hajlasz_norm(const MetricMeasureSpace& space, std::span<const double> u, double s,
                         const QuasinormSpec& spec);

/// max{g_u, g_v} is an s-gradient of both max{u,v} and min{u,v}.
GradientCandidate max_min_gradient(const MetricMeasureSpace& space, std::span<const double> u,
                                   const GradientCandidate& gu, std::span<const double> v,
                                   const GradientCandidate& gv);

/// Pointwise sup of gradients is an s-gradient of the pointwise sup.
GradientCandidate sup_gradient(const MetricMeasureSpace& space,
                               const std::vector<std::vector<double>>& us,
                               const std::vector<GradientCandidate>& gs);

/// Lipschitz multiplier description for the product rule.
struct LipschitzBump {
    std::vector<double> phi;       // values in [-sup_norm, sup_norm]
    double lipschitz = 0;          // verified metric Lipschitz constant L
    double sup_norm = 0;
    std::vector<PointId> support;  // S; phi vanishes outside S
};

LipschitzBump make_bump(const MetricMeasureSpace& space, std::vector<double> phi);

/// h = (||phi||_inf g + (2||phi||_inf)^{1-s} L^s |u|) chi_S, an s-gradient
/// of u * phi.
GradientCandidate product_gradient(const MetricMeasureSpace& space, std::span<const double> u,
                                   const GradientCandidate& g, const LipschitzBump& bump,
                                   double s);

struct HolderApproximation {
    std::vector<double> u_lambda;   // 2 lambda-Holder extension of u from E_lambda
    GradientCandidate residual;     // (g + 3 lambda) chi_{P \ E_lambda} in D^s(u - u_lambda)
    std::vector<PointId> good_set;  // E_lambda = {g <= lambda}
    double holder_quotient = 0;     // measured sup |u_l(x)-u_l(y)| / d^s
};

/// McShane-type approximation: u_lambda(x) = min_{y in E_lambda} u(y) + 2 lambda d(x,y)^s,
/// clipped to the range of u; equals u on E_lambda.
HolderApproximation holder_approximate(const MetricMeasureSpace& space,
                                       std::span<const double> u, const GradientCandidate& g,
                                       double s, double lambda);

struct CapacityBound {
    std::vector<PointId> set;
    double value = 0;          // upper bound on the M^{s,X} capacity
    double delta = 0;          // bump radius attaining the bound
    std::vector<double> witness_u;
    GradientCandidate witness_g;
    std::string tag;           // minimality tag of the witness gradient
};

/// Upper bound on the capacity of E from the bump family
/// u_delta = clamp(1 - dist(.,E)^s / delta^s, 0, 1), minimized over the
/// radii grid. An empty E has capacity zero with a zero witness.
CapacityBound capacity_upper(const MetricMeasureSpace& space, std::span<const PointId> E,
                             double s, const QuasinormSpec& spec,
                             std::span<const double> radii_grid);

} // namespace medianscape
