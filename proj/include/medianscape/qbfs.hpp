#pragma once

#include "medianscape/space.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace medianscape {

/// Young-type function for Orlicz norms. Catalog entries carry analytic
/// constants; tabulated functions get empirical ones from a log-grid audit.
/// Every constructor verifies monotonicity and the growth condition
/// Phi(t/C) <= Phi(t)/2 (equivalently Phi(s) <= C0 (s/t)^beta Phi(t)).
class OrliczFunction {
public:
    enum class Kind { power, power_log, exp_minus_one, table };

    static OrliczFunction power(double p);
    /// Phi(t) = t^p * log(e + t)
    static OrliczFunction power_log(double p);
    /// Phi(t) = exp(t) - 1; satisfies the growth condition but is not
    /// doubling, so the Luxemburg quasinorm is not absolutely continuous.
    static OrliczFunction exp_minus_one();
    /// Piecewise power-law interpolation of an increasing (t, Phi) table.
    static OrliczFunction from_table(std::vector<std::pair<double, double>> pts);

    double operator()(double t) const;

    Kind kind() const { return kind_; }
    double exponent() const { return p_; }
    double growth_C() const { return growth_C_; }   // Phi(t/C) <= Phi(t)/2
    double C0() const { return C0_; }               // Phi(s) <= C0 (s/t)^beta Phi(t)
    double beta() const { return beta_; }
    double doubling_constant() const { return doubling_C_; }
    bool doubling() const { return doubling_; }
    std::string describe() const;

private:
    OrliczFunction() = default;
    void audit();

    Kind kind_ = Kind::power;
    double p_ = 1;
    std::vector<std::pair<double, double>> table_;
    double lo_slope_ = 1, hi_slope_ = 1; // extrapolation slopes for tables
    double growth_C_ = 2;
    double C0_ = 1;
    double beta_ = 1;
    double doubling_C_ = 2;
    bool doubling_ = true;
};

/// Variable exponent p(.) on a fixed space, with its measured log-Holder
/// constant. The optional (p_inf, a) decay certificate of the paper is
/// vacuous on finite spaces and kept only as metadata.
struct ExponentField {
    std::vector<double> p;
    double p_minus = 0, p_plus = 0;
    double log_holder_C = 0; // max over audited pairs of |p(x)-p(y)| log(e + 1/d)
    bool audit_exhaustive = true;
    std::optional<std::pair<double, double>> decay; // (p_inf, a)
};

ExponentField make_exponent_field(const MetricMeasureSpace& space, std::vector<double> p);

/// Tagged description of the function space X in {Lp, Lorentz, Orlicz,
/// VarExp} together with its structural constants. rho is the
/// Aoki-Rolewicz exponent (analytic where standard); absolute continuity is
/// a per-family flag, vacuous at runtime on finite spaces but recorded
/// because it gates which statements an experiment may invoke.
class QuasinormSpec {
public:
    enum class Family { Lp, Lorentz, Orlicz, VarExp };

    static QuasinormSpec lp(double p); // p in (0, inf]; p == inf is the max-norm
    static QuasinormSpec lorentz(double p, double q); // q in (0, inf]
    static QuasinormSpec orlicz(OrliczFunction phi);
    static QuasinormSpec varexp(ExponentField field);

    Family family() const { return family_; }
    double p() const { return p_; }
    double q() const { return q_; }
    const OrliczFunction& phi() const { return phi_; }
    const ExponentField& exponents() const { return *exponents_; }

    double rho() const { return rho_; }
    bool rho_empirical() const { return rho_empirical_; }
    void set_rho(double rho, bool empirical)
    {
        rho_ = rho;
        rho_empirical_ = empirical;
    }
    bool absolutely_continuous() const { return absolutely_continuous_; }
    const std::string& ac_justification() const { return ac_justification_; }

    /// Analytic ceiling for the generalized upper Boyd index, when the paper
    /// provides one (1/p for Lorentz and Lp, 1/beta for Orlicz, 1/p_- for
    /// variable exponents).
    double boyd_ceiling() const;

    std::string describe() const;

private:
    QuasinormSpec() = default;
    Family family_ = Family::Lp;
    double p_ = 1, q_ = 1;
    OrliczFunction phi_ = OrliczFunction::power(1);
    std::shared_ptr<const ExponentField> exponents_;
    double rho_ = 1;
    bool rho_empirical_ = false;
    bool absolutely_continuous_ = true;
    std::string ac_justification_;
};

/// The quasinorm of u in X over the space's measure. Lp and Lorentz are
/// closed forms on the step rearrangement; Orlicz and variable-exponent
/// norms are Luxemburg infima found by bracketing bisection to 1e-10
/// relative accuracy.
double quasinorm(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                 std::span<const double> u);

/// Modular behind the Luxemburg norms: integral of Phi(|u|/lambda), or of
/// (|u|/lambda)^{p(x)}.
double luxemburg_modular(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                         std::span<const double> u, double lambda);

/// Analytic Aoki-Rolewicz exponent: min(1, p) for Lp, min(1, p, q) for
/// Lorentz, min(1, p) for power Orlicz (min(1, beta) otherwise), and
/// min(1, p_-) for variable exponents.
double aoki_exponent(const QuasinormSpec& spec);

struct AokiAudit {
    double rho = 1;
    bool empirical = false;   // true when the analytic guess failed and was shrunk
    double worst_ratio = 0;   // max of ||sum f_k|| / (4^{1/rho} (sum ||f_k||^rho)^{1/rho})
    std::size_t trials = 0;
};

/// Audits the Aoki-Rolewicz inequality with factor 4^{1/rho} on seeded
/// random pairs and triples; on failure shrinks rho by 0.9 and re-audits.
AokiAudit aoki_exponent_audited(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                                std::size_t trials = 200, std::uint64_t seed = 1);

/// Lower estimate of the quasi-triangle constant from randomized pairs.
double estimate_c_delta(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                        std::size_t trials = 200, std::uint64_t seed = 1);

struct AxiomReport {
    bool lattice_ok = true;
    double lattice_slack = 0; // max of ||f|| - ||g|| over audited |f| <= |g|
    bool indicators_finite = true;
    bool fatou_ok = true;
    double fatou_slack = 0;
    std::size_t trials = 0;
};

/// Randomized audit of the quasi-Banach function space axioms: the lattice
/// property, finiteness on indicators, and monotone convergence along
/// finite increasing sequences.
AxiomReport verify_axioms(const QuasinormSpec& spec, const MetricMeasureSpace& space,
                          std::size_t trials, std::uint64_t seed = 1);

} // namespace medianscape
