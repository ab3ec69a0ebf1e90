#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "medianscape/qbfs.hpp"

#include "medianscape/medians.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace medianscape;

namespace {

MetricMeasureSpace unit_masses(std::size_t n)
{
    std::vector<double> xs(n), ms(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = static_cast<double>(i);
    return MetricMeasureSpace::from_coords(std::move(xs), 1, std::move(ms));
}

} // namespace

TEST_CASE("Lp norm closed forms")
{
    auto s = unit_masses(2);
    std::vector<double> u = {3, 4};
    CHECK(quasinorm(QuasinormSpec::lp(2), s, u) == doctest::Approx(5.0));
    CHECK(quasinorm(QuasinormSpec::lp(1), s, u) == doctest::Approx(7.0));
    CHECK(quasinorm(QuasinormSpec::lp(kInf), s, u) == doctest::Approx(4.0));
    CHECK(quasinorm(QuasinormSpec::lp(0.5), s, u) ==
          doctest::Approx(std::pow(std::sqrt(3.0) + 2.0, 2.0)));
}

TEST_CASE("Lorentz norm of an indicator")
{
    // mu(E) = 4: expect q^{-1/q} mu(E)^{1/p}
    auto s = unit_masses(6);
    std::vector<double> chi = {1, 1, 1, 1, 0, 0};
    CHECK(quasinorm(QuasinormSpec::lorentz(2, 1), s, chi) == doctest::Approx(2.0));
    CHECK(quasinorm(QuasinormSpec::lorentz(2, kInf), s, chi) == doctest::Approx(2.0));
    // q^{-1/q} mu(E)^{1/p} with p = q = 2
    CHECK(quasinorm(QuasinormSpec::lorentz(2, 2), s, chi) ==
          doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Lorentz(p,p) is p^{-1/p} times Lp under this normalization")
{
    std::mt19937_64 rng(42);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng() % 12;
        auto s = oracle::random_space(rng, n);
        auto u = oracle::random_function(rng, n, -2, 2);
        for (double p : {0.5, 1.0, 2.0, 3.0}) {
            const double a = std::pow(p, -1.0 / p) * quasinorm(QuasinormSpec::lp(p), s, u);
            const double b = quasinorm(QuasinormSpec::lorentz(p, p), s, u);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("Lorentz layer cake matches adaptive quadrature")
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 25; ++t) {
        const std::size_t n = 1 + rng() % 10;
        auto s = oracle::random_space(rng, n);
        auto u = oracle::random_function(rng, n, -2, 2);
        const double p = 0.5 + 3.0 * (rng() % 100) / 100.0;
        const double q = 0.5 + 3.0 * (rng() % 100) / 100.0;
        const double closed = quasinorm(QuasinormSpec::lorentz(p, q), s, u);

        // trapezoid refinement of int q lambda^{q-1} mu(|u|>lambda)^{q/p}
        double umax = 0;
        for (double v : u)
            umax = std::max(umax, std::fabs(v));
        if (umax == 0) {
            CHECK(closed == 0.0);
            continue;
        }
        auto superlevel = [&](double lam) {
            double m = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (std::fabs(u[i]) > lam)
                    m += s.mass(static_cast<PointId>(i));
            return m;
        };
        const std::size_t steps = 400000;
        double acc = 0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double a = umax * k / steps;
            const double b = umax * (k + 1) / steps;
            const double mid = superlevel(0.5 * (a + b));
            // d(lambda^q)/q absorbs the lambda^{q-1} singularity exactly
            acc += std::pow(mid, q / p) * (std::pow(b, q) - std::pow(a, q)) / q;
        }
        const double quad = std::pow(acc, 1.0 / q);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-5));
    }
}

TEST_CASE("Orlicz Luxemburg norm: power phi reproduces Lp")
{
    auto s = unit_masses(2);
    std::vector<double> u = {3, 4};
    auto spec = QuasinormSpec::orlicz(OrliczFunction::power(2));
    CHECK(quasinorm(spec, s, u) == doctest::Approx(5.0).epsilon(1e-10));

    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 1 + rng() % 10;
        auto sp = oracle::random_space(rng, n);
        auto f = oracle::random_function(rng, n, -2, 2);
        for (double p : {0.5, 1.0, 3.0}) {
            const double a = quasinorm(QuasinormSpec::lp(p), sp, f);
            const double b = quasinorm(QuasinormSpec::orlicz(OrliczFunction::power(p)), sp, f);
            CHECK(a == doctest::Approx(b).epsilon(1e-9));
        }
    }
}

TEST_CASE("Orlicz catalog constants")
{
    auto p3 = OrliczFunction::power(3);
    CHECK(p3.beta() == doctest::Approx(3.0));
    CHECK(p3.doubling());
    auto pl = OrliczFunction::power_log(2);
    CHECK(pl.doubling());
    auto em = OrliczFunction::exp_minus_one();
    CHECK(!em.doubling());
    CHECK(em.beta() == doctest::Approx(1.0));
}

TEST_CASE("non-monotone Orlicz table is rejected before audit")
{
    CHECK_THROWS_AS(OrliczFunction::from_table({{1.0, 2.0}, {2.0, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("Orlicz table interpolates a power law")
{
    std::vector<std::pair<double, double>> pts;
    for (int k = -8; k <= 8; ++k) {
        const double t = std::pow(2.0, k);
        pts.emplace_back(t, t * t);
    }
    auto f = OrliczFunction::from_table(std::move(pts));
    CHECK(f(3.0) == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(f.beta() == doctest::Approx(2.0).epsilon(1e-6));
    auto spec = QuasinormSpec::orlicz(f);
    auto s = unit_masses(2);
    std::vector<double> u = {3, 4};
    CHECK(quasinorm(spec, s, u) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("variable exponent norm with constant p equals Lp")
{
    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 1 + rng() % 10;
        auto sp = oracle::random_space(rng, n);
        auto f = oracle::random_function(rng, n, -2, 2);
        for (double p : {0.7, 1.0, 2.5}) {
            auto field = make_exponent_field(sp, std::vector<double>(n, p));
            const double a = quasinorm(QuasinormSpec::lp(p), sp, f);
            const double b = quasinorm(QuasinormSpec::varexp(field), sp, f);
            CHECK(a == doctest::Approx(b).epsilon(1e-10));
        }
    }
}

TEST_CASE("log-Holder constant is measured on all pairs")
{
    auto s = generate_grid1d(64);
    std::vector<double> p(64);
    for (std::size_t i = 0; i < 64; ++i)
        p[i] = 1.5 + s.coord(static_cast<PointId>(i));
    auto field = make_exponent_field(s, p);
    CHECK(field.p_minus == doctest::Approx(1.5));
    CHECK(field.p_plus == doctest::Approx(2.5));
    CHECK(field.audit_exhaustive);
    double worst = 0;
    for (PointId i = 0; i < 64; ++i)
        for (PointId j = i + 1; j < 64; ++j)
            worst = std::max(worst, std::fabs(p[i] - p[j]) *
                                        std::log(std::exp(1.0) + 1.0 / s.dist(i, j)));
    CHECK(field.log_holder_C == doctest::Approx(worst));
}

TEST_CASE("homogeneity of every family")
{
    std::mt19937_64 rng(37);
    auto s = oracle::random_space(rng, 9);
    auto u = oracle::random_function(rng, 9, -2, 2);
    std::vector<double> su(9);
    const double alpha = -3.25;
    for (std::size_t i = 0; i < 9; ++i)
        su[i] = alpha * u[i];
    std::vector<QuasinormSpec> specs = {
        QuasinormSpec::lp(0.5), QuasinormSpec::lp(2), QuasinormSpec::lorentz(2, 1),
        QuasinormSpec::lorentz(1.5, kInf), QuasinormSpec::orlicz(OrliczFunction::power_log(2)),
        QuasinormSpec::varexp(make_exponent_field(s, std::vector<double>(9, 1.7)))};
    for (const auto& spec : specs) {
        const double a = quasinorm(spec, s, su);
        const double b = std::fabs(alpha) * quasinorm(spec, s, u);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("analytic Aoki-Rolewicz exponents")
{
    CHECK(QuasinormSpec::lp(2).rho() == 1.0);
    CHECK(QuasinormSpec::lp(0.5).rho() == 0.5);
    CHECK(QuasinormSpec::lorentz(1, kInf).rho() == 1.0);
    CHECK(QuasinormSpec::lorentz(2, 0.5).rho() == 0.5);
    CHECK(QuasinormSpec::orlicz(OrliczFunction::power(0.75)).rho() == 0.75);
}

TEST_CASE("Aoki-Rolewicz audit passes at the analytic exponent")
{
    std::mt19937_64 rng(41);
    auto s = oracle::random_space(rng, 12);
    for (auto spec : {QuasinormSpec::lp(2), QuasinormSpec::lp(0.5),
                      QuasinormSpec::lorentz(1, kInf), QuasinormSpec::lorentz(2, 1)}) {
        auto audit = aoki_exponent_audited(spec, s, 200, 99);
        CHECK(audit.rho == doctest::Approx(spec.rho()));
        CHECK(!audit.empirical);
        CHECK(audit.worst_ratio <= 1.0);
    }
}

TEST_CASE("axiom audit passes for all families")
{
    std::mt19937_64 rng(43);
    auto s = oracle::random_space(rng, 10);
    std::vector<QuasinormSpec> specs = {
        QuasinormSpec::lp(1), QuasinormSpec::lp(0.5), QuasinormSpec::lorentz(2, 1),
        QuasinormSpec::orlicz(OrliczFunction::power(3)),
        QuasinormSpec::varexp(make_exponent_field(s, std::vector<double>(10, 2.0)))};
    for (const auto& spec : specs) {
        auto rep = verify_axioms(spec, s, 40, 7);
        CHECK(rep.lattice_ok);
        CHECK(rep.indicators_finite);
        CHECK(rep.fatou_ok);
        CHECK(rep.lattice_slack <= 1e-9);
    }
}

TEST_CASE("absolute continuity flags per family")
{
    CHECK(QuasinormSpec::lp(2).absolutely_continuous());
    CHECK(QuasinormSpec::lorentz(2, 1).absolutely_continuous());
    CHECK(!QuasinormSpec::lorentz(2, kInf).absolutely_continuous());
    CHECK(QuasinormSpec::orlicz(OrliczFunction::power(3)).absolutely_continuous());
    CHECK(!QuasinormSpec::orlicz(OrliczFunction::exp_minus_one()).absolutely_continuous());
}

TEST_CASE("c_delta estimate is at least 1 for genuine quasinorms")
{
    std::mt19937_64 rng(51);
    auto s = oracle::random_space(rng, 8);
    CHECK(estimate_c_delta(QuasinormSpec::lp(2), s, 100, 5) <= 1.0 + 1e-12);
    CHECK(estimate_c_delta(QuasinormSpec::lp(0.5), s, 100, 5) > 1.0);
}
