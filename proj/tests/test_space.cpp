#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "medianscape/space.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace medianscape;

TEST_CASE("collinear unit-mass points build a valid space")
{
    auto s = MetricMeasureSpace::from_coords({0, 1, 2}, 1, {1, 1, 1});
    CHECK(s.size() == 3);
    CHECK(s.total_mass() == doctest::Approx(3.0));
    CHECK(s.dist(0, 2) == doctest::Approx(2.0));
    CHECK(s.is_line());
    CHECK(s.equal_mass());
}

TEST_CASE("non-positive mass is rejected with the offending index")
{
    CHECK_THROWS_WITH_AS(MetricMeasureSpace::from_coords({0, 1, 2}, 1, {1, 0, 1}),
                         doctest::Contains("non-positive mass at index 1"),
                         std::invalid_argument);
}

TEST_CASE("triangle violation in a table names a witness triple")
{
    // d(0,2)=5 with d(0,1)=d(1,2)=1
    std::vector<double> t = {0, 1, 5, 1, 0, 1, 5, 1, 0};
    try {
        MetricMeasureSpace::from_table(std::move(t), {1, 1, 1});
        FAIL("expected a triangle violation");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("triangle") != std::string::npos);
        CHECK(msg.find("0") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("non-symmetric table is rejected")
{
    std::vector<double> t = {0, 1, 1, 2, 0, 1, 1, 1, 0};
    CHECK_THROWS_AS(MetricMeasureSpace::from_table(std::move(t), {1, 1, 1}),
                    std::invalid_argument);
}

TEST_CASE("radius ladder on the line {0,1,2}")
{
    auto s = MetricMeasureSpace::from_coords({0, 1, 2}, 1, {1, 1, 1});
    SUBCASE("unbounded: three nested balls")
    {
        auto lad = radius_ladder(s, 0);
        REQUIRE(lad.size() == 3);
        CHECK(lad[0].members == std::vector<PointId>{0});
        CHECK(lad[1].members == std::vector<PointId>{0, 1});
        CHECK(lad[2].members == std::vector<PointId>{0, 1, 2});
        // representative radii realize their member sets
        for (const auto& b : lad)
            CHECK(s.ball_members(0, b.radius) == b.members);
    }
    SUBCASE("R = 1 keeps only the singleton")
    {
        auto lad = radius_ladder(s, 0, 1.0);
        REQUIRE(lad.size() == 1);
        CHECK(lad[0].members == std::vector<PointId>{0});
        CHECK(lad[0].radius < 1.0);
    }
}

TEST_CASE("single-point space has the singleton ladder")
{
    auto s = MetricMeasureSpace::from_coords({0.5}, 1, {2.0});
    auto lad = radius_ladder(s, 0);
    REQUIRE(lad.size() == 1);
    CHECK(lad[0].members == std::vector<PointId>{0});
    CHECK(lad[0].radius > 0);
}

TEST_CASE("ladder member sets are strictly nested")
{
    std::mt19937_64 rng(42);
    for (int t = 0; t < 20; ++t) {
        auto s = oracle::random_space(rng, 24);
        for (std::size_t x = 0; x < s.size(); ++x) {
            auto lad = radius_ladder(s, static_cast<PointId>(x));
            for (std::size_t k = 0; k + 1 < lad.size(); ++k) {
                CHECK(lad[k].members.size() < lad[k + 1].members.size());
                CHECK(std::includes(lad[k + 1].members.begin(), lad[k + 1].members.end(),
                                    lad[k].members.begin(), lad[k].members.end()));
            }
        }
    }
}

TEST_CASE("snowflake keeps ladder member sets, changes radii only")
{
    auto base = generate_grid1d(17);
    auto snow = generate_snowflake(0.5, base);
    CHECK(snow.dist(0, 1) == doctest::Approx(std::sqrt(base.dist(0, 1))));
    for (std::size_t x = 0; x < base.size(); ++x) {
        auto a = radius_ladder(base, static_cast<PointId>(x));
        auto b = radius_ladder(snow, static_cast<PointId>(x));
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(a[k].members == b[k].members);
    }
}

TEST_CASE("snowflake of grid1d(3) has dist(0,1) = sqrt(1/2)")
{
    auto snow = generate_snowflake(0.5, generate_grid1d(3));
    CHECK(snow.dist(0, 1) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("generators")
{
    SUBCASE("grid1d(4) is {0,1/3,2/3,1} with masses 1/4")
    {
        auto g = generate_grid1d(4);
        CHECK(g.coord(1) == doctest::Approx(1.0 / 3));
        CHECK(g.mass(2) == doctest::Approx(0.25));
        CHECK(g.total_mass() == doctest::Approx(1.0));
    }
    SUBCASE("weighted grid has masses proportional to the node weight")
    {
        auto g = generate_weighted_grid(4, 1.0);
        // midpoint nodes 1/8, 3/8, 5/8, 7/8 with weights x
        CHECK(g.mass(0) == doctest::Approx(1.0 / 16));
        CHECK(g.mass(3) == doctest::Approx(7.0 / 16));
        CHECK(g.total_mass() == doctest::Approx(1.0));
        CHECK(g.is_line());
        CHECK(!g.equal_mass());
    }
    SUBCASE("grid2d")
    {
        auto g = generate_grid2d(4);
        CHECK(g.size() == 16);
        CHECK(g.dim() == 2);
        CHECK(g.dist(0, 5) == doctest::Approx(std::sqrt(2.0) / 3));
    }
}

TEST_CASE("doubling audit: reported c_d bounds every audited pair")
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 8; ++t) {
        auto s = oracle::random_space(rng, 20);
        auto rep = estimate_structure(s);
        CHECK(rep.c_d >= 1.0);
        for (std::size_t x = 0; x < s.size(); ++x)
            for (const auto& b : radius_ladder(s, static_cast<PointId>(x))) {
                const double m1 = s.ball_mass(static_cast<PointId>(x), b.radius);
                const double m2 = s.ball_mass(static_cast<PointId>(x), 2 * b.radius);
                CHECK(m2 <= rep.c_d * m1 * (1 + 1e-12));
            }
    }
}

TEST_CASE("structure estimates match the analytic dimension")
{
    SUBCASE("1-D grid: Q near 1")
    {
        auto rep = estimate_structure(generate_grid1d(256));
        CHECK(rep.Q > 0.9);
        CHECK(rep.Q < 1.1);
    }
    SUBCASE("2-D grid: Q near 2")
    {
        auto rep = estimate_structure(generate_grid2d(32));
        CHECK(rep.Q > 1.8);
        CHECK(rep.Q < 2.2);
    }
    SUBCASE("single point: c_d = 1, Q = 0")
    {
        auto rep = estimate_structure(MetricMeasureSpace::from_coords({0.0}, 1, {1.0}));
        CHECK(rep.c_d == doctest::Approx(1.0));
        CHECK(rep.Q == doctest::Approx(0.0));
    }
}

TEST_CASE("(Q) condition holds on ladder triples with the reported constants")
{
    std::mt19937_64 rng(11);
    auto s = oracle::random_space(rng, 32);
    auto rep = estimate_structure(s);
    for (std::size_t x = 0; x < s.size(); x += 3) {
        auto lx = radius_ladder(s, static_cast<PointId>(x));
        for (std::size_t k = 0; k < lx.size(); k += 2) {
            const double R = lx[k].radius;
            const double mR = s.ball_mass(static_cast<PointId>(x), R);
            for (PointId y : lx[k].members)
                for (const auto& by : radius_ladder(s, y, R)) {
                    const double r = std::min(by.radius, R);
                    const double my = s.ball_mass(y, r);
                    CHECK(my / mR >= rep.c_Q * std::pow(r / R, rep.Q) * (1 - 1e-9));
                }
        }
    }
}
