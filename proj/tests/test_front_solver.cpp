#include <doctest.h>

#include <cmath>
#include <random>

#include "frontforge/front_solver.hpp"
#include "frontforge/medium.hpp"

using namespace frontforge;
using namespace frontforge::front;

namespace {

Medium sym_env(double amplitude)
{
    env::EnvironmentSpec s;
    s.n = 3;
    s.directions = *geom::polytope_preset("cross3").rational_generators();
    s.base_points = {{0, 0, 0}, {0.5, 0, 0.5}, {0, 0.5, 0}};
    s.delta = 0.2;
    s.amplitude = amplitude;
    return hedlund_medium(s);
}

// Distance from x to the unit cube [0,1]^n.
double cube_distance(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        const double e = std::max({0.0, -v, v - 1.0});
        s += e * e;
    }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("point source in a constant medium gives |x - x0| / c")
{
    for (double c : {1.0, 2.0}) {
        FmmOptions o;
        o.h = 1.0 / 16.0;
        o.t_max = 1.0;
        const auto F = fmm_arrival(constant_medium(3, c), Source::point({0, 0, 0}), o);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> N(0.0, 1.0);
        for (int k = 0; k < 100; ++k) {
            Vec x{N(rng), N(rng), N(rng)};
            x = scaled(x, 0.8 * c / norm(x) * std::uniform_real_distribution<double>(0.2, 1.0)(rng));
            const double T = F.at(x);
            CHECK(std::abs(c * T - norm(x)) <= 3.0 * o.h);
        }
    }
}

TEST_CASE("front from the unit cell in a constant medium")
{
    FmmOptions o;
    o.h = 1.0 / 32.0;
    o.t_max = 4.5;
    o.mirror = {true, true};
    const Medium m = constant_medium(2, 1.0);
    const auto F = fmm_arrival(m, Source::unit_cell(2), o);
    const auto d = shape_deficits(F, 4.0, geom::Ball{2, 1.0});
    CHECK(d.outer == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(0.05));
    CHECK(d.inner <= 3.0 * o.h / 4.0);
}

TEST_CASE("reachable cloud of a round front is near the unit circle")
{
    FmmOptions o;
    o.h = 1.0 / 32.0;
    o.t_max = 2.0;
    const auto F = fmm_arrival(constant_medium(2, 1.0), Source::point({0, 0}), o);
    const auto cloud = reachable_cloud(F, 1.5);
    REQUIRE(cloud.size() > 50);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK(std::abs(norm(cloud.point(i)) - 1.0) <= 2.0 * o.h / 1.5);
}

TEST_CASE("reachable set before the source has moved is an error")
{
    FmmOptions o;
    o.h = 1.0 / 8.0;
    o.t_max = 1.0;
    const auto F = fmm_arrival(constant_medium(2, 1.0), Source::point({0, 0}), o);
    CHECK_THROWS_AS(reachable_cloud(F, 1e-6), ValidationError);
    CHECK_THROWS_AS(reachable_cloud(F, 5.0), ValidationError);
    CHECK_THROWS_AS(reachable_cloud(F, 0.0), ValidationError);
}

TEST_CASE("invalid fast-marching inputs")
{
    FmmOptions o;
    o.h = 0.0;
    CHECK_THROWS_AS(fmm_arrival(constant_medium(2, 1.0), Source::unit_cell(2), o), ValidationError);
    o.h = 0.1;
    o.t_max = -1.0;
    CHECK_THROWS_AS(fmm_arrival(constant_medium(2, 1.0), Source::unit_cell(2), o), ValidationError);
    CHECK_THROWS_AS(subadditivity_check(constant_medium(2, 1.0), 1.0, 1.0, 0.3), ValidationError);
}

TEST_CASE("symmetric cross environment is mirror symmetric about the cell centre")
{
    const auto axes = symmetric_axes(sym_env(3.0), Vec{0.5, 0.5, 0.5});
    CHECK(axes == std::vector<bool>{true, true, true});
}

TEST_SUITE("properties")
{
    TEST_CASE("arrival times lie between the slowest and fastest constant fronts")
    {
        const Medium m = sym_env(3.0);
        FmmOptions o;
        o.h = 1.0 / 16.0;
        o.t_max = 2.0;
        const auto F = fmm_arrival(m, Source::unit_cell(3), o);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> U(-1.0, 2.0);
        int checked = 0;
        for (int k = 0; k < 2000; ++k) {
            const Vec x{U(rng), U(rng), U(rng)};
            const double T = F.at(x);
            if (!std::isfinite(T))
                continue;
            ++checked;
            const double dist = cube_distance(x);
            CHECK(T >= dist / m.upper - 2.0 * o.h / m.lower);
            CHECK(T <= dist / m.lower + 2.0 * o.h / m.lower);
        }
        CHECK(checked > 500);
    }

    TEST_CASE("a faster medium arrives no later")
    {
        const Medium slow = sym_env(3.0);
        const Medium fast = pointwise_max(slow, constant_medium(3, 0.6));
        FmmOptions o;
        o.h = 1.0 / 16.0;
        o.t_max = 1.5;
        const auto Fs = fmm_arrival(slow, Source::unit_cell(3), o);
        const auto Ff = fmm_arrival(fast, Source::unit_cell(3), o);
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> U(-0.5, 1.5);
        for (int k = 0; k < 2000; ++k) {
            const Vec x{U(rng), U(rng), U(rng)};
            const double ts = Fs.at(x), tf = Ff.at(x);
            if (std::isfinite(ts))
                CHECK(tf <= ts + 1e-9);
        }
    }

    TEST_CASE("mirrored and full solves agree within 4h")
    {
        const Medium m = sym_env(3.0);
        FmmOptions full;
        full.h = 1.0 / 16.0;
        full.t_max = 1.5;
        FmmOptions half = full;
        half.mirror = symmetric_axes(m, Vec{0.5, 0.5, 0.5});
        const auto A = fmm_arrival(m, Source::unit_cell(3), full);
        const auto B = fmm_arrival(m, Source::unit_cell(3), half);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> U(-0.8, 1.8);
        for (int k = 0; k < 2000; ++k) {
            const Vec x{U(rng), U(rng), U(rng)};
            const Vec y{1.0 - x[0], 1.0 - x[1], 1.0 - x[2]};
            const double a = A.at(x), b = A.at(y), c = B.at(x);
            if (std::isfinite(a) && std::isfinite(b)) {
                CHECK(std::abs(a - b) <= 4.0 * full.h);
            }
            if (std::isfinite(a) && std::isfinite(c) && a < 1.2)
                CHECK(std::abs(a - c) <= 4.0 * full.h);
        }
    }

    TEST_CASE("subadditivity holds for a constant medium, including s = 0")
    {
        const Medium m = constant_medium(2, 1.0);
        for (double s : {0.0, 1.0}) {
            const auto r = subadditivity_check(m, 1.0, s, 1.0 / 16.0);
            CHECK(r.checked > 0);
            CHECK(r.violation <= 3.0 / 16.0);
        }
    }
}
