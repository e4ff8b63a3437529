#include <doctest.h>

#include <cmath>
#include <random>

#include "frontforge/hj_solver.hpp"
#include "oracles.hpp"

using namespace frontforge;
using namespace frontforge::hj;

namespace {

std::vector<double> as_std(const Vec& v) { return {v.begin(), v.end()}; }

// inf of |y| over the l-infinity box x + t[-1,1]^n (cube2 front), by clamping.
double cone_over_box(const Vec& x, double t)
{
    double s = 0.0;
    for (double v : x) {
        const double e = std::max(0.0, std::abs(v) - t);
        s += e * e;
    }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("initial data kinds evaluate as documented")
{
    const auto lin = InitialData::linear({1, -2, 0.5});
    CHECK(lin(Vec{1, 1, 2}) == doctest::Approx(0.0));
    CHECK(lin.lipschitz() == doctest::Approx(std::sqrt(5.25)));
    const auto cone = InitialData::cone({1, 0});
    CHECK(cone(Vec{4, 4}) == doctest::Approx(5.0));
    const auto bump = InitialData::bump({0, 0}, 2.0, 3.0);
    CHECK(bump(Vec{0, 0}) == doctest::Approx(3.0));
    CHECK(bump(Vec{2.5, 0}) == 0.0);
    CHECK(bump(Vec{1, 0}) == doctest::Approx(3.0 * std::exp(1.0 - 1.0 / 0.75)));

    front::ScalarField t;
    t.n = 2;
    t.dims = {2, 2};
    t.origin = {0, 0};
    t.h = 1.0;
    t.values = {0, 1, 2, 3};
    const auto tab = InitialData::tabulated(t);
    CHECK(tab(Vec{0.5, 0.5}) == doctest::Approx(1.5));
    CHECK(tab(Vec{-3, 7}) == doctest::Approx(2.0));
    t.values.pop_back();
    CHECK_THROWS_AS(InitialData::tabulated(t), ValidationError);
    CHECK_THROWS_AS(lin(Vec{1, 2}), ValidationError);
}

TEST_CASE("initial data parsing")
{
    CHECK(InitialData::parse("linear:1,2,3").p() == Vec{1, 2, 3});
    CHECK(InitialData::parse("cone:0,0").kind() == InitialData::Kind::Cone);
    CHECK(InitialData::parse("bump:0,0,0,1,2").kind() == InitialData::Kind::Bump);
    CHECK_THROWS_AS(InitialData::parse("linear"), ValidationError);
    CHECK_THROWS_AS(InitialData::parse("wave:1,2"), ValidationError);
    CHECK_THROWS_AS(InitialData::parse("linear:1,x"), ValidationError);
    CHECK_THROWS_AS(InitialData::parse("bump:0,0,1"), ValidationError);
}

TEST_CASE("Hopf-Lax is exact for linear data on a polytope")
{
    const auto P = geom::polytope_preset("cross-diag3");
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const Vec p{N(rng), N(rng), N(rng)}, x{N(rng), N(rng), N(rng)};
        const double t = std::abs(N(rng));
        const double s = oracle::generator_support(
            {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0.5}}, as_std(p));
        CHECK(hopf_lax_effective(InitialData::linear(p), P, x, t) ==
              doctest::Approx(oracle::hopf_lax_linear(as_std(p), as_std(x), t, s)).epsilon(1e-9));
    }
}

TEST_CASE("Hopf-Lax for a cone on a box and on a ball")
{
    const auto P = geom::polytope_preset("square2");
    const auto g = InitialData::cone({0, 0});
    for (const Vec& x : {Vec{2, 0.5}, Vec{0.3, 0.2}, Vec{-1.5, 2.5}}) {
        CHECK(hopf_lax_effective(g, P, x, 0.7) == doctest::Approx(cone_over_box(x, 0.7)).epsilon(1e-3));
        const double r = std::max(0.0, norm(x) - 0.7);
        CHECK(hopf_lax_effective(g, geom::ConvexBody(geom::Ball{2, 1.0}), x, 0.7) ==
              doctest::Approx(r).epsilon(1e-3));
    }
    CHECK(hopf_lax_effective(g, P, Vec{2, 0.5}, 0.0) == doctest::Approx(norm(Vec{2, 0.5})));
    CHECK_THROWS_AS(hopf_lax_effective(g, P, Vec{2, 0.5}, -1.0), ValidationError);
}

TEST_CASE("representation formula in a constant medium")
{
    const auto g = InitialData::linear({0.6, 0.8});
    const double eps = 0.25, h = eps / 8.0;
    RepresentationSolver u(constant_medium(2, 1.0), eps, 1.0, h);
    for (const Vec& x : {Vec{0, 0}, Vec{0.3, -0.7}, Vec{1.1, 0.4}})
        CHECK(std::abs(u(g, x) - (g(x) - 1.0)) <= 2.0 * h);
    CHECK(u.solves() >= 1);
    CHECK_THROWS_AS(RepresentationSolver(constant_medium(2, 1.0), 0.0, 1.0, h), ValidationError);
}

TEST_CASE("PDE stepping keeps linear data exact in a constant medium")
{
    // The ghost layer holds g, not the solution, so its error leaks inward
    // through the scheme's viscosity; check well inside the box.
    front::ScalarField box;
    box.n = 2;
    box.dims = {81, 81};
    box.origin = {-2, -2};
    box.h = 0.05;
    box.values.assign(81 * 81, 0.0);
    const auto g = InitialData::linear({0.6, 0.8});
    const auto u = oscillatory_pde(g, constant_medium(2, 2.0), 0.1, box, 0.25);
    double worst = 0.0;
    for (std::size_t j = 30; j <= 50; ++j)
        for (std::size_t i = 30; i <= 50; ++i) {
            const Vec x{-2 + 0.05 * i, -2 + 0.05 * j};
            worst = std::max(worst, std::abs(u.values[j * 81 + i] - (g(x) - 0.5)));
        }
    CHECK(worst <= 1e-6);
    PdeOptions bad;
    bad.cfl = 1.5;
    CHECK_THROWS_AS(oscillatory_pde(g, constant_medium(2, 2.0), 0.1, box, 0.25, bad), ValidationError);
}

TEST_CASE("PDE and representation formula agree in a layered medium")
{
    const Medium m = sine_layers(2, 2.0, 1.0);
    const auto g = InitialData::cone({0, 0});
    const double eps = 0.25, t = 0.3;
    front::ScalarField box;
    box.n = 2;
    box.dims = {641, 641};
    box.origin = {-2, -2};
    box.h = 1.0 / 160.0;
    box.values.assign(641 * 641, 0.0);
    const auto pde = oscillatory_pde(g, m, eps, box, t);
    RepresentationSolver rep(m, eps, t, eps / 16.0);
    for (const Vec& x : {Vec{1.0, 0.0}, Vec{0.0, 1.0}, Vec{-0.7, 0.6}}) {
        const std::size_t i = static_cast<std::size_t>(std::lround((x[0] + 2) * 160));
        const std::size_t j = static_cast<std::size_t>(std::lround((x[1] + 2) * 160));
        CHECK(std::abs(pde.values[j * 641 + i] - rep(g, x)) <= 0.05);
    }
}

TEST_CASE("probe lattice and rate report on a constant medium")
{
    CHECK(probe_lattice(3, 3, Vec{0.5, 0.5, 0.5}).size() == 27);
    CHECK_THROWS_AS(probe_lattice(2, 0, Vec{0, 0}), ValidationError);

    RateOptions o;
    o.eps_list = {0.25, 0.125};
    o.t = 0.5;
    o.probes = probe_lattice(2, 2, Vec{0.5, 0.5});
    const auto r = rate_experiment(InitialData::linear({1, 0}), constant_medium(2, 1.0),
                                   geom::Ball{2, 1.0}, o);
    CHECK(r.errors.size() == 2);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(r.errors[k] <= 2.0 * r.h[k]);
    CHECK(r.to_report().columns.size() == 5);
}

TEST_SUITE("properties")
{
    TEST_CASE("comparison and contraction")
    {
        const auto P = geom::polytope_preset("cross2");
        const auto g1 = InitialData::cone({0, 0});
        const auto g2 = InitialData::function(
            2, [](std::span<const double> x) { return norm(x) + 0.3 + 0.1 * std::sin(x[0]); }, 1.1, "shifted");
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        for (int k = 0; k < 50; ++k) {
            const Vec x{U(rng), U(rng)};
            const double t = 0.5 * (U(rng) + 2.0);
            const double a = hopf_lax_effective(g1, P, x, t), b = hopf_lax_effective(g2, P, x, t);
            CHECK(a <= b + 1e-6);
            CHECK(b - a <= 0.4 + 1e-6);
        }
    }

    TEST_CASE("Hopf-Lax semigroup")
    {
        const auto P = geom::polytope_preset("cross2");
        const auto g = InitialData::cone({0.2, -0.1});
        const double s = 0.4, t = 0.6;
        const auto us = InitialData::function(
            2, [&](std::span<const double> y) { return hopf_lax_effective(g, P, y, s); }, 1.0, "u(s)");
        for (const Vec& x : {Vec{1.5, 0.2}, Vec{-1.0, 1.3}, Vec{0.1, 0.1}})
            CHECK(hopf_lax_effective(us, P, x, t) == doctest::Approx(hopf_lax_effective(g, P, x, s + t)).epsilon(2e-3));
    }

    TEST_CASE("representation formula has finite speed of propagation")
    {
        const Medium m = sine_layers(2, 2.0, 1.0);
        const double eps = 0.25, t = 0.5;
        const auto g = InitialData::cone({0, 0});
        const auto far = InitialData::function(
            2,
            [](std::span<const double> x) {
                const double r = norm(x);
                return r > 2.5 ? r - 2.0 * (r - 2.5) : r;
            },
            1.0, "bent far away");
        RepresentationSolver u(m, eps, t, eps / 8.0);
        const Vec x{0.1, 0.2};
        CHECK(u(g, x) == doctest::Approx(u(far, x)).epsilon(1e-12));
    }

    TEST_CASE("fitted rate is invariant under rescaling the errors")
    {
        const Vec eps{0.25, 0.125, 0.0625, 0.03125};
        Vec e1, e2;
        for (double e : eps) {
            e1.push_back(0.7 * std::pow(e, 0.9));
            e2.push_back(0.07 * std::pow(e, 0.9));
        }
        CHECK(fit_loglog(eps, e1).slope == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(fit_loglog(eps, e2).slope == doctest::Approx(fit_loglog(eps, e1).slope).epsilon(1e-12));
    }
}
