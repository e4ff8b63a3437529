#include <doctest.h>

#include <cmath>
#include <random>

#include "frontforge/cell_solver.hpp"
#include "oracles.hpp"

using namespace frontforge;
using namespace frontforge::cell;

namespace {

Medium cross_env()
{
    env::EnvironmentSpec s;
    s.n = 3;
    s.directions = *geom::polytope_preset("cross3").rational_generators();
    s.base_points = {{0, 0, 0}, {0.5, 0, 0.5}, {0, 0.5, 0}};
    s.delta = 0.2;
    s.amplitude = 4.0;
    return hedlund_medium(s);
}

CellOptions quick(int N)
{
    CellOptions o;
    o.N = N;
    o.tol = 1e-4;
    o.flux = Flux::Godunov;
    return o;
}

}  // namespace

TEST_CASE("Lax-Friedrichs flux: consistency, symmetric gradients, viscosity check")
{
    const Vec p{1, 2, 2}, zero{0, 0, 0}, sigma{2, 2, 2};
    CHECK(numerical_hamiltonian(2.0, p, zero, zero, sigma) == doctest::Approx(6.0));
    const Vec gp{0.3, -0.2, 0.1}, gm{-0.3, 0.2, -0.1};
    CHECK(numerical_hamiltonian(2.0, zero, gm, gp, sigma) == doctest::Approx(-2.0 * (0.3 - 0.2 + 0.1)));
    CHECK_THROWS_AS(numerical_hamiltonian(2.0, p, zero, zero, Vec{1, 2, 2}), ValidationError);
}

TEST_CASE("Godunov flux is consistent and vanishes on a local minimum")
{
    const Vec p{1, 2, 2}, zero{0, 0, 0};
    CHECK(godunov_hamiltonian(2.0, p, zero, zero) == doctest::Approx(6.0));
    CHECK(godunov_hamiltonian(1.0, zero, Vec{-1, -1, -1}, Vec{1, 1, 1}) == 0.0);
}

TEST_CASE("constant medium: hbar = c |p| with either flux")
{
    const Medium m = constant_medium(3, 1.5);
    const Vec p{0.3, -0.4, 1.2};
    for (Flux f : {Flux::Godunov, Flux::LaxFriedrichs}) {
        CellOptions o = quick(16);
        o.flux = f;
        const auto r = solve_cell_large_T(m, p, o);
        CHECK(r.converged);
        CHECK(r.hbar == doctest::Approx(1.5 * norm(p)).epsilon(1e-3));
    }
}

TEST_CASE("stratified oracle against the closed form")
{
    auto a = [](double y) { return 2.0 + std::sin(2.0 * M_PI * y); };
    CHECK(stratified_oracle_H(a, 1.0) == doctest::Approx(oracle::stratified_closed_form(2.0, 1.0, 1.0)).epsilon(1e-10));
    CHECK(stratified_oracle_H([](double) { return 3.0; }, -2.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(stratified_oracle_H(a, 0.0) == 0.0);
}

TEST_CASE("stratified medium on a 2-D grid approaches the closed form")
{
    const Medium m = sine_layers(2, 2.0, 1.0);
    CellOptions o = quick(64);
    const auto r = solve_cell_large_T(m, Vec{1, 0}, o);
    CHECK(r.hbar == doctest::Approx(std::sqrt(3.0)).epsilon(0.03));
}

TEST_CASE("support from an exact polytope and from a sphere cloud")
{
    const auto P = geom::polytope_preset("cross-diag3");
    const Vec p{0.2, -1.0, 0.7};
    CHECK(effective_H_from_shape(P, p) == geom::support(P, p));
    const auto cloud = geom::boundary_samples(geom::ConvexBody(geom::Ball{3, 1.0}), 24);
    CHECK(effective_H_from_shape(cloud, p) == doctest::Approx(norm(p)).epsilon(0.01));
}

TEST_CASE("run stopped at T_max is flagged as not converged")
{
    CellOptions o = quick(16);
    o.T_max = 2.0;
    o.tol = 1e-12;
    const auto r = solve_cell_large_T(cross_env(), Vec{1, 2, 3}, o);
    CHECK_FALSE(r.converged);
    CHECK(std::isfinite(r.hbar));
}

TEST_SUITE("properties")
{
    TEST_CASE("Lax-Friedrichs flux is monotone on random tuples")
    {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> U(-3.0, 3.0), A(0.1, 3.0);
        const double step = 1e-3;
        bool ok = true;
        for (int k = 0; k < 100000; ++k) {
            const double a = A(rng);
            const Vec p{U(rng), U(rng), U(rng)}, gm{U(rng), U(rng), U(rng)}, gp{U(rng), U(rng), U(rng)};
            const Vec sigma{a, a, a};
            const double base = numerical_hamiltonian(a, p, gm, gp, sigma);
            for (int j = 0; j < 3; ++j) {
                Vec up = gp, um = gm;
                up[j] += step;
                um[j] += step;
                ok = ok && numerical_hamiltonian(a, p, gm, up, sigma) <= base + 1e-12;
                ok = ok && numerical_hamiltonian(a, p, um, gp, sigma) >= base - 1e-12;
            }
        }
        CHECK(ok);
    }

    TEST_CASE("hbar is positively homogeneous and even")
    {
        const Medium m = cross_env();
        const CellOptions o = quick(16);
        const Vec p{0.3, 0.5, -0.8};
        const auto base = solve_cell_large_T(m, p, o);
        for (double s : {2.0, 3.0}) {
            const auto r = solve_cell_large_T(m, scaled(p, s), o);
            CHECK(r.hbar == doctest::Approx(s * base.hbar).epsilon(2e-3));
        }
        const auto neg = solve_cell_large_T(m, scaled(p, -1.0), o);
        CHECK(neg.hbar == doctest::Approx(base.hbar).epsilon(2e-3));
    }

    TEST_CASE("hbar is monotone in a and bounded by min a and max a")
    {
        const Medium hed = cross_env();
        const Medium slow = constant_medium(3, hed.lower);
        const Medium fast = constant_medium(3, hed.upper);
        const CellOptions o = quick(16);
        std::mt19937_64 rng(9);
        std::normal_distribution<double> N(0.0, 1.0);
        for (int k = 0; k < 3; ++k) {
            const Vec p{N(rng), N(rng), N(rng)};
            const double h = solve_cell_large_T(hed, p, o).hbar;
            CHECK(solve_cell_large_T(slow, p, o).hbar <= h + o.tol);
            CHECK(h <= solve_cell_large_T(fast, p, o).hbar + o.tol);
            CHECK(h >= hed.lower * norm(p) - o.tol);
            CHECK(h <= hed.upper * norm(p) + o.tol);
        }
    }

    TEST_CASE("grid refinement shrinks successive differences")
    {
        Medium m;
        m.n = 2;
        m.speed = [](std::span<const double> x) { return 2.0 + std::sin(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[1]); };
        m.lower = 1.0;
        m.upper = 3.0;
        Vec h;
        for (int N : {16, 32, 64, 128}) {
            CellOptions o = quick(N);
            o.tol = 1e-5;
            h.push_back(solve_cell_large_T(m, Vec{1, 0.3}, o).hbar);
        }
        CHECK(std::abs(h[2] - h[1]) < std::abs(h[1] - h[0]));
        CHECK(std::abs(h[3] - h[2]) < std::abs(h[2] - h[1]));
    }
}
