#include <doctest.h>

#include <cmath>
#include <random>

#include "frontforge/hedlund_env.hpp"
#include "oracles.hpp"

using namespace frontforge;
using namespace frontforge::env;
using geom::RationalVector;

namespace {

std::vector<RationalVector> axes()
{
    return {RationalVector({1, 0, 0}, 1), RationalVector({0, 1, 0}, 1), RationalVector({0, 0, 1}, 1)};
}

EnvironmentSpec axis_spec(double delta, double A, bool normalized)
{
    EnvironmentSpec s;
    s.n = 3;
    s.directions = axes();
    s.base_points = {{0, 0, 0}, {0.5, 0, 0.5}, {0, 0.5, 0}};
    s.delta = delta;
    s.amplitude = A;
    s.normalized = normalized;
    return s;
}

EnvironmentSpec diag_spec()
{
    EnvironmentSpec s;
    s.n = 3;
    s.directions = {RationalVector({1, 0, 0}, 1), RationalVector({0, 1, 0}, 1), RationalVector({0, 0, 1}, 1),
                    RationalVector({1, 1, 1}, 2)};
    s.delta = 0.1;
    s.base_points = choose_base_points(s.directions, s.delta, 7);
    s.amplitude = 12.0;
    s.normalized = false;
    return s;
}

}  // namespace

TEST_CASE("blend profile matches the closed form and has slope at most 2")
{
    for (double s = -0.5; s <= 1.5; s += 0.01)
        CHECK(blend_profile(s) == doctest::Approx(oracle::blend(s)).epsilon(1e-14));
    CHECK(blend_profile(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(blend_profile(0.0) == 1.0);
    CHECK(blend_profile(1.0) == 0.0);
    double slope = 0.0;
    for (double s = 1e-3; s < 1.0; s += 1e-3)
        slope = std::max(slope, std::abs(oracle::blend(s + 1e-6) - oracle::blend(s - 1e-6)) / 2e-6);
    CHECK(slope == doctest::Approx(blend_profile_max_slope()).epsilon(1e-4));
}

TEST_CASE("distance to a periodic line family")
{
    const PeriodicLineSet e1(RationalVector({1, 0, 0}, 1), Vec{0, 0, 0});
    CHECK(dist_to_periodic_line(Vec{0.5, 0.5, 0.5}, e1) == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK(dist_to_periodic_line(Vec{3.7, 0, 0}, e1) == doctest::Approx(0.0).epsilon(1e-15));
    const PeriodicLineSet diag(RationalVector({1, 1, 0}, 1), Vec{0, 0, 0});
    CHECK(dist_to_periodic_line(Vec{0.5, -0.5, 0}, diag) ==
          doctest::Approx(oracle::brute_line_distance({0.5, -0.5, 0}, {1, 1, 0}, {0, 0, 0}, 3)).epsilon(1e-14));
    CHECK(dist_to_periodic_line(Vec{0.5, -0.5, 0}, diag) < 1e-14);
}

TEST_CASE("period and closing time of a rational direction")
{
    const PeriodicLineSet a(RationalVector({2, 0, 0}, 3), Vec{0, 0, 0});
    CHECK(a.period() == 3);
    CHECK(a.closing_time() == doctest::Approx(1.5));
    const PeriodicLineSet b(RationalVector({1, 1, 1}, 2), Vec{0, 0, 0});
    CHECK(b.closing_time() == doctest::Approx(2.0));
    CHECK(b.orbit_length() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("periodic line distance matches the exact lattice formula")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const std::vector<oracle::I3> dirs = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 1}, {2, 1, 0}, {1, 2, -2}};
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            const oracle::V3 bu{U(rng), U(rng), U(rng)}, bv{U(rng), U(rng), U(rng)};
            const auto& u = dirs[i];
            const auto& v = dirs[j];
            const PeriodicLineSet A(RationalVector({u[0], u[1], u[2]}, 1), Vec(bu.begin(), bu.end()));
            const PeriodicLineSet B(RationalVector({v[0], v[1], v[2]}, 1), Vec(bv.begin(), bv.end()));
            CHECK(periodic_line_distance(A, B) ==
                  doctest::Approx(oracle::line_family_distance(u, bu, v, bv)).epsilon(1e-7));
        }
}

TEST_CASE("validate_tubes on separated, overlapping and grid-scanned configurations")
{
    EnvironmentSpec s = axis_spec(0.1, 1.0, true);
    s.base_points = {{0, 0, 0}, {0.45, 0, 0.45}, {0, 0.45, 0}};
    const auto ok = validate_tubes(s);
    CHECK(ok.disjoint);
    // Each pair is separated by 0.45 in the complementary coordinate.
    CHECK(ok.min_gap == doctest::Approx(0.45 - 0.2).epsilon(1e-6));

    // Brute force: on a grid of spacing delta/10, d_1 + d_2 never drops below the line distance.
    const PeriodicLineSet L1(s.directions[0], s.base_points[0]), L2(s.directions[1], s.base_points[1]);
    double scan = 1e9;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j)
            for (int k = 0; k < 100; ++k) {
                const Vec x{i / 100.0, j / 100.0, k / 100.0};
                scan = std::min(scan, L1.distance(x) + L2.distance(x));
            }
    CHECK(scan == doctest::Approx(periodic_line_distance(L1, L2)).epsilon(1e-2));

    s.delta = 0.3;
    CHECK_FALSE(validate_tubes(s).disjoint);
}

TEST_CASE("choose_base_points: single direction, axes, determinism and failure")
{
    CHECK(choose_base_points({RationalVector({1, 0, 0}, 1)}, 0.2, 1) == std::vector<Vec>{Vec{0, 0, 0}});
    const auto pts = choose_base_points(axes(), 0.2, 7);
    CHECK(pts.size() == 3);
    EnvironmentSpec s = axis_spec(0.2, 1.0, true);
    s.base_points = pts;
    CHECK(validate_tubes(s).disjoint);
    CHECK(choose_base_points(axes(), 0.2, 7) == pts);

    std::vector<RationalVector> dense;
    for (const auto& v : std::vector<std::vector<std::int64_t>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 0},
                                                                 {0, 1, 1}, {0, 1, -1}, {1, 0, 1}, {1, 0, -1}, {1, 1, 1}})
        dense.emplace_back(v, 1);
    CHECK_THROWS_WITH_AS(choose_base_points(dense, 0.33, 1), doctest::Contains("delta too large"), ValidationError);
}

TEST_CASE("evaluate_a on lines, far away and at half the tube radius")
{
    const Environment E(axis_spec(0.2, 10.0, false));
    CHECK(evaluate_a(E, Vec{0.3, 0, 0}) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(evaluate_a(E, Vec{0.25, 0.25, 0.25}) == 1.0);
    CHECK(evaluate_a(E, Vec{0.3, 0.1, 0}) == doctest::Approx(1.0 + 9.0 * 0.5).epsilon(1e-12));
    const Environment N(axis_spec(0.2, 10.0, true));
    CHECK(evaluate_a(N, Vec{0.3, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(evaluate_a(N, Vec{0.25, 0.25, 0.25}) == doctest::Approx(0.1));
}

TEST_CASE("environment validation errors")
{
    EnvironmentSpec s = axis_spec(0.2, 10.0, true);
    s.delta = 0.34;
    CHECK_THROWS_AS(Environment{s}, ValidationError);
    s = axis_spec(0.2, 0.5, true);
    CHECK_THROWS_WITH_AS(Environment{s}, doctest::Contains("A*min|q_i| >= 1"), ValidationError);
    s = axis_spec(0.2, 10.0, true);
    s.base_points[1] = {0.1, 0, 0.1};
    CHECK_THROWS_WITH_AS(Environment{s}, doctest::Contains("tubes intersect"), ValidationError);
}

TEST_CASE("recommended amplitude")
{
    const auto P = geom::polytope_preset("cross3");
    CHECK(recommended_A(P, 0.2) == doctest::Approx(11.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(recommended_A(P, 0.2, 2.0) == doctest::Approx(2.0 * recommended_A(P, 0.2)).epsilon(1e-14));
    const auto tiny = geom::Polytope::from_generators(
        {RationalVector({1, 0, 0}, 1000), RationalVector({0, 1, 0}, 1), RationalVector({0, 0, 1}, 1)});
    // theta = 1/1000 dominates: 11 / theta against 1 / min|q| = 1000.
    CHECK(recommended_A(tiny, 0.2) == doctest::Approx(11000.0));
}

TEST_CASE("ball sequence: cross-polytope first, support errors and tube volume decrease")
{
    const auto seq = ball_approx_sequence({3, 6}, 1);
    REQUIRE(seq.size() == 2);
    CHECK(geom::support(seq[0].polytope, Vec{1, 0, 0}) == doctest::Approx(1.0));
    const double r = 1.0 / std::sqrt(3.0);
    CHECK(std::abs(geom::support(seq[1].polytope, Vec{r, r, r}) - 1.0) <
          std::abs(geom::support(seq[0].polytope, Vec{r, r, r}) - 1.0));
    CHECK(seq[1].sup_support_error < seq[0].sup_support_error);
    CHECK(seq[1].tube_volume < seq[0].tube_volume);
    for (const auto& m : seq)
        CHECK(validate_tubes(m.spec).disjoint);
}

TEST_SUITE("properties")
{
    TEST_CASE("a is Z^n periodic")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        std::uniform_int_distribution<int> K(-5, 5);
        for (const auto& spec : {axis_spec(0.2, 19.0, true), diag_spec()}) {
            const Environment E(spec);
            for (int i = 0; i < 20000; ++i) {
                const Vec x{U(rng), U(rng), U(rng)};
                const Vec y{x[0] + K(rng), x[1] + K(rng), x[2] + K(rng)};
                CHECK(std::abs(E.a(x) - E.a(y)) < 1e-12);
            }
        }
    }

    TEST_CASE("a stays between its floor and peak")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const EnvironmentSpec raw = diag_spec();
        EnvironmentSpec norm_spec = raw;
        norm_spec.normalized = true;
        const Environment E(raw), N(norm_spec);
        double qmax = 0.0;
        for (const auto& q : raw.directions)
            qmax = std::max(qmax, q.length());
        bool ok = true;
        for (int i = 0; i < 1000000; ++i) {
            const Vec x{U(rng), U(rng), U(rng)};
            const double a = E.a(x), b = N.a(x);
            ok = ok && a >= 1.0 && a <= raw.amplitude * qmax + 1e-12;
            ok = ok && b >= 1.0 / raw.amplitude - 1e-15 && b <= qmax + 1e-12;
        }
        CHECK(ok);
    }

    TEST_CASE("finite-difference gradient of a is bounded by the blend slope")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const EnvironmentSpec spec = diag_spec();
        const Environment E(spec);
        double qmax = 0.0;
        for (const auto& q : spec.directions)
            qmax = std::max(qmax, q.length());
        const double bound = (spec.amplitude * qmax - 1.0) * blend_profile_max_slope() / spec.delta + 1e-6;
        const double step = 1e-6;
        for (int i = 0; i < 50000; ++i) {
            const Vec x{U(rng), U(rng), U(rng)};
            double g2 = 0.0;
            for (int d = 0; d < 3; ++d) {
                Vec a = x, b = x;
                a[d] += step;
                b[d] -= step;
                const double g = (E.a(a) - E.a(b)) / (2 * step);
                g2 += g * g;
            }
            CHECK(std::sqrt(g2) <= bound);
        }
    }

    TEST_CASE("a equals A |q_i| exactly on the lines")
    {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> U(-3.0, 3.0);
        std::uniform_int_distribution<int> K(-4, 4);
        const EnvironmentSpec spec = diag_spec();
        const Environment E(spec);
        for (std::size_t i = 0; i < spec.directions.size(); ++i) {
            const Vec q = spec.directions[i].to_real();
            for (int k = 0; k < 500; ++k) {
                const double t = U(rng);
                Vec x = spec.base_points[i];
                for (int d = 0; d < 3; ++d)
                    x[d] += t * q[d] + K(rng);
                CHECK(std::abs(E.a(x) - spec.amplitude * spec.directions[i].length()) < 1e-12);
            }
        }
    }

    TEST_CASE("line distance agrees with a brute-force lattice scan")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> U(-1.0, 2.0);
        const std::vector<std::pair<oracle::V3, oracle::V3>> lines = {
            {{1, 0, 0}, {0.2, 0.3, 0.1}}, {{1, 1, 0}, {0.5, 0.1, 0.7}}, {{0.5, 0.5, 0.5}, {0.3, 0.6, 0.9}}};
        for (const auto& [q, b] : lines) {
            const auto rq = RationalVector::approximate(Vec(q.begin(), q.end()), 16, 1e-12);
            const PeriodicLineSet L(rq, Vec(b.begin(), b.end()));
            for (int k = 0; k < 2000; ++k) {
                const oracle::V3 x{U(rng), U(rng), U(rng)};
                CHECK(L.distance(Vec(x.begin(), x.end())) ==
                      doctest::Approx(oracle::brute_line_distance(x, q, b, 4)).epsilon(1e-12));
            }
        }
    }
}
