#pragma once

// Periodic "highway" environments: a(x) is 1 away from finitely many
// families of rational lines and rises smoothly to A|q_i| on line family i.
// The effective front of the normalized environment a/A is conv{+-q_i}.

#include <cstdint>
#include <string>
#include <vector>

#include "frontforge/common.hpp"
#include "frontforge/convex_geom.hpp"

namespace frontforge::env {

using geom::RationalVector;

inline constexpr const char* kSmoothBump = "smooth_bump_v1";

/// C-infinity blend: 1 at s <= 0, 0 at s >= 1, flat at both ends, chi(1/2) = 1/2.
double blend_profile(double s);
double blend_profile_derivative(double s);
/// max |chi'| over [0,1] (2 for this profile, attained at s = 1/2).
double blend_profile_max_slope();

struct EnvironmentSpec
{
    int n = 3;
    std::vector<RationalVector> directions;
    std::vector<Vec> base_points;
    double delta = 0.2;
    double amplitude = 1.0;
    std::string profile = kSmoothBump;
    bool normalized = true;

    bool operator==(const EnvironmentSpec&) const = default;
};

/// The line family x0 + R q + Z^n, with the lattice translates that pass near
/// the unit cell precomputed.
class PeriodicLineSet
{
  public:
    PeriodicLineSet(RationalVector direction, Vec base);

    const RationalVector& direction() const { return q_; }
    const Vec& base() const { return base_; }
    const Vec& unit_direction() const { return unit_; }
    std::int64_t period() const { return q_.period(); }
    /// Smallest s > 0 with s q integral (the period divided by the gcd of
    /// the numerators).
    double closing_time() const;
    /// Length of one closed orbit on the torus: closing_time * |q|.
    double orbit_length() const { return closing_time() * q_.length(); }

    /// Anchor points (one per distinct translate within sqrt(n) of the cell centre).
    const std::vector<Vec>& translates() const { return anchors_; }

    /// Euclidean distance from x to the nearest translate.
    double distance(std::span<const double> x) const;

  private:
    RationalVector q_;
    Vec base_;
    Vec unit_;
    std::vector<Vec> anchors_;
    std::vector<double> anchor_coords_;
};

double dist_to_periodic_line(std::span<const double> x, const PeriodicLineSet& line);

/// Distance between two periodic line families: one period of `a` is sampled
/// against `b`'s translates and the best samples are refined by golden section.
double periodic_line_distance(const PeriodicLineSet& a, const PeriodicLineSet& b);

struct TubeValidation
{
    bool disjoint = false;
    double min_gap = 0.0;  // min over i != j of (line distance - 2 delta)
};

TubeValidation validate_tubes(const EnvironmentSpec& spec);

/// x_1 = 0; later points sampled uniformly in (0,1)^n and accepted when every
/// pairwise tube gap is at least delta/4. Throws ValidationError after 10^4
/// rejections for one point.
std::vector<Vec> choose_base_points(const std::vector<RationalVector>& directions, double delta, std::uint64_t seed);

/// safety * max{(1 + c/delta)/theta, 1/min|q_i|}; c/delta stands in for the
/// gradient bound of the corrector.
double recommended_A(const geom::Polytope& P, double delta, double safety = 1.0, double c = 2.0);

/// Validated environment with precomputed line sets. Immutable and safe to
/// share between threads.
class Environment
{
  public:
    explicit Environment(EnvironmentSpec spec);

    const EnvironmentSpec& spec() const { return spec_; }
    int dimension() const { return spec_.n; }
    const std::vector<PeriodicLineSet>& lines() const { return lines_; }

    /// a(x), or a(x)/A when normalized. Z^n-periodic.
    double a(std::span<const double> x) const;

    double min_speed() const;
    double max_speed() const;

    /// Expected effective front: conv{+-q_i} (normalized) or conv{+-A q_i}.
    geom::Polytope effective_polytope() const;

    /// Index of the tube containing x, or -1.
    int tube_index(std::span<const double> x) const;

    /// True if a is invariant under reflection through the plane x_axis = plane.
    bool mirror_symmetric(int axis, double plane) const;

    /// Sum over families of (n-1)-ball volume(delta) * orbit length, i.e. the
    /// fraction of the cell covered by tubes.
    double tube_volume() const;

  private:
    EnvironmentSpec spec_;
    std::vector<PeriodicLineSet> lines_;
};

double evaluate_a(const Environment& env, std::span<const double> x);

/// One member of the ball-approximation sequence.
struct BallApproxMember
{
    int m = 0;
    EnvironmentSpec spec;
    geom::Polytope polytope;
    double sup_support_error = 0.0;  // sup over sampled unit p of |support(P_m,p) - 1|
    double tube_volume = 0.0;
};

/// Normalized environments whose fronts approach the unit ball: generators
/// are (a/b) v with v a short primitive integer direction (entries in
/// [-2,2]) and a/b ~ 1/|v| with b <= max_denominator. m = 3 gives the axes.
std::vector<BallApproxMember> ball_approx_sequence(const std::vector<int>& m_values, std::uint64_t seed,
                                                   std::int64_t max_denominator = 64);

/// sup over a fixed Fibonacci sample of the unit sphere of |support(P,p) - 1|.
double sphere_support_error(const geom::Polytope& P, std::size_t samples = 2000);

}  // namespace frontforge::env
