#pragma once

// Independent reference values for the tests. Nothing here calls the
// library's geometry or solvers.

#include <array>
#include <cstdint>
#include <vector>

namespace oracle {

using V3 = std::array<double, 3>;
using I3 = std::array<std::int64_t, 3>;

/// Distance between the line families b_u + R u + Z^3 and b_v + R v + Z^3
/// for non-parallel integer directions: with N = u x v and g = gcd(N),
/// dist((b_v - b_u) . N, g Z) / |N|.
double line_family_distance(const I3& u, const V3& bu, const I3& v, const V3& bv);

/// min over |k_i| <= K of the distance from x to the line base + k + R q.
double brute_line_distance(const V3& x, const V3& q, const V3& base, int K);

/// Support of the cube conv{(+-1,+-1,+-1)} (the l1 norm) and of the
/// cross-polytope conv{+-e_i} (the l-infinity norm).
double cube_support(const std::vector<double>& p);
double cross_support(const std::vector<double>& p);

/// max over the listed generators of |q . p|, by direct loops.
double generator_support(const std::vector<std::vector<double>>& q, const std::vector<double>& p);

/// H for a = c + b sin(2 pi y) in the layering direction: sqrt(c^2 - b^2) |p|.
double stratified_closed_form(double c, double b, double p);

/// The blend f(1-s)/(f(s)+f(1-s)), f(s) = exp(-1/s).
double blend(double s);

/// Hausdorff distance by the O(|E||F|) double loop.
double brute_hausdorff(const std::vector<std::vector<double>>& E, const std::vector<std::vector<double>>& F);

/// Effective Hopf-Lax value for linear data p . x and a symmetric polytope
/// with the given support value.
double hopf_lax_linear(const std::vector<double>& p, const std::vector<double>& x, double t, double support_value);

}  // namespace oracle
