#pragma once

// Centrally symmetric polytopes, convex hulls, support functions and
// Hausdorff-type distances between point clouds.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <memory>
#include <vector>

#include "frontforge/common.hpp"

namespace frontforge::geom {

/// Exact rational vector: integer numerators over one positive denominator,
/// kept in lowest terms.
class RationalVector
{
  public:
    RationalVector() = default;
    RationalVector(std::vector<std::int64_t> numerators, std::int64_t denominator);

    /// Best approximation of v with a common denominator <= max_denominator.
    /// Throws ValidationError if no denominator gets every component within tol.
    static RationalVector approximate(std::span<const double> v, std::int64_t max_denominator, double tol);

    std::size_t dimension() const { return num_.size(); }
    const std::vector<std::int64_t>& numerators() const { return num_; }
    std::int64_t denominator() const { return den_; }

    /// Smallest positive integer M with M*q integral (equals the reduced denominator).
    std::int64_t period() const { return den_; }

    Vec to_real() const;
    double length() const;
    bool is_zero() const;

    bool operator==(const RationalVector&) const = default;

  private:
    std::vector<std::int64_t> num_;
    std::int64_t den_ = 1;
};

/// Row-major flat point storage.
class PointCloud
{
  public:
    explicit PointCloud(int dimension = 0) : n_(dimension) {}
    PointCloud(int dimension, std::vector<double> coords);
    static PointCloud from_points(const std::vector<Vec>& points);

    int dimension() const { return n_; }
    std::size_t size() const { return n_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(n_); }
    bool empty() const { return size() == 0; }
    std::span<const double> point(std::size_t i) const
    {
        return {coords_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
    }
    void push_back(std::span<const double> x);
    void clear() { coords_.clear(); }
    void reserve(std::size_t count) { coords_.reserve(count * static_cast<std::size_t>(n_)); }
    const std::vector<double>& coords() const { return coords_; }
    PointCloud scaled(double s) const;

  private:
    int n_;
    std::vector<double> coords_;
};

/// One boundary piece of a hull: unit outward normal, plane offset
/// (normal . x = offset on the piece) and the vertex indices of the simplex
/// (triangle in 3-D, segment in 2-D).
struct Facet
{
    Vec normal;
    double offset = 0.0;
    std::vector<std::size_t> vertices;
};

struct ConvexHull
{
    int n = 0;
    std::vector<Vec> points;  // hull input points; facets index into this list
    std::vector<Facet> facets;
    double scale = 1.0;       // max |coordinate|, for relative tolerances

    double tolerance() const { return 1e-12 * scale; }
};

/// Facet enumeration for n in {2, 3}. Orientation predicates are evaluated in
/// integer arithmetic when every point is given exactly. Throws
/// ValidationError("degenerate hull") when the points do not span R^n.
ConvexHull convex_hull(const std::vector<Vec>& points, int n);
ConvexHull convex_hull(const std::vector<RationalVector>& points);
ConvexHull convex_hull(const PointCloud& cloud);

/// Centrally symmetric polytope conv{+-q_1, ..., +-q_m}, one generator per
/// antipodal pair.
class Polytope
{
  public:
    static Polytope from_generators(std::vector<RationalVector> generators);
    static Polytope from_real_generators(std::vector<Vec> generators);

    int dimension() const { return n_; }
    std::size_t generator_count() const { return gens_.size(); }
    const std::vector<Vec>& generators() const { return gens_; }
    const std::optional<std::vector<RationalVector>>& rational_generators() const { return rational_; }

    /// All 2m vertices, ordered q_1, -q_1, q_2, -q_2, ...
    std::vector<Vec> vertices() const;

    bool has_facets() const { return hull_.has_value(); }
    const ConvexHull& hull() const;
    const std::vector<Facet>& facets() const { return hull().facets; }

    double circumradius() const;
    Polytope scaled(double s) const;

  private:
    Polytope() = default;
    void finish();

    int n_ = 0;
    std::vector<Vec> gens_;
    std::optional<std::vector<RationalVector>> rational_;
    std::optional<ConvexHull> hull_;
};

/// Named presets: "cross3", "cube3", "cross-diag3" (cross-polytope plus
/// +-(1,1,1)/2), "cross2", "square2".
Polytope polytope_preset(const std::string& name);

double support(const Polytope& P, std::span<const double> p);

/// min over unit p of support(P, p). Exact from facets for n <= 3; for n >= 4
/// approximated by quasi-random direction sampling plus local descent.
double inradius_theta(const Polytope& P);

bool contains(const ConvexHull& hull, std::span<const double> x, double tol);
bool contains(const Polytope& P, std::span<const double> x, double tol);

/// Euclidean distance from x to the hull (0 inside).
double distance_to(const ConvexHull& hull, std::span<const double> x);
double distance_to(const Polytope& P, std::span<const double> x);

/// Vertices plus a barycentric lattice of `resolution` steps on every facet.
PointCloud boundary_samples(const ConvexHull& hull, int resolution);

/// Euclidean ball, used for constant media where the limit shape is round.
struct Ball
{
    int n = 3;
    double radius = 1.0;
};

using ConvexBody = std::variant<Polytope, Ball>;

int dimension(const ConvexBody& body);
double support(const ConvexBody& body, std::span<const double> p);
double distance_to(const ConvexBody& body, std::span<const double> x);
bool contains(const ConvexBody& body, std::span<const double> x, double tol);
PointCloud boundary_samples(const ConvexBody& body, int resolution);

/// R-tree nearest-neighbour index for clouds in dimension <= 3.
class PointIndex
{
  public:
    explicit PointIndex(const PointCloud& cloud);
    double nearest_distance(std::span<const double> x) const;

  private:
    struct Tree;
    int n_ = 0;
    std::shared_ptr<const Tree> tree_;
};

/// sup over x in E of dist(x, F): the smallest s with E subset of F + B_s.
double directed_deficit(const PointCloud& E, const PointCloud& F);

/// Hausdorff distance max(deficit(E,F), deficit(F,E)).
double hausdorff(const PointCloud& E, const PointCloud& F);

/// Integer rank of a set of real vectors (tolerance relative to their scale).
int rank(const std::vector<Vec>& vectors, int n);

}  // namespace frontforge::geom
