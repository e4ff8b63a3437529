#include "frontforge/convex_geom.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace frontforge::geom {

namespace {

constexpr const char* kModule = "convex_geom";

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

using i128 = __int128;

}  // namespace

// --- RationalVector --------------------------------------------------------

RationalVector::RationalVector(std::vector<std::int64_t> numerators, std::int64_t denominator)
  : num_(std::move(numerators)), den_(denominator)
{
    if (den_ == 0)
        throw ValidationError(kModule, "rational vector with zero denominator");
    if (den_ < 0) {
        den_ = -den_;
        for (auto& v : num_)
            v = -v;
    }
    std::int64_t g = den_;
    for (auto v : num_)
        g = gcd64(g, v);
    if (g > 1) {
        den_ /= g;
        for (auto& v : num_)
            v /= g;
    }
}

RationalVector RationalVector::approximate(std::span<const double> v, std::int64_t max_denominator, double tol)
{
    for (std::int64_t d = 1; d <= max_denominator; ++d) {
        std::vector<std::int64_t> num(v.size());
        double err = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            num[i] = static_cast<std::int64_t>(std::llround(v[i] * static_cast<double>(d)));
            err = std::max(err, std::abs(v[i] - static_cast<double>(num[i]) / static_cast<double>(d)));
        }
        if (err <= tol)
            return RationalVector(std::move(num), d);
    }
    throw ValidationError(kModule, "no rational approximation within " + std::to_string(tol) +
                                       " at denominator bound " + std::to_string(max_denominator) +
                                       "; try a larger bound such as " + std::to_string(4 * max_denominator));
}

Vec RationalVector::to_real() const
{
    Vec r(num_.size());
    for (std::size_t i = 0; i < num_.size(); ++i)
        r[i] = static_cast<double>(num_[i]) / static_cast<double>(den_);
    return r;
}

double RationalVector::length() const { return norm(to_real()); }

bool RationalVector::is_zero() const
{
    return std::all_of(num_.begin(), num_.end(), [](auto v) { return v == 0; });
}

// --- PointCloud ------------------------------------------------------------

PointCloud::PointCloud(int dimension, std::vector<double> coords) : n_(dimension), coords_(std::move(coords))
{
    if (n_ <= 0 || coords_.size() % static_cast<std::size_t>(n_) != 0)
        throw ValidationError(kModule, "point cloud coordinate count not a multiple of the dimension");
}

PointCloud PointCloud::from_points(const std::vector<Vec>& points)
{
    if (points.empty())
        return PointCloud(0);
    PointCloud c(static_cast<int>(points.front().size()));
    c.reserve(points.size());
    for (const auto& p : points)
        c.push_back(p);
    return c;
}

void PointCloud::push_back(std::span<const double> x)
{
    if (static_cast<int>(x.size()) != n_)
        throw ValidationError(kModule, "point dimension mismatch");
    coords_.insert(coords_.end(), x.begin(), x.end());
}

PointCloud PointCloud::scaled(double s) const
{
    PointCloud c(n_);
    c.coords_ = coords_;
    for (auto& v : c.coords_)
        v *= s;
    return c;
}

// --- hull ------------------------------------------------------------------

namespace {

/// Orientation tests, exact when integer coordinates are available.
struct Predicates
{
    const std::vector<Vec>* pts = nullptr;
    std::vector<std::array<std::int64_t, 3>> ints;
    bool exact = false;
    double tol = 0.0;

    int orient3(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const
    {
        if (exact) {
            const auto& A = ints[a];
            i128 u[3], v[3], w[3];
            for (int k = 0; k < 3; ++k) {
                u[k] = static_cast<i128>(ints[b][k]) - A[k];
                v[k] = static_cast<i128>(ints[c][k]) - A[k];
                w[k] = static_cast<i128>(ints[d][k]) - A[k];
            }
            const i128 det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
                             u[2] * (v[0] * w[1] - v[1] * w[0]);
            return det > 0 ? 1 : (det < 0 ? -1 : 0);
        }
        const auto& P = *pts;
        double u[3], v[3], w[3];
        for (int k = 0; k < 3; ++k) {
            u[k] = P[b][k] - P[a][k];
            v[k] = P[c][k] - P[a][k];
            w[k] = P[d][k] - P[a][k];
        }
        const double nx = u[1] * v[2] - u[2] * v[1];
        const double ny = u[2] * v[0] - u[0] * v[2];
        const double nz = u[0] * v[1] - u[1] * v[0];
        const double nn = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (nn == 0.0)
            return 0;
        const double dist = (nx * w[0] + ny * w[1] + nz * w[2]) / nn;
        return dist > tol ? 1 : (dist < -tol ? -1 : 0);
    }

    int orient2(std::size_t a, std::size_t b, std::size_t c) const
    {
        if (exact) {
            const i128 det = (static_cast<i128>(ints[b][0]) - ints[a][0]) * (static_cast<i128>(ints[c][1]) - ints[a][1]) -
                             (static_cast<i128>(ints[b][1]) - ints[a][1]) * (static_cast<i128>(ints[c][0]) - ints[a][0]);
            return det > 0 ? 1 : (det < 0 ? -1 : 0);
        }
        const auto& P = *pts;
        const double ux = P[b][0] - P[a][0], uy = P[b][1] - P[a][1];
        const double wx = P[c][0] - P[a][0], wy = P[c][1] - P[a][1];
        const double len = std::hypot(ux, uy);
        if (len == 0.0)
            return 0;
        const double dist = (ux * wy - uy * wx) / len;
        return dist > tol ? 1 : (dist < -tol ? -1 : 0);
    }

    bool same_point(std::size_t a, std::size_t b) const
    {
        if (exact)
            return ints[a] == ints[b];
        return distance((*pts)[a], (*pts)[b]) <= tol;
    }
};

Facet make_facet_3d(const std::vector<Vec>& P, std::size_t a, std::size_t b, std::size_t c)
{
    const Vec u = sub(P[b], P[a]);
    const Vec v = sub(P[c], P[a]);
    Vec nrm{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    const double len = norm(nrm);
    for (auto& x : nrm)
        x /= len;
    Facet f;
    f.offset = dot(nrm, P[a]);
    f.normal = std::move(nrm);
    f.vertices = {a, b, c};
    return f;
}

std::vector<Facet> hull_3d(const std::vector<Vec>& P, const Predicates& pr)
{
    const std::size_t N = P.size();
    if (N < 4)
        throw ValidationError(kModule, "degenerate hull: fewer than 4 points in 3-D");
    std::size_t i0 = 0, i1 = N, i2 = N, i3 = N;
    double best = -1.0;
    for (std::size_t i = 1; i < N; ++i) {
        if (pr.same_point(i0, i))
            continue;
        const double d = distance(P[i0], P[i]);
        if (d > best) {
            best = d;
            i1 = i;
        }
    }
    if (i1 == N)
        throw ValidationError(kModule, "degenerate hull: all points coincide");
    for (std::size_t i = 0; i < N && i2 == N; ++i) {
        if (i == i0 || i == i1)
            continue;
        // collinear iff orient3 vanishes against every axis-offset probe; test the cross product
        const Vec u = sub(P[i1], P[i0]);
        const Vec w = sub(P[i], P[i0]);
        bool collinear;
        if (pr.exact) {
            i128 cx[3];
            const auto& A = pr.ints[i0];
            i128 uu[3], ww[3];
            for (int k = 0; k < 3; ++k) {
                uu[k] = static_cast<i128>(pr.ints[i1][k]) - A[k];
                ww[k] = static_cast<i128>(pr.ints[i][k]) - A[k];
            }
            cx[0] = uu[1] * ww[2] - uu[2] * ww[1];
            cx[1] = uu[2] * ww[0] - uu[0] * ww[2];
            cx[2] = uu[0] * ww[1] - uu[1] * ww[0];
            collinear = cx[0] == 0 && cx[1] == 0 && cx[2] == 0;
        } else {
            const Vec c{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
            collinear = norm(c) <= pr.tol * (norm(u) + 1.0);
        }
        if (!collinear)
            i2 = i;
    }
    if (i2 == N)
        throw ValidationError(kModule, "degenerate hull: all points collinear");
    for (std::size_t i = 0; i < N && i3 == N; ++i) {
        if (i == i0 || i == i1 || i == i2)
            continue;
        if (pr.orient3(i0, i1, i2, i) != 0)
            i3 = i;
    }
    if (i3 == N)
        throw ValidationError(kModule, "degenerate hull: all points coplanar");

    std::vector<std::array<std::size_t, 3>> faces;
    std::vector<char> alive;
    auto add_face = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t inside) {
        if (pr.orient3(a, b, c, inside) > 0)
            std::swap(b, c);
        faces.push_back({a, b, c});
        alive.push_back(1);
    };
    add_face(i0, i1, i2, i3);
    add_face(i0, i1, i3, i2);
    add_face(i0, i2, i3, i1);
    add_face(i1, i2, i3, i0);

    std::vector<std::size_t> visible;
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t p = 0; p < N; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3)
            continue;
        visible.clear();
        for (std::size_t f = 0; f < faces.size(); ++f)
            if (alive[f] && pr.orient3(faces[f][0], faces[f][1], faces[f][2], p) > 0)
                visible.push_back(f);
        if (visible.empty())
            continue;
        edges.clear();
        for (auto f : visible)
            for (int k = 0; k < 3; ++k)
                edges.insert({faces[f][k], faces[f][(k + 1) % 3]});
        for (auto f : visible) {
            alive[f] = 0;
            for (int k = 0; k < 3; ++k) {
                const auto u = faces[f][k];
                const auto v = faces[f][(k + 1) % 3];
                if (!edges.count({v, u})) {
                    faces.push_back({u, v, p});
                    alive.push_back(1);
                }
            }
        }
    }

    std::vector<Facet> out;
    for (std::size_t f = 0; f < faces.size(); ++f)
        if (alive[f])
            out.push_back(make_facet_3d(P, faces[f][0], faces[f][1], faces[f][2]));
    return out;
}

std::vector<Facet> hull_2d(const std::vector<Vec>& P, const Predicates& pr)
{
    const std::size_t N = P.size();
    std::vector<std::size_t> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        if (pr.exact)
            return pr.ints[a] < pr.ints[b];
        return P[a][0] < P[b][0] || (P[a][0] == P[b][0] && P[a][1] < P[b][1]);
    });
    std::vector<std::size_t> h(2 * N);
    std::size_t k = 0;
    for (std::size_t i = 0; i < N; ++i) {
        while (k >= 2 && pr.orient2(h[k - 2], h[k - 1], idx[i]) <= 0)
            --k;
        h[k++] = idx[i];
    }
    for (std::size_t i = N - 1, t = k + 1; i-- > 0;) {
        while (k >= t && pr.orient2(h[k - 2], h[k - 1], idx[i]) <= 0)
            --k;
        h[k++] = idx[i];
    }
    h.resize(k > 0 ? k - 1 : 0);
    if (h.size() < 3)
        throw ValidationError(kModule, "degenerate hull: all points collinear");
    std::vector<Facet> out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto a = h[i];
        const auto b = h[(i + 1) % h.size()];
        const double dx = P[b][0] - P[a][0], dy = P[b][1] - P[a][1];
        const double len = std::hypot(dx, dy);
        Facet f;
        f.normal = {dy / len, -dx / len};
        f.offset = dot(f.normal, P[a]);
        f.vertices = {a, b};
        out.push_back(std::move(f));
    }
    return out;
}

double coordinate_scale(const std::vector<Vec>& P)
{
    double s = 0.0;
    for (const auto& p : P)
        for (auto v : p)
            s = std::max(s, std::abs(v));
    return s > 0.0 ? s : 1.0;
}

ConvexHull build_hull(std::vector<Vec> points, int n, std::vector<std::array<std::int64_t, 3>> ints, bool exact)
{
    if (n != 2 && n != 3)
        throw ValidationError(kModule, "facet enumeration supports n in {2,3}, got n=" + std::to_string(n));
    for (const auto& p : points)
        if (static_cast<int>(p.size()) != n)
            throw ValidationError(kModule, "dimension mismatch in hull input");
    if (static_cast<int>(points.size()) < n + 1)
        throw ValidationError(kModule, "degenerate hull: need at least n+1 points");
    ConvexHull hull;
    hull.n = n;
    hull.scale = coordinate_scale(points);
    hull.points = std::move(points);
    Predicates pr;
    pr.pts = &hull.points;
    pr.ints = std::move(ints);
    pr.exact = exact;
    pr.tol = hull.tolerance();
    hull.facets = n == 3 ? hull_3d(hull.points, pr) : hull_2d(hull.points, pr);
    return hull;
}

}  // namespace

ConvexHull convex_hull(const std::vector<Vec>& points, int n) { return build_hull(points, n, {}, false); }

ConvexHull convex_hull(const PointCloud& cloud)
{
    std::vector<Vec> pts;
    pts.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        pts.emplace_back(cloud.point(i).begin(), cloud.point(i).end());
    return convex_hull(pts, cloud.dimension());
}

ConvexHull convex_hull(const std::vector<RationalVector>& points)
{
    if (points.empty())
        throw ValidationError(kModule, "degenerate hull: no points");
    const int n = static_cast<int>(points.front().dimension());
    // Common denominator; fall back to floating predicates if it would overflow.
    std::int64_t L = 1;
    bool exact = true;
    for (const auto& q : points) {
        const std::int64_t d = q.denominator();
        const std::int64_t g = std::gcd(L, d);
        if (L / g > (std::int64_t{1} << 40) / d) {
            exact = false;
            break;
        }
        L = L / g * d;
    }
    std::vector<std::array<std::int64_t, 3>> ints;
    std::vector<Vec> reals;
    for (const auto& q : points) {
        if (static_cast<int>(q.dimension()) != n)
            throw ValidationError(kModule, "dimension mismatch in hull input");
        reals.push_back(q.to_real());
        if (exact) {
            std::array<std::int64_t, 3> c{0, 0, 0};
            for (int k = 0; k < n && k < 3; ++k) {
                const i128 v = static_cast<i128>(q.numerators()[static_cast<std::size_t>(k)]) * (L / q.denominator());
                if (v > (i128{1} << 60) || v < -(i128{1} << 60))
                    exact = false;
                c[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(v);
            }
            ints.push_back(c);
        }
    }
    if (!exact)
        ints.clear();
    return build_hull(std::move(reals), n, std::move(ints), exact);
}

// --- Polytope --------------------------------------------------------------

int rank(const std::vector<Vec>& vectors, int n)
{
    std::vector<Vec> m = vectors;
    double scale = 0.0;
    for (const auto& v : m)
        for (auto x : v)
            scale = std::max(scale, std::abs(x));
    if (scale == 0.0)
        return 0;
    const double tol = 1e-10 * scale;
    int r = 0;
    for (int col = 0; col < n && r < static_cast<int>(m.size()); ++col) {
        std::size_t piv = static_cast<std::size_t>(r);
        for (std::size_t i = static_cast<std::size_t>(r); i < m.size(); ++i)
            if (std::abs(m[i][static_cast<std::size_t>(col)]) > std::abs(m[piv][static_cast<std::size_t>(col)]))
                piv = i;
        if (std::abs(m[piv][static_cast<std::size_t>(col)]) <= tol)
            continue;
        std::swap(m[piv], m[static_cast<std::size_t>(r)]);
        for (std::size_t i = static_cast<std::size_t>(r) + 1; i < m.size(); ++i) {
            const double f = m[i][static_cast<std::size_t>(col)] / m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            for (int k = col; k < n; ++k)
                m[i][static_cast<std::size_t>(k)] -= f * m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
        }
        ++r;
    }
    return r;
}

Polytope Polytope::from_generators(std::vector<RationalVector> generators)
{
    if (generators.empty())
        throw ValidationError(kModule, "polytope needs at least one generator");
    Polytope P;
    P.n_ = static_cast<int>(generators.front().dimension());
    for (const auto& g : generators) {
        if (static_cast<int>(g.dimension()) != P.n_)
            throw ValidationError(kModule, "generator dimension mismatch");
        if (g.is_zero())
            throw ValidationError(kModule, "zero generator");
        P.gens_.push_back(g.to_real());
    }
    // Exact non-parallel test: q_i, q_j parallel iff all 2x2 minors of their numerators vanish.
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            const auto& a = generators[i].numerators();
            const auto& b = generators[j].numerators();
            bool parallel = true;
            for (std::size_t k = 0; k < a.size() && parallel; ++k)
                for (std::size_t l = k + 1; l < a.size() && parallel; ++l)
                    if (static_cast<i128>(a[k]) * b[l] != static_cast<i128>(a[l]) * b[k])
                        parallel = false;
            if (parallel)
                throw ValidationError(kModule, "generators " + std::to_string(i) + " and " + std::to_string(j) +
                                                   " are parallel");
        }
    P.rational_ = std::move(generators);
    P.finish();
    return P;
}

Polytope Polytope::from_real_generators(std::vector<Vec> generators)
{
    if (generators.empty())
        throw ValidationError(kModule, "polytope needs at least one generator");
    Polytope P;
    P.n_ = static_cast<int>(generators.front().size());
    for (const auto& g : generators) {
        if (static_cast<int>(g.size()) != P.n_)
            throw ValidationError(kModule, "generator dimension mismatch");
        if (norm(g) == 0.0)
            throw ValidationError(kModule, "zero generator");
    }
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            const double c = std::abs(dot(generators[i], generators[j])) / (norm(generators[i]) * norm(generators[j]));
            if (c > 1.0 - 1e-12)
                throw ValidationError(kModule, "generators " + std::to_string(i) + " and " + std::to_string(j) +
                                                   " are parallel");
        }
    P.gens_ = std::move(generators);
    P.finish();
    return P;
}

void Polytope::finish()
{
    if (n_ < 2)
        throw ValidationError(kModule, "polytope dimension must be >= 2");
    if (rank(gens_, n_) < n_)
        throw ValidationError(kModule, "empty interior: generators do not span R^" + std::to_string(n_));
    if (n_ > 3)
        return;
    if (rational_) {
        std::vector<RationalVector> pts;
        for (const auto& q : *rational_) {
            pts.push_back(q);
            auto neg = q.numerators();
            for (auto& v : neg)
                v = -v;
            pts.emplace_back(std::move(neg), q.denominator());
        }
        hull_ = convex_hull(pts);
    } else {
        hull_ = convex_hull(vertices(), n_);
    }
}

std::vector<Vec> Polytope::vertices() const
{
    std::vector<Vec> v;
    v.reserve(2 * gens_.size());
    for (const auto& g : gens_) {
        v.push_back(g);
        v.push_back(frontforge::scaled(g, -1.0));
    }
    return v;
}

const ConvexHull& Polytope::hull() const
{
    if (!hull_)
        throw ValidationError(kModule, "polytope in dimension " + std::to_string(n_) + " has no facet list");
    return *hull_;
}

double Polytope::circumradius() const
{
    double r = 0.0;
    for (const auto& g : gens_)
        r = std::max(r, norm(g));
    return r;
}

Polytope Polytope::scaled(double s) const
{
    std::vector<Vec> g;
    for (const auto& q : gens_)
        g.push_back(frontforge::scaled(q, s));
    return from_real_generators(std::move(g));
}

Polytope polytope_preset(const std::string& name)
{
    auto rv = [](std::vector<std::int64_t> num, std::int64_t den) { return RationalVector(std::move(num), den); };
    if (name == "cross3")
        return Polytope::from_generators({rv({1, 0, 0}, 1), rv({0, 1, 0}, 1), rv({0, 0, 1}, 1)});
    if (name == "cube3")
        return Polytope::from_generators({rv({1, 1, 1}, 1), rv({1, 1, -1}, 1), rv({1, -1, 1}, 1), rv({-1, 1, 1}, 1)});
    if (name == "cross-diag3")
        return Polytope::from_generators({rv({1, 0, 0}, 1), rv({0, 1, 0}, 1), rv({0, 0, 1}, 1), rv({1, 1, 1}, 2)});
    if (name == "cross2")
        return Polytope::from_generators({rv({1, 0}, 1), rv({0, 1}, 1)});
    if (name == "square2")
        return Polytope::from_generators({rv({1, 1}, 1), rv({1, -1}, 1)});
    throw ValidationError(kModule, "unknown polytope preset '" + name + "'");
}

double support(const Polytope& P, std::span<const double> p)
{
    if (static_cast<int>(p.size()) != P.dimension())
        throw ValidationError(kModule, "support: dimension mismatch (" + std::to_string(p.size()) + " vs " +
                                           std::to_string(P.dimension()) + ")");
    double s = 0.0;
    for (const auto& q : P.generators())
        s = std::max(s, std::abs(dot(q, p)));
    return s;
}

namespace {

/// Quasi-random unit directions from a Halton sequence mapped through the
/// inverse normal CDF.
std::vector<Vec> halton_directions(int n, std::size_t count)
{
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t i = 1; out.size() < count; ++i) {
        Vec d(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            double f = 1.0, r = 0.0;
            for (std::size_t j = i; j > 0; j /= static_cast<std::size_t>(primes[k % 12])) {
                f /= primes[k % 12];
                r += f * static_cast<double>(j % static_cast<std::size_t>(primes[k % 12]));
            }
            d[static_cast<std::size_t>(k)] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * r - 1.0);
        }
        const double l = norm(d);
        if (l > 0.0) {
            for (auto& x : d)
                x /= l;
            out.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace

double inradius_theta(const Polytope& P)
{
    if (P.has_facets()) {
        double th = std::numeric_limits<double>::infinity();
        for (const auto& f : P.facets())
            th = std::min(th, std::abs(f.offset));
        if (!(th > 0.0))
            throw ValidationError(kModule, "empty interior");
        return th;
    }
    // Approximation for n >= 4: sample, then a shrinking-step random descent
    // from the best few directions.
    const int n = P.dimension();
    auto dirs = halton_directions(n, 100000);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(dirs.size());
    for (std::size_t i = 0; i < dirs.size(); ++i)
        scored.emplace_back(support(P, dirs[i]), i);
    std::partial_sort(scored.begin(), scored.begin() + 8, scored.end());
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss;
    double best = scored.front().first;
    for (int s = 0; s < 8; ++s) {
        Vec x = dirs[scored[static_cast<std::size_t>(s)].second];
        double fx = scored[static_cast<std::size_t>(s)].first;
        for (double step = 0.05; step > 1e-9; step *= 0.7)
            for (int trial = 0; trial < 40; ++trial) {
                Vec y = x;
                for (auto& v : y)
                    v += step * gauss(rng);
                const double l = norm(y);
                for (auto& v : y)
                    v /= l;
                const double fy = support(P, y);
                if (fy < fx) {
                    x = std::move(y);
                    fx = fy;
                }
            }
        best = std::min(best, fx);
    }
    if (!(best > 0.0))
        throw ValidationError(kModule, "empty interior");
    return best;
}

bool contains(const ConvexHull& hull, std::span<const double> x, double tol)
{
    for (const auto& f : hull.facets)
        if (dot(f.normal, x) > f.offset + tol)
            return false;
    return true;
}

bool contains(const Polytope& P, std::span<const double> x, double tol) { return contains(P.hull(), x, tol); }

namespace {

double point_segment_distance(std::span<const double> x, const Vec& a, const Vec& b)
{
    const Vec ab = sub(b, a);
    const Vec ax = sub(x, a);
    const double t = std::clamp(dot(ax, ab) / dot(ab, ab), 0.0, 1.0);
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - (a[k] + t * ab[k]);
        s += d * d;
    }
    return std::sqrt(s);
}

// Closest point on triangle, Ericson "Real-Time Collision Detection" 5.1.5.
double point_triangle_distance(std::span<const double> p, const Vec& a, const Vec& b, const Vec& c)
{
    const Vec ab = sub(b, a), ac = sub(c, a), ap = sub(p, a);
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0)
        return norm(ap);
    const Vec bp = sub(p, b);
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3)
        return norm(bp);
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0)
        return point_segment_distance(p, a, b);
    const Vec cp = sub(p, c);
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6)
        return norm(cp);
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0)
        return point_segment_distance(p, a, c);
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return point_segment_distance(p, b, c);
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double d = p[k] - (a[k] + ab[k] * v + ac[k] * w);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double distance_to(const ConvexHull& hull, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != hull.n)
        throw ValidationError(kModule, "distance_to: dimension mismatch");
    if (contains(hull, x, 0.0))
        return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : hull.facets) {
        // Only facets whose plane separates x can hold the closest point.
        if (dot(f.normal, x) <= f.offset)
            continue;
        const auto& P = hull.points;
        const double d = hull.n == 3 ? point_triangle_distance(x, P[f.vertices[0]], P[f.vertices[1]], P[f.vertices[2]])
                                     : point_segment_distance(x, P[f.vertices[0]], P[f.vertices[1]]);
        best = std::min(best, d);
    }
    return best;
}

double distance_to(const Polytope& P, std::span<const double> x) { return distance_to(P.hull(), x); }

PointCloud boundary_samples(const ConvexHull& hull, int resolution)
{
    PointCloud out(hull.n);
    const int k = std::max(1, resolution);
    Vec x(static_cast<std::size_t>(hull.n));
    for (const auto& f : hull.facets) {
        const auto& a = hull.points[f.vertices[0]];
        const auto& b = hull.points[f.vertices[1]];
        if (hull.n == 2) {
            for (int i = 0; i <= k; ++i) {
                const double s = static_cast<double>(i) / k;
                for (std::size_t d = 0; d < 2; ++d)
                    x[d] = a[d] + s * (b[d] - a[d]);
                out.push_back(x);
            }
            continue;
        }
        const auto& c = hull.points[f.vertices[2]];
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j) {
                const double s = static_cast<double>(i) / k, t = static_cast<double>(j) / k;
                for (std::size_t d = 0; d < 3; ++d)
                    x[d] = a[d] + s * (b[d] - a[d]) + t * (c[d] - a[d]);
                out.push_back(x);
            }
    }
    return out;
}

// --- ConvexBody ------------------------------------------------------------

int dimension(const ConvexBody& body)
{
    return std::visit(
        [](const auto& b) {
            if constexpr (std::is_same_v<std::decay_t<decltype(b)>, Ball>)
                return b.n;
            else
                return b.dimension();
        },
        body);
}

double support(const ConvexBody& body, std::span<const double> p)
{
    if (const auto* ball = std::get_if<Ball>(&body))
        return ball->radius * norm(p);
    return support(std::get<Polytope>(body), p);
}

double distance_to(const ConvexBody& body, std::span<const double> x)
{
    if (const auto* ball = std::get_if<Ball>(&body))
        return std::max(0.0, norm(x) - ball->radius);
    return distance_to(std::get<Polytope>(body), x);
}

bool contains(const ConvexBody& body, std::span<const double> x, double tol)
{
    if (const auto* ball = std::get_if<Ball>(&body))
        return norm(x) <= ball->radius + tol;
    return contains(std::get<Polytope>(body), x, tol);
}

PointCloud boundary_samples(const ConvexBody& body, int resolution)
{
    if (const auto* ball = std::get_if<Ball>(&body)) {
        PointCloud out(ball->n);
        const int k = std::max(1, resolution);
        if (ball->n == 2) {
            for (int i = 0; i < 8 * k; ++i) {
                const double a = 2.0 * M_PI * i / (8.0 * k);
                const double x[2] = {ball->radius * std::cos(a), ball->radius * std::sin(a)};
                out.push_back(x);
            }
            return out;
        }
        // Fibonacci sphere.
        const std::size_t count = static_cast<std::size_t>(8 * k * k);
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            const double r = std::sqrt(1.0 - z * z);
            const double a = golden * static_cast<double>(i);
            const double x[3] = {ball->radius * r * std::cos(a), ball->radius * r * std::sin(a), ball->radius * z};
            out.push_back(x);
        }
        return out;
    }
    return boundary_samples(std::get<Polytope>(body).hull(), resolution);
}

// --- nearest neighbours and Hausdorff distances ------------------------------

struct PointIndex::Tree
{
    using Point = bg::model::point<double, 3, bg::cs::cartesian>;
    bgi::rtree<Point, bgi::quadratic<16>> rtree;
};

PointIndex::PointIndex(const PointCloud& cloud)
{
    if (cloud.empty())
        throw ValidationError(kModule, "point index over an empty cloud");
    n_ = cloud.dimension();
    if (n_ > 3)
        throw ValidationError(kModule, "point index supports n <= 3");
    std::vector<Tree::Point> pts;
    pts.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        pts.emplace_back(p[0], n_ > 1 ? p[1] : 0.0, n_ > 2 ? p[2] : 0.0);
    }
    auto tree = std::make_shared<Tree>();
    tree->rtree = decltype(tree->rtree)(pts.begin(), pts.end());
    tree_ = std::move(tree);
}

double PointIndex::nearest_distance(std::span<const double> x) const
{
    const Tree::Point q(x[0], n_ > 1 ? x[1] : 0.0, n_ > 2 ? x[2] : 0.0);
    std::array<Tree::Point, 1> hit;
    tree_->rtree.query(bgi::nearest(q, 1), hit.begin());
    return bg::distance(q, hit[0]);
}

double directed_deficit(const PointCloud& E, const PointCloud& F)
{
    if (E.empty() || F.empty())
        throw ValidationError(kModule, "hausdorff: empty input");
    if (E.dimension() != F.dimension())
        throw ValidationError(kModule, "hausdorff: dimension mismatch");
    PointIndex index(F);
    double worst = 0.0;
    for (std::size_t i = 0; i < E.size(); ++i)
        worst = std::max(worst, index.nearest_distance(E.point(i)));
    return worst;
}

double hausdorff(const PointCloud& E, const PointCloud& F)
{
    return std::max(directed_deficit(E, F), directed_deficit(F, E));
}

}  // namespace frontforge::geom
