#include "frontforge/hedlund_env.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace frontforge::env {

namespace {

constexpr const char* kModule = "hedlund_env";

double bump_f(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double unit_ball_volume(int d)
{
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

}  // namespace

double blend_profile(double s)
{
    if (s <= 0.0)
        return 1.0;
    if (s >= 1.0)
        return 0.0;
    const double a = bump_f(1.0 - s), b = bump_f(s);
    return a / (a + b);
}

double blend_profile_derivative(double s)
{
    if (s <= 0.0 || s >= 1.0)
        return 0.0;
    // chi = F(1-s)/(F(s)+F(1-s)); F'(u) = F(u)/u^2.
    const double a = bump_f(1.0 - s), b = bump_f(s);
    const double da = -a / ((1.0 - s) * (1.0 - s));
    const double db = b / (s * s);
    const double den = a + b;
    return (da * den - a * (da + db)) / (den * den);
}

double blend_profile_max_slope() { return 2.0; }

// --- PeriodicLineSet ---------------------------------------------------------

PeriodicLineSet::PeriodicLineSet(RationalVector direction, Vec base) : q_(std::move(direction)), base_(std::move(base))
{
    const std::size_t n = q_.dimension();
    if (base_.size() != n)
        throw ValidationError(kModule, "line base point dimension mismatch");
    if (q_.is_zero())
        throw ValidationError(kModule, "zero line direction");
    const Vec q = q_.to_real();
    const double ql = norm(q);
    unit_ = scaled(q, 1.0 / ql);

    // Every point of R^n lies within sqrt(n)/2 of the lattice x0 + Z^n, hence
    // of some translate; lines reaching within that distance of [0,1)^n pass
    // within sqrt(n) of the cell centre.
    const double reach = std::sqrt(static_cast<double>(n));
    const Vec centre(n, 0.5);
    const double ds = 0.25 / ql;
    const auto K = static_cast<std::int64_t>(std::ceil(reach + 0.5 * ql * ds)) + 1;
    const double M = closing_time();
    std::set<std::vector<std::int64_t>> seen;
    Vec z(n), c(n);
    std::vector<std::int64_t> k(n), lo(n);
    for (double s = 0.0; s < M; s += ds) {
        for (std::size_t d = 0; d < n; ++d) {
            z[d] = base_[d] + s * q[d];
            lo[d] = static_cast<std::int64_t>(std::floor(centre[d] - z[d])) - K;
        }
        std::fill(k.begin(), k.end(), 0);
        // odometer over the (2K+2)^n box of integer offsets
        for (;;) {
            for (std::size_t d = 0; d < n; ++d)
                c[d] = z[d] + static_cast<double>(lo[d] + k[d]) - centre[d];
            const double along = dot(c, unit_);
            for (std::size_t d = 0; d < n; ++d)
                c[d] -= along * unit_[d];
            if (norm(c) <= reach) {
                std::vector<std::int64_t> key(n);
                for (std::size_t d = 0; d < n; ++d)
                    key[d] = std::llround((c[d] + centre[d]) * 1e9);
                if (seen.insert(key).second) {
                    Vec anchor(n);
                    for (std::size_t d = 0; d < n; ++d)
                        anchor[d] = c[d] + centre[d];
                    anchors_.push_back(anchor);
                    anchor_coords_.insert(anchor_coords_.end(), anchor.begin(), anchor.end());
                }
            }
            std::size_t d = 0;
            for (; d < n; ++d) {
                if (++k[d] <= 2 * K + 1)
                    break;
                k[d] = 0;
            }
            if (d == n)
                break;
        }
    }
}

double PeriodicLineSet::closing_time() const
{
    std::int64_t g = 0;
    for (auto v : q_.numerators())
        g = std::gcd(g, std::abs(v));
    return static_cast<double>(q_.period()) / static_cast<double>(g);
}

double PeriodicLineSet::distance(std::span<const double> x) const
{
    const std::size_t n = unit_.size();
    double y[8];
    Vec big;
    double* yp = y;
    if (n > 8) {
        big.resize(n);
        yp = big.data();
    }
    for (std::size_t d = 0; d < n; ++d)
        yp[d] = x[d] - std::floor(x[d]);
    double best = std::numeric_limits<double>::infinity();
    const std::size_t count = anchors_.size();
    for (std::size_t a = 0; a < count; ++a) {
        const double* c = anchor_coords_.data() + a * n;
        double rr = 0.0, along = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double v = yp[d] - c[d];
            rr += v * v;
            along += v * unit_[d];
        }
        best = std::min(best, rr - along * along);
    }
    return std::sqrt(std::max(0.0, best));
}

double dist_to_periodic_line(std::span<const double> x, const PeriodicLineSet& line) { return line.distance(x); }

double periodic_line_distance(const PeriodicLineSet& a, const PeriodicLineSet& b)
{
    const Vec q = a.direction().to_real();
    const double M = a.closing_time();
    const std::size_t n = q.size();
    Vec x(n);
    auto f = [&](double s) {
        for (std::size_t d = 0; d < n; ++d)
            x[d] = a.base()[d] + s * q[d];
        return b.distance(x);
    };
    const int samples = std::max(400, static_cast<int>(400.0 * a.orbit_length()));
    const double step = M / samples;
    std::vector<std::pair<double, double>> vals;
    vals.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
        vals.emplace_back(f(i * step), i * step);
    std::sort(vals.begin(), vals.end());
    double best = vals.front().first;
    const std::size_t refine = std::min<std::size_t>(8, vals.size());
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t r = 0; r < refine; ++r) {
        double lo = vals[r].second - step, hi = vals[r].second + step;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = f(x2);
            }
        }
        best = std::min({best, f1, f2});
    }
    return best;
}

TubeValidation validate_tubes(const EnvironmentSpec& spec)
{
    if (spec.directions.size() != spec.base_points.size())
        throw ValidationError(kModule, "directions and base_points differ in length");
    std::vector<PeriodicLineSet> lines;
    for (std::size_t i = 0; i < spec.directions.size(); ++i)
        lines.emplace_back(spec.directions[i], spec.base_points[i]);
    TubeValidation v;
    v.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j)
            v.min_gap = std::min(v.min_gap, periodic_line_distance(lines[i], lines[j]) - 2.0 * spec.delta);
    v.disjoint = v.min_gap > 0.0;
    return v;
}

std::vector<Vec> choose_base_points(const std::vector<RationalVector>& directions, double delta, std::uint64_t seed)
{
    if (directions.empty())
        throw ValidationError(kModule, "no directions");
    const std::size_t n = directions.front().dimension();
    std::vector<Vec> points{Vec(n, 0.0)};
    std::vector<PeriodicLineSet> lines{PeriodicLineSet(directions[0], points[0])};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    constexpr int kMaxRejections = 10000;
    for (std::size_t k = 1; k < directions.size(); ++k) {
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxRejections && !accepted; ++attempt) {
            Vec x(n);
            for (auto& v : x) {
                do
                    v = unif(rng);
                while (v == 0.0);
            }
            PeriodicLineSet cand(directions[k], x);
            bool ok = true;
            for (const auto& l : lines)
                if (periodic_line_distance(l, cand) - 2.0 * delta < 0.25 * delta) {
                    ok = false;
                    break;
                }
            if (ok) {
                points.push_back(x);
                lines.push_back(std::move(cand));
                accepted = true;
            }
        }
        if (!accepted)
            throw ValidationError(kModule, "delta too large for these directions (delta=" + std::to_string(delta) +
                                               "); shrink delta and retry");
    }
    return points;
}

double recommended_A(const geom::Polytope& P, double delta, double safety, double c)
{
    const double theta = geom::inradius_theta(P);
    double qmin = std::numeric_limits<double>::infinity();
    for (const auto& q : P.generators())
        qmin = std::min(qmin, norm(q));
    return safety * std::max((1.0 + c / delta) / theta, 1.0 / qmin);
}

// --- Environment -------------------------------------------------------------

Environment::Environment(EnvironmentSpec spec) : spec_(std::move(spec))
{
    if (spec_.n < 3)
        throw ValidationError(kModule, "environment dimension must be >= 3");
    if (spec_.profile != kSmoothBump)
        throw ValidationError(kModule, "unknown blend profile '" + spec_.profile + "'");
    if (spec_.directions.empty())
        throw ValidationError(kModule, "no directions");
    if (spec_.directions.size() != spec_.base_points.size())
        throw ValidationError(kModule, "directions and base_points differ in length");
    if (!(spec_.delta > 0.0 && spec_.delta < 1.0 / 3.0))
        throw ValidationError(kModule, "delta must lie in (0, 1/3)");
    for (const auto& q : spec_.directions)
        if (static_cast<int>(q.dimension()) != spec_.n)
            throw ValidationError(kModule, "direction dimension mismatch");
    // Span and non-parallel checks live in the polytope constructor.
    const auto P = geom::Polytope::from_generators(spec_.directions);
    double qmin = std::numeric_limits<double>::infinity();
    for (const auto& q : P.generators())
        qmin = std::min(qmin, norm(q));
    if (!(spec_.amplitude * qmin >= 1.0 - 1e-12))
        throw ValidationError(kModule, "amplitude A must satisfy A*min|q_i| >= 1");
    for (std::size_t i = 0; i < spec_.directions.size(); ++i)
        lines_.emplace_back(spec_.directions[i], spec_.base_points[i]);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines_.size(); ++i)
        for (std::size_t j = i + 1; j < lines_.size(); ++j)
            gap = std::min(gap, periodic_line_distance(lines_[i], lines_[j]) - 2.0 * spec_.delta);
    if (!(gap > 0.0))
        throw ValidationError(kModule, "tubes intersect (min gap " + std::to_string(gap) + ")");
}

int Environment::tube_index(std::span<const double> x) const
{
    for (std::size_t i = 0; i < lines_.size(); ++i)
        if (lines_[i].distance(x) < spec_.delta)
            return static_cast<int>(i);
    return -1;
}

double Environment::a(std::span<const double> x) const
{
    double value = 1.0;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        const double d = lines_[i].distance(x);
        if (d < spec_.delta) {
            const double peak = spec_.amplitude * spec_.directions[i].length();
            value = 1.0 + (peak - 1.0) * blend_profile(d / spec_.delta);
            break;
        }
    }
    return spec_.normalized ? value / spec_.amplitude : value;
}

double Environment::min_speed() const { return spec_.normalized ? 1.0 / spec_.amplitude : 1.0; }

double Environment::max_speed() const
{
    double qmax = 0.0;
    for (const auto& q : spec_.directions)
        qmax = std::max(qmax, q.length());
    return spec_.normalized ? qmax : spec_.amplitude * qmax;
}

geom::Polytope Environment::effective_polytope() const
{
    if (spec_.normalized)
        return geom::Polytope::from_generators(spec_.directions);
    std::vector<Vec> g;
    for (const auto& q : spec_.directions)
        g.push_back(scaled(q.to_real(), spec_.amplitude));
    return geom::Polytope::from_real_generators(std::move(g));
}

bool Environment::mirror_symmetric(int axis, double plane) const
{
    const auto ax = static_cast<std::size_t>(axis);
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        Vec base = lines_[i].base();
        base[ax] = 2.0 * plane - base[ax];
        auto num = spec_.directions[i].numerators();
        num[ax] = -num[ax];
        const RationalVector reflected(num, spec_.directions[i].denominator());
        bool found = false;
        for (std::size_t j = 0; j < lines_.size() && !found; ++j) {
            const auto& other = spec_.directions[j];
            if (other.denominator() != reflected.denominator())
                continue;
            const auto& a = other.numerators();
            const bool same = a == reflected.numerators();
            bool opposite = true;
            for (std::size_t d = 0; d < a.size(); ++d)
                opposite = opposite && a[d] == -reflected.numerators()[d];
            if (!same && !opposite)
                continue;
            found = lines_[j].distance(base) < 1e-12;
        }
        if (!found)
            return false;
    }
    return true;
}

double Environment::tube_volume() const
{
    double v = 0.0;
    for (const auto& l : lines_)
        v += unit_ball_volume(spec_.n - 1) * std::pow(spec_.delta, spec_.n - 1) * l.orbit_length();
    return v;
}

double evaluate_a(const Environment& env, std::span<const double> x) { return env.a(x); }

// --- ball approximation ------------------------------------------------------

namespace {

std::vector<Vec> fibonacci_sphere(std::size_t count)
{
    std::vector<Vec> out;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        const double r = std::sqrt(1.0 - z * z);
        const double a = golden * static_cast<double>(i);
        out.push_back({r * std::cos(a), r * std::sin(a), z});
    }
    return out;
}

using IntDir = std::array<std::int64_t, 3>;

std::vector<IntDir> short_directions()
{
    std::vector<IntDir> out;
    for (std::int64_t a = -2; a <= 2; ++a)
        for (std::int64_t b = -2; b <= 2; ++b)
            for (std::int64_t c = -2; c <= 2; ++c) {
                if (a == 0 && b == 0 && c == 0)
                    continue;
                if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) != 1)
                    continue;
                const std::int64_t lead = a != 0 ? a : (b != 0 ? b : c);
                if (lead < 0)
                    continue;
                out.push_back({a, b, c});
            }
    return out;
}

/// For primitive integer directions u, v the translates of x_v + Rv seen from
/// x_u + Ru are at distances |(x_v - x_u + k).N| / |N| with N = u x v, and
/// k.N runs over gcd(N) Z.
struct PairGeometry
{
    std::size_t i, j;
    double N[3];
    double g, len;
};

double pair_distance(const PairGeometry& pg, const double* bi, const double* bj)
{
    double s = 0.0;
    for (int d = 0; d < 3; ++d)
        s += (bj[d] - bi[d]) * pg.N[d];
    return std::abs(s - pg.g * std::round(s / pg.g)) / pg.len;
}

std::vector<PairGeometry> pair_geometry(const std::vector<IntDir>& dirs)
{
    std::vector<PairGeometry> out;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            const auto& u = dirs[i];
            const auto& v = dirs[j];
            const std::int64_t N[3] = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
            const std::int64_t g = std::gcd(std::gcd(std::abs(N[0]), std::abs(N[1])), std::abs(N[2]));
            PairGeometry pg{i, j, {double(N[0]), double(N[1]), double(N[2])}, double(g), 0.0};
            pg.len = std::sqrt(pg.N[0] * pg.N[0] + pg.N[1] * pg.N[1] + pg.N[2] * pg.N[2]);
            out.push_back(pg);
        }
    return out;
}

/// Base points (x_1 = 0) maximizing the smallest pairwise line distance:
/// greedy placement over random candidates, optionally polished by a
/// coordinate pattern search.
std::pair<std::vector<Vec>, double> spread_base_points(const std::vector<IntDir>& dirs, int candidates, bool refine,
                                                      std::mt19937_64& rng)
{
    const auto pairs = pair_geometry(dirs);
    const std::size_t m = dirs.size();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<const PairGeometry*>> by_second(m);
    for (const auto& pg : pairs)
        by_second[pg.j].push_back(&pg);

    std::vector<double> best(3 * m, 0.0);
    for (std::size_t k = 1; k < m; ++k) {
        double best_d = -1.0;
        double x[3], keep[3] = {0, 0, 0};
        for (int c = 0; c < candidates; ++c) {
            for (auto& v : x)
                v = unif(rng);
            double d = std::numeric_limits<double>::infinity();
            for (const auto* pg : by_second[k]) {
                d = std::min(d, pair_distance(*pg, &best[3 * pg->i], x));
                if (d <= best_d)
                    break;
            }
            if (d > best_d) {
                best_d = d;
                std::copy(x, x + 3, keep);
            }
        }
        std::copy(keep, keep + 3, &best[3 * k]);
    }

    auto score = [&](const std::vector<double>& b) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& pg : pairs)
            d = std::min(d, pair_distance(pg, &b[3 * pg.i], &b[3 * pg.j]));
        return d;
    };
    double best_score = score(best);
    for (double step = 0.05; refine && step > 1e-4; step *= 0.5)
        for (bool improved = true; improved;) {
            improved = false;
            for (std::size_t k = 3; k < 3 * m; ++k)
                for (double sgn : {-1.0, 1.0}) {
                    auto cur = best;
                    cur[k] += sgn * step;
                    cur[k] -= std::floor(cur[k]);
                    const double s = score(cur);
                    if (s > best_score + 1e-12) {
                        best_score = s;
                        best = std::move(cur);
                        improved = true;
                    }
                }
        }
    std::vector<Vec> points;
    for (std::size_t i = 0; i < m; ++i)
        points.push_back({best[3 * i], best[3 * i + 1], best[3 * i + 2]});
    return {points, best_score};
}

}  // namespace

double sphere_support_error(const geom::Polytope& P, std::size_t samples)
{
    double worst = 0.0;
    for (const auto& p : fibonacci_sphere(samples))
        worst = std::max(worst, std::abs(geom::support(P, p) - 1.0));
    return worst;
}

std::vector<BallApproxMember> ball_approx_sequence(const std::vector<int>& m_values, std::uint64_t seed,
                                                   std::int64_t max_denominator)
{
    const auto cands = short_directions();
    std::vector<Vec> units;
    for (const auto& c : cands) {
        Vec u{static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])};
        units.push_back(scaled(u, 1.0 / norm(u)));
    }
    const auto sphere = fibonacci_sphere(600);
    // Tubes have to stay thick enough to resolve on a grid, so the direction
    // set is chosen at the largest separation level where size m fits.
    constexpr double kSeparationLevels[] = {0.3, 0.25, 0.2, 0.15, 0.12, 0.1, 0.08, 0.06, 0.04};

    auto sphere_error = [&](const std::vector<std::size_t>& set) {
        double worst = 0.0;
        for (const auto& p : sphere) {
            double best = 0.0;
            for (auto i : set)
                best = std::max(best, std::abs(dot(units[i], p)));
            worst = std::max(worst, 1.0 - best);
        }
        return worst;
    };
    auto to_dirs = [&](const std::vector<std::size_t>& set) {
        std::vector<IntDir> d;
        for (auto i : set)
            d.push_back(cands[i]);
        return d;
    };

    auto search = [&](int m, double min_sep, std::mt19937_64& rng) {
        auto objective = [&](const std::vector<std::size_t>& set) {
            const auto dirs = to_dirs(set);
            double bound = std::numeric_limits<double>::infinity();
            for (const auto& pg : pair_geometry(dirs))
                bound = std::min(bound, 0.5 * pg.g / pg.len);
            const double achieved = bound < min_sep ? bound : spread_base_points(dirs, 200, false, rng).second;
            if (achieved < min_sep)
                return 10.0 + 100.0 * (min_sep - achieved);
            return sphere_error(set);
        };
        std::vector<std::size_t> chosen;
        double best_value = std::numeric_limits<double>::infinity();
        for (int restart = 0; restart < 6; ++restart) {
            std::vector<std::size_t> all(cands.size());
            std::iota(all.begin(), all.end(), 0);
            std::shuffle(all.begin(), all.end(), rng);
            std::vector<std::size_t> cur(all.begin(), all.begin() + m);
            double value = objective(cur);
            for (bool improved = true; improved;) {
                improved = false;
                for (std::size_t i = 0; i < cur.size(); ++i)
                    for (std::size_t j = 0; j < cands.size(); ++j) {
                        if (std::find(cur.begin(), cur.end(), j) != cur.end())
                            continue;
                        auto trial = cur;
                        trial[i] = j;
                        const double tv = objective(trial);
                        if (tv < value - 1e-12) {
                            cur = std::move(trial);
                            value = tv;
                            improved = true;
                        }
                    }
            }
            if (value < best_value) {
                best_value = value;
                chosen = cur;
            }
        }
        if (best_value >= 10.0)
            chosen.clear();
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    };

    std::vector<BallApproxMember> out;
    for (int m : m_values) {
        if (m < 3)
            throw ValidationError(kModule, "ball approximation needs m >= n = 3");
        std::mt19937_64 rng(seed + 1000003ULL * static_cast<std::uint64_t>(m));
        std::vector<std::size_t> chosen;
        if (m == 3) {
            for (std::size_t i = 0; i < cands.size(); ++i) {
                const auto& c = cands[i];
                if (std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]) == 1)
                    chosen.push_back(i);
            }
        } else {
            for (double level : kSeparationLevels) {
                chosen = search(m, level, rng);
                if (!chosen.empty())
                    break;
            }
            if (chosen.empty())
                throw ValidationError(kModule, "no well-separated direction set of size " + std::to_string(m));
        }

        const auto int_dirs = to_dirs(chosen);
        std::vector<RationalVector> dirs;
        for (const auto& c : int_dirs) {
            const double len = std::sqrt(static_cast<double>(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
            // scale a/b ~ 1/|v| keeps the generator near the unit sphere
            const double target = 1.0 / len;
            const auto r = RationalVector::approximate(std::span<const double>(&target, 1), max_denominator, 0.01 * target);
            const std::int64_t a = r.numerators()[0];
            dirs.emplace_back(std::vector<std::int64_t>{c[0] * a, c[1] * a, c[2] * a}, r.denominator());
        }

        auto [base, dmin] = spread_base_points(int_dirs, 3000, true, rng);
        // gap >= delta/4 between tubes, the margin choose_base_points uses
        double delta = std::min(0.2, dmin / 2.25);
        if (!out.empty()) {
            // Keep the covered fraction strictly decreasing along the sequence.
            double length = 0.0;
            for (std::size_t i = 0; i < dirs.size(); ++i)
                length += PeriodicLineSet(dirs[i], base[i]).orbit_length();
            const double cap = std::sqrt(0.95 * out.back().tube_volume / (M_PI * length));
            delta = std::min(delta, cap);
        }

        BallApproxMember member{m, {}, geom::Polytope::from_generators(dirs), 0.0, 0.0};
        member.spec.n = 3;
        member.spec.directions = dirs;
        member.spec.base_points = base;
        member.spec.delta = delta;
        member.spec.amplitude = recommended_A(member.polytope, delta);
        member.spec.normalized = true;
        const Environment env(member.spec);
        member.tube_volume = env.tube_volume();
        member.sup_support_error = sphere_support_error(member.polytope);
        out.push_back(std::move(member));
    }
    return out;
}

}  // namespace frontforge::env
