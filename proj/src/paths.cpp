#include "frontforge/paths.hpp"

#include <algorithm>
#include <cmath>

namespace frontforge::paths {

namespace {

constexpr const char* kModule = "front_solver";

}  // namespace

AdmissiblePath::AdmissiblePath(Vec start)
{
    if (start.empty())
        throw ValidationError(kModule, "path start has no coordinates");
    times_.push_back(0.0);
    points_.push_back(std::move(start));
}

void AdmissiblePath::move_to(const Vec& to, double dt)
{
    if (to.size() != points_.front().size())
        throw ValidationError(kModule, "path point dimension mismatch");
    if (!(dt >= 0.0) || (dt == 0.0 && distance(to, points_.back()) > 0.0))
        throw ValidationError(kModule, "path segment needs a positive duration");
    if (dt == 0.0)
        return;
    if (times_.back() + dt == times_.back())
        throw ValidationError(kModule, "path segment duration below time resolution");
    times_.push_back(times_.back() + dt);
    points_.push_back(to);
}

void AdmissiblePath::rest(double dt)
{
    const Vec here = points_.back();
    move_to(here, dt);
}

void AdmissiblePath::append(const AdmissiblePath& other)
{
    if (distance(other.start(), endpoint()) > 1e-12)
        throw ValidationError(kModule, "appended path does not start at the endpoint");
    for (std::size_t i = 1; i < other.times_.size(); ++i)
        move_to(other.points_[i], other.times_[i] - other.times_[i - 1]);
}

Vec AdmissiblePath::position(double t) const
{
    if (t <= 0.0)
        return points_.front();
    if (t >= times_.back())
        return points_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
    Vec x(points_[j].size());
    for (std::size_t d = 0; d < x.size(); ++d)
        x[d] = (1.0 - w) * points_[j - 1][d] + w * points_[j][d];
    return x;
}

SpeedCheck check_admissible(const AdmissiblePath& path, const Medium& medium, double spacing)
{
    if (!(spacing > 0.0))
        throw ValidationError(kModule, "admissibility check needs a positive spacing");
    SpeedCheck out;
    const auto& T = path.times();
    const auto& X = path.points();
    for (std::size_t j = 1; j < T.size(); ++j) {
        const double len = distance(X[j - 1], X[j]);
        if (len == 0.0)
            continue;
        const double speed = len / (T[j] - T[j - 1]);
        const auto pieces = static_cast<std::size_t>(std::ceil(len / (0.5 * spacing)));
        Vec x(X[j].size());
        for (std::size_t k = 0; k <= pieces; ++k) {
            const double w = static_cast<double>(k) / static_cast<double>(pieces);
            for (std::size_t d = 0; d < x.size(); ++d)
                x[d] = (1.0 - w) * X[j - 1][d] + w * X[j][d];
            const double excess = speed - medium(x);
            out.worst_excess = std::max(out.worst_excess, excess);
            ++out.samples;
        }
    }
    out.admissible = out.worst_excess <= 1e-9;
    return out;
}

double connector_time(int n, double alpha)
{
    if (!(alpha > 0.0))
        throw ValidationError(kModule, "connector speed must be positive");
    return std::sqrt(static_cast<double>(n)) / alpha;
}

AdmissiblePath connector_path(const Vec& p, const Vec& q, double alpha)
{
    const int n = static_cast<int>(p.size());
    const double ell = connector_time(n, alpha);
    const double len = distance(p, q);
    if (len > std::sqrt(static_cast<double>(n)) + 1e-12)
        throw ValidationError(kModule, "connector endpoints farther apart than sqrt(n)");
    AdmissiblePath path(p);
    // Sub-rounding moves are treated as rests.
    if (len > 1e-12)
        path.move_to(q, len / alpha);
    path.rest(std::max(0.0, ell - path.duration()));
    return path;
}

Vec nearest_core_point(const env::Environment& env, int i, std::span<const double> x)
{
    const auto& line = env.lines().at(static_cast<std::size_t>(i));
    const std::size_t n = x.size();
    Vec cell(n), r(n);
    for (std::size_t d = 0; d < n; ++d) {
        cell[d] = std::floor(x[d]);
        r[d] = x[d] - cell[d];
    }
    const Vec& u = line.unit_direction();
    double best = std::numeric_limits<double>::infinity();
    Vec out(n);
    for (const Vec& a : line.translates()) {
        const double s = dot(sub(r, a), u);
        Vec y(n);
        for (std::size_t d = 0; d < n; ++d)
            y[d] = a[d] + s * u[d];
        const double dd = distance(y, r);
        if (dd < best) {
            best = dd;
            for (std::size_t d = 0; d < n; ++d)
                out[d] = cell[d] + y[d];
        }
    }
    return out;
}

double core_speed(const env::Environment& env, int i)
{
    const double q = env.spec().directions.at(static_cast<std::size_t>(i)).length();
    return env.spec().normalized ? q : env.spec().amplitude * q;
}

TubeRun tube_path_arrival_bound(const env::Environment& env, int i, std::int64_t periods, const Vec& start, int sign)
{
    if (periods < 0)
        throw ValidationError(kModule, "negative period count");
    const auto& line = env.lines().at(static_cast<std::size_t>(i));
    const Vec entry = nearest_core_point(env, i, start);
    TubeRun run{0.0, {}, connector_path(start, entry, env.min_speed())};
    const Vec q = line.direction().to_real();
    const double closing = line.closing_time();
    if (periods > 0) {
        Vec end = entry;
        for (std::size_t d = 0; d < end.size(); ++d)
            end[d] += static_cast<double>(sign * periods) * closing * q[d];
        // Distance periods * closing * |q| at the core speed.
        const double length = static_cast<double>(periods) * closing * norm(q);
        run.path.move_to(end, length / core_speed(env, i));
    }
    run.time = run.path.duration();
    run.endpoint = run.path.endpoint();
    return run;
}

CombinationPath convex_combination_path(const env::Environment& env, const std::vector<double>& weights,
                                        const std::vector<VertexRun>& vertices, double t, const Vec& start)
{
    if (weights.empty() || weights.size() != vertices.size())
        throw ValidationError(kModule, "one weight per vertex run required");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0)
            throw ValidationError(kModule, "negative convex weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError(kModule, "convex weights must sum to 1");
    const int n = env.dimension();
    const double ell = connector_time(n, env.min_speed());
    const double t_run = t - static_cast<double>(weights.size()) * ell;
    if (!(t_run > 0.0))
        throw ValidationError(kModule, "t=" + std::to_string(t) + " too small for " +
                                           std::to_string(weights.size()) + " connectors of duration " +
                                           std::to_string(ell));

    CombinationPath out{AdmissiblePath(start), Vec(static_cast<std::size_t>(n), 0.0), 0.0, 0.0};
    Vec mean_velocity(static_cast<std::size_t>(n), 0.0);
    double drift = norm(start);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const auto [family, sign] = vertices[j];
        const auto& line = env.lines().at(static_cast<std::size_t>(family));
        const Vec here = out.path.endpoint();
        const Vec entry = nearest_core_point(env, family, here);
        drift += distance(here, entry);
        out.path.append(connector_path(here, entry, env.min_speed()));
        const double speed = core_speed(env, family);
        const Vec& u = line.unit_direction();
        const double tau = weights[j] * t_run;
        Vec end = entry;
        for (int d = 0; d < n; ++d) {
            end[d] += sign * speed * tau * u[d];
            mean_velocity[d] += weights[j] * sign * speed * u[d];
        }
        if (tau > 0.0)
            out.path.move_to(end, tau);
    }
    out.target = scaled(mean_velocity, t);
    out.deviation = distance(out.path.endpoint(), out.target);
    out.bound = drift + (t - t_run) * norm(mean_velocity) + 1e-9 * (1.0 + t);
    return out;
}

}  // namespace frontforge::paths
