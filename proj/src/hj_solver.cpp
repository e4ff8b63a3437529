#include "frontforge/hj_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frontforge/cell_solver.hpp"

namespace frontforge::hj {

namespace {

constexpr const char* kModule = "hj_solver";

double bump_profile(double s)
{
    if (s >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double bump_max_slope()
{
    static const double value = [] {
        double best = 0.0;
        constexpr int samples = 200000;
        for (int i = 1; i < samples; ++i) {
            const double s = static_cast<double>(i) / samples;
            const double d = 1.0 - s * s;
            best = std::max(best, bump_profile(s) * 2.0 * s / (d * d));
        }
        return best * (1.0 + 1e-6);
    }();
    return value;
}

Vec parse_list(const std::string& text)
{
    Vec out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError(kModule, "bad number '" + item + "' in '" + text + "'");
        }
    }
    return out;
}

std::size_t grid_size(const ScalarField& f)
{
    std::size_t total = 1;
    for (auto d : f.dims)
        total *= static_cast<std::size_t>(d);
    return total;
}

}  // namespace

InitialData InitialData::linear(Vec p)
{
    if (p.empty())
        throw ValidationError(kModule, "linear data needs a slope vector");
    InitialData g;
    g.kind_ = Kind::Linear;
    g.n_ = static_cast<int>(p.size());
    g.lipschitz_ = norm(p);
    g.p_ = std::move(p);
    return g;
}

InitialData InitialData::cone(Vec x0)
{
    if (x0.empty())
        throw ValidationError(kModule, "cone data needs an apex");
    InitialData g;
    g.kind_ = Kind::Cone;
    g.n_ = static_cast<int>(x0.size());
    g.lipschitz_ = 1.0;
    g.x0_ = std::move(x0);
    return g;
}

InitialData InitialData::bump(Vec x0, double radius, double height)
{
    if (x0.empty() || !(radius > 0.0))
        throw ValidationError(kModule, "bump needs a centre and a positive radius");
    InitialData g;
    g.kind_ = Kind::Bump;
    g.n_ = static_cast<int>(x0.size());
    g.x0_ = std::move(x0);
    g.radius_ = radius;
    g.height_ = height;
    g.lipschitz_ = std::abs(height) / radius * bump_max_slope();
    return g;
}

InitialData InitialData::tabulated(ScalarField table)
{
    if (table.n < 1 || table.dims.size() != static_cast<std::size_t>(table.n) || table.values.size() != grid_size(table))
        throw ValidationError(kModule, "tabulated data: dims inconsistent with values");
    for (auto d : table.dims)
        if (d < 2)
            throw ValidationError(kModule, "tabulated data needs at least 2 nodes per axis");
    for (double v : table.values)
        if (!std::isfinite(v))
            throw ValidationError(kModule, "tabulated data must be finite (bounded)");
    InitialData g;
    g.kind_ = Kind::Tabulated;
    g.n_ = table.n;
    // Lipschitz constant of the multilinear interpolant.
    double sum = 0.0;
    std::size_t stride = 1;
    for (int d = 0; d < table.n; ++d) {
        double worst = 0.0;
        const std::size_t extent = static_cast<std::size_t>(table.dims[d]);
        for (std::size_t i = 0; i < table.values.size(); ++i)
            if ((i / stride) % extent + 1 < extent)
                worst = std::max(worst, std::abs(table.values[i + stride] - table.values[i]) / table.h);
        sum += worst * worst;
        stride *= extent;
    }
    g.lipschitz_ = std::sqrt(sum);
    g.table_ = std::make_shared<const ScalarField>(std::move(table));
    return g;
}

InitialData InitialData::function(int n, std::function<double(std::span<const double>)> fn, double lipschitz,
                                  std::string label)
{
    if (n < 1 || !fn || !(lipschitz >= 0.0))
        throw ValidationError(kModule, "function data needs n >= 1, a callable and a Lipschitz constant");
    InitialData g;
    g.kind_ = Kind::Function;
    g.n_ = n;
    g.fn_ = std::move(fn);
    g.lipschitz_ = lipschitz;
    g.label_ = std::move(label);
    return g;
}

InitialData InitialData::parse(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ValidationError(kModule, "initial data '" + text + "' needs the form kind:values");
    const std::string kind = text.substr(0, colon);
    const Vec v = parse_list(text.substr(colon + 1));
    if (kind == "linear")
        return linear(v);
    if (kind == "cone")
        return cone(v);
    if (kind == "bump") {
        if (v.size() < 3)
            throw ValidationError(kModule, "bump needs centre, radius and height");
        return bump(Vec(v.begin(), v.end() - 2), v[v.size() - 2], v.back());
    }
    throw ValidationError(kModule, "unknown initial data kind '" + kind + "'");
}

std::string InitialData::describe() const
{
    auto join = [](const Vec& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + format_double(v[i]);
        return s;
    };
    switch (kind_) {
    case Kind::Linear:
        return "linear:" + join(p_);
    case Kind::Cone:
        return "cone:" + join(x0_);
    case Kind::Bump:
        return "bump:" + join(x0_) + "," + format_double(radius_) + "," + format_double(height_);
    case Kind::Tabulated:
        return "tabulated";
    case Kind::Function:
        return label_.empty() ? "function" : label_;
    }
    return "";
}

double InitialData::operator()(std::span<const double> x) const
{
    if (static_cast<int>(x.size()) != n_)
        throw ValidationError(kModule, "initial data evaluated at a point of the wrong dimension");
    switch (kind_) {
    case Kind::Linear:
        return dot(p_, x);
    case Kind::Cone:
        return distance(x, x0_);
    case Kind::Bump:
        return height_ * bump_profile(distance(x, x0_) / radius_);
    case Kind::Function:
        return fn_(x);
    case Kind::Tabulated: {
        const ScalarField& T = *table_;
        std::size_t base = 0, stride = 1;
        double frac[8];
        std::size_t step[8];
        for (int d = 0; d < n_; ++d) {
            const auto extent = static_cast<std::int64_t>(T.dims[d]);
            const double u = std::clamp((x[d] - T.origin[d]) / T.h, 0.0, static_cast<double>(extent - 1));
            const auto k = std::min<std::int64_t>(static_cast<std::int64_t>(u), extent - 2);
            frac[d] = u - static_cast<double>(k);
            base += static_cast<std::size_t>(k) * stride;
            step[d] = stride;
            stride *= static_cast<std::size_t>(extent);
        }
        double value = 0.0;
        for (int corner = 0; corner < (1 << n_); ++corner) {
            double w = 1.0;
            std::size_t idx = base;
            for (int d = 0; d < n_; ++d) {
                const bool up = corner & (1 << d);
                w *= up ? frac[d] : 1.0 - frac[d];
                idx += up ? step[d] : 0;
            }
            if (w != 0.0)
                value += w * T.values[idx];
        }
        return value;
    }
    }
    return 0.0;
}

double hopf_lax_effective(const InitialData& g, const geom::Polytope& P, std::span<const double> x, double t,
                          const HopfLaxOptions& options)
{
    if (t < 0.0)
        throw ValidationError(kModule, "Hopf-Lax needs t >= 0");
    const int n = P.dimension();
    if (static_cast<int>(x.size()) != n || g.dimension() != n)
        throw ValidationError(kModule, "Hopf-Lax dimension mismatch");
    if (t == 0.0)
        return g(x);
    const int m = std::max(1, options.lattice);
    const auto& hull = P.hull();
    Vec centre(static_cast<std::size_t>(n), 0.0);
    if (!geom::contains(P, centre, 1e-12)) {
        for (const auto& v : hull.points)
            for (int d = 0; d < n; ++d)
                centre[d] += v[d] / static_cast<double>(hull.points.size());
    }

    double best = std::numeric_limits<double>::infinity();
    Vec best_y(x.begin(), x.end());
    Vec y(static_cast<std::size_t>(n));
    auto consider = [&](const Vec& q) {
        for (int d = 0; d < n; ++d)
            y[d] = x[d] + t * q[d];
        const double v = g(y);
        if (v < best) {
            best = v;
            best_y = y;
        }
    };
    for (const auto& v : hull.points)
        consider(v);
    // Barycentric lattice on each simplex {centre, facet vertices}.
    std::vector<int> w(static_cast<std::size_t>(n) + 1, 0);
    Vec q(static_cast<std::size_t>(n));
    const geom::Facet* facet = nullptr;
    std::function<void(int, int)> enumerate = [&](int slot, int left) {
        if (slot == n) {
            w[n] = left;
            for (int d = 0; d < n; ++d) {
                q[d] = w[0] * centre[d];
                for (int j = 0; j < n; ++j)
                    q[d] += w[j + 1] * hull.points[facet->vertices[j]][d];
                q[d] /= m;
            }
            consider(q);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            w[slot] = k;
            enumerate(slot + 1, left - k);
        }
    };
    for (const auto& f : hull.facets) {
        facet = &f;
        enumerate(0, m);
    }

    // Pattern search inside x + tP along axes and edge directions.
    const double lip = g.lipschitz();
    if (lip <= 0.0)
        return best;
    std::vector<Vec> dirs;
    for (int d = 0; d < n; ++d) {
        Vec e(static_cast<std::size_t>(n), 0.0);
        e[d] = 1.0;
        dirs.push_back(e);
        e[d] = -1.0;
        dirs.push_back(e);
    }
    for (const auto& f : hull.facets)
        for (std::size_t a = 0; a < f.vertices.size(); ++a)
            for (std::size_t b = 0; b < f.vertices.size(); ++b)
                if (a != b) {
                    Vec e = sub(hull.points[f.vertices[b]], hull.points[f.vertices[a]]);
                    const double len = norm(e);
                    if (len > 0.0)
                        dirs.push_back(scaled(e, 1.0 / len));
                }
    double step = t * P.circumradius() / m;
    const double stop = options.tol * std::max(1.0, t) / lip;
    Vec trial(static_cast<std::size_t>(n)), rel(static_cast<std::size_t>(n));
    while (step > stop) {
        bool moved = false;
        for (const auto& e : dirs) {
            for (int d = 0; d < n; ++d) {
                trial[d] = best_y[d] + step * e[d];
                rel[d] = (trial[d] - x[d]) / t;
            }
            if (!geom::contains(P, rel, 1e-12))
                continue;
            const double v = g(trial);
            if (v < best) {
                best = v;
                best_y = trial;
                moved = true;
            }
        }
        if (!moved)
            step *= 0.5;
    }
    return best;
}

double hopf_lax_effective(const InitialData& g, const geom::ConvexBody& D, std::span<const double> x, double t,
                          const HopfLaxOptions& options)
{
    if (const auto* P = std::get_if<geom::Polytope>(&D))
        return hopf_lax_effective(g, *P, x, t, options);
    const auto& ball = std::get<geom::Ball>(D);
    const int n = ball.n;
    if (t < 0.0)
        throw ValidationError(kModule, "Hopf-Lax needs t >= 0");
    if (static_cast<int>(x.size()) != n || g.dimension() != n)
        throw ValidationError(kModule, "Hopf-Lax dimension mismatch");
    if (t == 0.0)
        return g(x);
    const double R = ball.radius * t;
    if (g.kind() == InitialData::Kind::Linear)
        return g(x) - R * norm(g.p());

    // Shells of directions, then pattern search inside the ball.
    const int m = std::max(1, options.lattice);
    const geom::PointCloud dirs = geom::boundary_samples(geom::ConvexBody(geom::Ball{n, 1.0}), 4 * m);
    double best = g(x);
    Vec best_y(x.begin(), x.end()), y(static_cast<std::size_t>(n));
    for (int k = 1; k <= m; ++k)
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const auto u = dirs.point(i);
            for (int d = 0; d < n; ++d)
                y[d] = x[d] + R * k / m * u[d];
            const double v = g(y);
            if (v < best) {
                best = v;
                best_y = y;
            }
        }
    const double lip = g.lipschitz();
    if (lip <= 0.0)
        return best;
    double step = R / m;
    const double stop = options.tol * std::max(1.0, t) / lip;
    while (step > stop) {
        bool moved = false;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const auto u = dirs.point(i);
            for (int d = 0; d < n; ++d)
                y[d] = best_y[d] + step * u[d];
            if (distance(y, x) > R)
                continue;
            const double v = g(y);
            if (v < best) {
                best = v;
                best_y = y;
                moved = true;
            }
        }
        if (!moved)
            step *= 0.5;
    }
    return best;
}

RepresentationSolver::RepresentationSolver(Medium medium, double eps, double t, double h, RepresentationOptions options)
    : medium_(std::move(medium)), eps_(eps), t_(t), h_(h), options_(std::move(options))
{
    if (!(eps > 0.0) || !(t > 0.0) || !(h > 0.0))
        throw ValidationError(kModule, "representation formula needs eps, t, h > 0");
    if (!medium_.periodic)
        throw ValidationError(kModule, "representation formula needs a Z^n-periodic medium");
}

const front::ArrivalField& RepresentationSolver::field_for(const Vec& frac)
{
    std::vector<std::int64_t> key;
    for (double f : frac)
        key.push_back(std::llround(f * 1e9));
    auto it = cache_.find(key);
    if (it != cache_.end())
        return it->second;
    front::FmmOptions fo;
    fo.h = h_ / eps_;
    fo.t_max = t_ / eps_;
    fo.grid_anchor = options_.grid_anchor;
    const double t0 = wall_seconds();
    auto field = front::fmm_arrival(medium_, front::Source::point(frac), fo);
    fmm_seconds_ += wall_seconds() - t0;
    return cache_.emplace(key, std::move(field)).first->second;
}

double RepresentationSolver::operator()(const InitialData& g, std::span<const double> x)
{
    const int n = medium_.n;
    if (static_cast<int>(x.size()) != n || g.dimension() != n)
        throw ValidationError(kModule, "representation formula dimension mismatch");
    Vec shift(static_cast<std::size_t>(n)), frac(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
        const double y = x[d] / eps_;
        shift[d] = std::floor(y);
        frac[d] = y - shift[d];
    }
    const front::ArrivalField& F = field_for(frac);
    const double horizon = t_ / eps_;
    double best = std::numeric_limits<double>::infinity();
    Vec z(static_cast<std::size_t>(n));
    F.for_each_accepted([&](const std::int64_t* k, double T) {
        if (T > horizon)
            return;
        const Vec p = F.node_position(k);
        for (int d = 0; d < n; ++d)
            z[d] = eps_ * (p[d] + shift[d]);
        best = std::min(best, g(z));
    });
    return best;
}

double oscillatory_from_arrival(const InitialData& g, const Medium& medium, double eps, std::span<const double> x,
                                double t, double h, const RepresentationOptions& options)
{
    if (t == 0.0)
        return g(x);
    RepresentationSolver solver(medium, eps, t, h, options);
    return solver(g, x);
}

ScalarField oscillatory_pde(const InitialData& g, const Medium& medium, double eps, const ScalarField& box, double t,
                            const PdeOptions& options)
{
    const int n = box.n;
    if (n < 1 || n > 3 || box.dims.size() != static_cast<std::size_t>(n) || medium.n != n || g.dimension() != n)
        throw ValidationError(kModule, "PDE box dimension mismatch (n must be 1..3)");
    if (!(options.cfl > 0.0 && options.cfl <= 1.0))
        throw ValidationError(kModule, "CFL number " + std::to_string(options.cfl) + " outside (0, 1]");
    if (!(eps > 0.0) || t < 0.0 || !(box.h > 0.0))
        throw ValidationError(kModule, "PDE needs eps > 0, t >= 0, h > 0");

    // Padded grid with one ghost layer that keeps g.
    std::int64_t pd[3] = {1, 1, 1};
    for (int d = 0; d < n; ++d)
        pd[d] = static_cast<std::int64_t>(box.dims[d]) + 2;
    const std::size_t total = static_cast<std::size_t>(pd[0] * pd[1] * pd[2]);
    const std::size_t stride[3] = {1, static_cast<std::size_t>(pd[0]), static_cast<std::size_t>(pd[0] * pd[1])};
    std::vector<double> u(total), a(total, 0.0);
    std::vector<std::uint8_t> interior(total, 0);
    Vec x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < total; ++i) {
        std::int64_t k[3] = {static_cast<std::int64_t>(i % stride[1]),
                             static_cast<std::int64_t>((i / stride[1]) % static_cast<std::size_t>(pd[1])),
                             static_cast<std::int64_t>(i / stride[2])};
        bool inside = true;
        for (int d = 0; d < n; ++d) {
            x[d] = box.origin[d] + static_cast<double>(k[d] - 1) * box.h;
            inside = inside && k[d] >= 1 && k[d] <= pd[d] - 2;
        }
        u[i] = g(x);
        if (inside) {
            interior[i] = 1;
            for (int d = 0; d < n; ++d)
                y[d] = x[d] / eps;
            a[i] = medium(y);
        }
    }

    const double dt_max = options.cfl * box.h / (static_cast<double>(n) * medium.upper);
    const auto steps = static_cast<std::int64_t>(std::ceil(t / dt_max - 1e-12));
    const double dt = steps > 0 ? t / static_cast<double>(steps) : 0.0;
    std::vector<double> next = u;
    const std::size_t slabs = static_cast<std::size_t>(pd[n - 1]);
    const std::size_t slab = total / slabs;
    for (std::int64_t s = 0; s < steps; ++s) {
        parallel_for(slabs, [&](std::size_t b) {
            double gm[3], gp[3], sig[3];
            const double zero[3] = {0.0, 0.0, 0.0};
            for (std::size_t i = b * slab; i < (b + 1) * slab; ++i) {
                if (!interior[i])
                    continue;
                for (int d = 0; d < n; ++d) {
                    gm[d] = (u[i] - u[i - stride[d]]) / box.h;
                    gp[d] = (u[i + stride[d]] - u[i]) / box.h;
                    sig[d] = a[i];
                }
                const std::span<const double> p0(zero, static_cast<std::size_t>(n));
                next[i] = u[i] - dt * cell::numerical_hamiltonian(a[i], p0, {gm, static_cast<std::size_t>(n)},
                                                                  {gp, static_cast<std::size_t>(n)},
                                                                  {sig, static_cast<std::size_t>(n)});
            }
        });
        u.swap(next);
        if (!std::isfinite(u[total / 2]))
            throw ConvergenceError(kModule, "non-finite value in PDE stepping at step " + std::to_string(s));
    }

    ScalarField out;
    out.n = n;
    out.dims = box.dims;
    out.origin = box.origin;
    out.h = box.h;
    out.values.reserve(grid_size(box));
    for (std::size_t i = 0; i < total; ++i)
        if (interior[i]) {
            if (!std::isfinite(u[i]))
                throw ConvergenceError(kModule, "non-finite value in PDE result");
            out.values.push_back(u[i]);
        }
    return out;
}

std::vector<Vec> probe_lattice(int n, int k, std::span<const double> centre)
{
    if (n < 1 || k < 1 || static_cast<int>(centre.size()) != n)
        throw ValidationError(kModule, "probe lattice needs n, k >= 1 and an n-point centre");
    constexpr double spacing = 0.3183;
    std::vector<Vec> out;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        Vec p(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d)
            p[d] = centre[d] + (idx[d] - 0.5 * (k - 1)) * spacing + 0.0711 * d;
        out.push_back(p);
        int d = 0;
        for (; d < n; ++d) {
            if (++idx[d] < k)
                break;
            idx[d] = 0;
        }
        if (d == n)
            break;
    }
    return out;
}

bool RateReport::has_flag(const std::string& f) const
{
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

ExperimentReport RateReport::to_report() const
{
    ExperimentReport r;
    r.name = "rate";
    r.columns = {"epsilon", "h", "sup_error", "slope_partial", "wall_time_s"};
    for (std::size_t i = 0; i < eps.size(); ++i)
        r.add_row({eps[i], h[i], errors[i], slope_partial[i], wall_time_s[i]});
    r.diagnostics["slope"] = slope;
    r.diagnostics["slope_residual"] = slope_residual;
    r.diagnostics["pre_floor_points"] = static_cast<double>(pre_floor_points);
    r.diagnostics["floor_estimate"] = floor_estimate;
    r.flags = flags;
    return r;
}

RateReport rate_experiment(const InitialData& g, const Medium& medium, const geom::ConvexBody& D,
                           const RateOptions& options)
{
    if (options.eps_list.empty())
        throw ValidationError(kModule, "empty eps list");
    for (double e : options.eps_list)
        if (!(e > 0.0))
            throw ValidationError(kModule, "eps must be positive");
    if (geom::dimension(D) != medium.n || g.dimension() != medium.n)
        throw ValidationError(kModule, "rate experiment dimension mismatch");
    std::vector<Vec> probes = options.probes;
    if (probes.empty())
        probes = probe_lattice(medium.n, 5, Vec(static_cast<std::size_t>(medium.n), 0.5));

    Vec eps = options.eps_list;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    Vec effective;
    for (const auto& x : probes)
        effective.push_back(hopf_lax_effective(g, D, x, options.t));

    RateReport rep;
    for (double e : eps) {
        const double h = options.h_factor * e;
        const double t0 = wall_seconds();
        RepresentationSolver solver(medium, e, options.t, h, options.representation);
        double err = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i)
            err = std::max(err, std::abs(solver(g, probes[i]) - effective[i]));
        rep.eps.push_back(e);
        rep.h.push_back(h);
        rep.errors.push_back(err);
        rep.wall_time_s.push_back(wall_seconds() - t0);
        const std::size_t i = rep.eps.size() - 1;
        rep.slope_partial.push_back(i == 0 ? std::numeric_limits<double>::quiet_NaN()
                                           : std::log(rep.errors[i - 1] / err) / std::log(rep.eps[i - 1] / e));
    }

    Vec xs, ys;
    bool non_monotone = false;
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
        const double floor = options.floor_factor * g.lipschitz() * rep.h[i];
        if (rep.errors[i] > floor) {
            xs.push_back(rep.eps[i]);
            ys.push_back(rep.errors[i]);
        }
        if (i > 0 && rep.errors[i] > rep.errors[i - 1] + 2.0 * floor)
            non_monotone = true;
    }
    rep.floor_estimate = options.floor_factor * g.lipschitz() * rep.h.back();
    rep.pre_floor_points = xs.size();
    if (xs.size() < rep.eps.size())
        rep.flags.push_back("floor");
    if (non_monotone)
        rep.flags.push_back("non-monotone");
    if (xs.size() >= 2) {
        const LineFit f = fit_loglog(xs, ys);
        rep.slope = f.slope;
        rep.slope_residual = f.residual;
    } else {
        rep.flags.push_back("too-few-pre-floor-points");
        rep.slope = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

}  // namespace frontforge::hj
