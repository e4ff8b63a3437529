#include "frontforge/front_solver.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace frontforge::front {

namespace {

constexpr const char* kModule = "front_solver";

/// Neighbour value with mirror planes treated as reflections.
double neighbour(const ArrivalField& F, const std::int64_t* k, int d, int s)
{
    std::int64_t q[3] = {0, 0, 0};
    std::copy(k, k + F.dimension(), q);
    q[d] += s;
    if (q[d] < 0 && F.mirror()[d])
        q[d] = 1;
    return F.node(q);
}

void push_unfolded(const ArrivalField& F, const Vec& x, double scale, geom::PointCloud& out)
{
    const int n = F.dimension();
    std::vector<int> axes;
    for (int d = 0; d < n; ++d)
        if (F.mirror()[d] && std::abs(x[d] - F.origin()[d]) > 1e-12)
            axes.push_back(d);
    Vec y(x.size());
    for (unsigned mask = 0; mask < (1u << axes.size()); ++mask) {
        for (int d = 0; d < n; ++d)
            y[d] = x[d];
        for (std::size_t j = 0; j < axes.size(); ++j)
            if (mask & (1u << j))
                y[axes[j]] = 2.0 * F.origin()[axes[j]] - x[axes[j]];
        for (auto& v : y)
            v *= scale;
        out.push_back(y);
    }
}

}  // namespace

geom::PointCloud reachable_cloud(const ArrivalField& field, double t)
{
    if (!(t > 0.0))
        throw ValidationError(kModule, "reachable set needs t > 0");
    if (t > field.complete_to())
        throw ValidationError(kModule, "t=" + std::to_string(t) + " beyond the completed range " +
                                           std::to_string(field.complete_to()) + " of the arrival field");
    const int n = field.dimension();
    geom::PointCloud cloud(n);
    bool moved = false;
    field.for_each_accepted([&](const std::int64_t* k, double T) {
        if (T > t)
            return;
        if (T > 0.0)
            moved = true;
        bool boundary = false;
        for (int d = 0; d < n && !boundary; ++d)
            for (int s = -1; s <= 1 && !boundary; s += 2)
                boundary = neighbour(field, k, d, s) > t;
        if (boundary)
            push_unfolded(field, field.node_position(k), 1.0 / t, cloud);
    });
    if (!moved || cloud.empty())
        throw ValidationError(kModule, "reachable set at t=" + std::to_string(t) +
                                           " has not left the source (t below the smallest positive arrival time)");
    return cloud;
}

ShapeDeficits shape_deficits(const ArrivalField& field, double t, const geom::ConvexBody& D, int resolution)
{
    if (!(t > 0.0) || t > field.complete_to())
        (void)reachable_cloud(field, t);  // throws with the precise message
    const int n = field.dimension();
    ShapeDeficits out;

    // The stored region only: the set is symmetric under the mirror planes,
    // so the nearest point to a folded query lies in the stored part.
    geom::PointCloud stored(n);
    bool moved = false;
    field.for_each_accepted([&](const std::int64_t* k, double T) {
        if (T > t)
            return;
        moved = moved || T > 0.0;
        bool boundary = false;
        for (int d = 0; d < n && !boundary; ++d)
            for (int s = -1; s <= 1 && !boundary; s += 2)
                boundary = neighbour(field, k, d, s) > t;
        if (boundary)
            stored.push_back(scaled(field.node_position(k), 1.0 / t));
    });
    if (!moved || stored.empty())
        (void)reachable_cloud(field, t);

    // Outer deficit over every mirror image.
    const std::size_t chunks = std::min<std::size_t>(stored.size(), 64);
    std::vector<double> part(chunks, 0.0);
    std::vector<std::size_t> images(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
        geom::PointCloud one(n);
        const std::size_t lo = stored.size() * c / chunks, hi = stored.size() * (c + 1) / chunks;
        for (std::size_t i = lo; i < hi; ++i) {
            one.clear();
            push_unfolded(field, scaled(stored.point(i), t), 1.0 / t, one);
            images[c] += one.size();
            for (std::size_t j = 0; j < one.size(); ++j)
                part[c] = std::max(part[c], geom::distance_to(D, one.point(j)));
        }
    });
    out.outer = *std::max_element(part.begin(), part.end());
    for (auto m : images)
        out.boundary_points += m;

    const geom::PointCloud samples = geom::boundary_samples(D, resolution);
    const geom::PointIndex index(stored);
    std::vector<double> inner(samples.size(), 0.0);
    parallel_for(samples.size(), [&](std::size_t i) {
        const Vec x = scaled(samples.point(i), t);
        if (field.at(x) <= t)
            return;
        inner[i] = index.nearest_distance(scaled(field.fold(x), 1.0 / t));
    });
    out.inner = inner.empty() ? 0.0 : *std::max_element(inner.begin(), inner.end());
    return out;
}

std::vector<bool> symmetric_axes(const Medium& medium, std::span<const double> centre)
{
    std::vector<bool> axes(static_cast<std::size_t>(medium.n), false);
    for (int d = 0; d < medium.n; ++d) {
        if (medium.environment)
            axes[d] = medium.environment->mirror_symmetric(d, centre[d]);
        else
            axes[d] = medium.is_constant();
    }
    return axes;
}

ExperimentReport shape_series(const Medium& medium, const geom::ConvexBody& D, const Vec& t_list, double h,
                              const ShapeOptions& options)
{
    if (t_list.empty())
        throw ValidationError(kModule, "empty t list");
    for (std::size_t i = 0; i < t_list.size(); ++i)
        if (!(t_list[i] > 0.0) || (i > 0 && !(t_list[i] > t_list[i - 1])))
            throw ValidationError(kModule, "t list must be positive and increasing");
    if (geom::dimension(D) != medium.n)
        throw ValidationError(kModule, "limit shape dimension does not match the medium");
    if (medium.environment && medium.environment->spec().delta < 4.0 * h)
        warn(kModule, "tube radius below 4h; tubes are under-resolved");

    const Source src = Source::unit_cell(medium.n);
    FmmOptions fo;
    fo.h = h;
    fo.t_max = t_list.back();
    const double half = 0.5 / h;
    if (options.auto_mirror && std::abs(half - std::round(half)) < 1e-9)
        fo.mirror = symmetric_axes(medium, src.centre());

    ExperimentReport report;
    report.name = "shape_series";
    report.columns = {"t", "inner", "outer", "rho", "t_rho", "boundary_points", "wall_time_s"};
    const double t0 = wall_seconds();
    const ArrivalField field = fmm_arrival(medium, src, fo);
    report.diagnostics["fmm_wall_time_s"] = wall_seconds() - t0;
    report.diagnostics["accepted_nodes"] = static_cast<double>(field.accepted_count());
    report.diagnostics["h"] = h;

    for (double t : t_list) {
        const double t1 = wall_seconds();
        const ShapeDeficits dfc = shape_deficits(field, t, D, options.boundary_resolution);
        report.add_row({t, dfc.inner, dfc.outer, dfc.rho(), t * dfc.rho(), static_cast<double>(dfc.boundary_points),
                        wall_seconds() - t1});
    }

    // Fits over the pre-floor segment.
    const Vec ts = report.column_values("t");
    auto fit = [&](const std::string& col, const std::string& suffix) {
        const Vec v = report.column_values(col);
        Vec x, y, trho;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            trho.push_back(ts[i] * v[i]);
            if (ts[i] * v[i] > options.floor_factor * h) {
                x.push_back(ts[i]);
                y.push_back(v[i]);
            }
        }
        const auto [lo, hi] = std::minmax_element(trho.begin(), trho.end());
        report.diagnostics["t_rho_ratio" + suffix] = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
        report.diagnostics["pre_floor_points" + suffix] = static_cast<double>(x.size());
        if (x.size() < ts.size())
            report.flags.push_back("floor" + suffix);
        if (x.size() >= 2) {
            const LineFit f = fit_loglog(x, y);
            report.diagnostics["slope" + suffix] = f.slope;
            report.diagnostics["slope_residual" + suffix] = f.residual;
        } else {
            report.flags.push_back("too-few-pre-floor-points" + suffix);
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < v.size(); ++i)
            decreasing = decreasing && v[i] < v[i - 1];
        report.diagnostics["decreasing" + suffix] = decreasing ? 1.0 : 0.0;
    };
    fit("rho", "");
    fit("inner", "_inner");
    fit("outer", "_outer");
    return report;
}

SubadditivityResult subadditivity_check(const Medium& medium, double t, double s, double h)
{
    if (t < 0.0 || s < 0.0 || !(t + s > 0.0))
        throw ValidationError(kModule, "subadditivity needs t, s >= 0 with t + s > 0");
    const double cells = 1.0 / h;
    const auto P = static_cast<std::int64_t>(std::llround(cells));
    if (std::abs(cells - static_cast<double>(P)) > 1e-9)
        throw ValidationError(kModule, "subadditivity check needs 1/h integral");
    const int n = medium.n;
    FmmOptions fo;
    fo.h = h;
    fo.t_max = t + s;
    const ArrivalField F = fmm_arrival(medium, Source::unit_cell(n), fo);
    const auto& dims = F.dims();
    std::size_t total = 1;
    std::size_t stride[3] = {0, 0, 0};
    for (int d = 0; d < n; ++d) {
        stride[d] = total;
        total *= static_cast<std::size_t>(dims[d]);
    }

    // Nodes of R_t, and the lattice cells meeting R_s.
    std::vector<std::array<std::int64_t, 3>> reach_t;
    std::set<std::array<std::int64_t, 3>> shifts;
    F.for_each_accepted([&](const std::int64_t* k, double T) {
        if (T <= t)
            reach_t.push_back({k[0], n > 1 ? k[1] : 0, n > 2 ? k[2] : 0});
        if (T <= s) {
            std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
            for (int d = 0; d < n; ++d) {
                const double x = F.origin()[d] + static_cast<double>(k[d]) * h;
                const double r = std::round(x);
                if (std::abs(x - r) < 1e-9) {
                    lo[d] = static_cast<std::int64_t>(r) - 1;
                    hi[d] = static_cast<std::int64_t>(r);
                } else {
                    lo[d] = hi[d] = static_cast<std::int64_t>(std::floor(x));
                }
            }
            std::array<std::int64_t, 3> c = lo;
            for (;;) {
                shifts.insert(c);
                int d = 0;
                for (; d < n; ++d) {
                    if (++c[d] <= hi[d])
                        break;
                    c[d] = lo[d];
                }
                if (d == n)
                    break;
            }
        }
    });

    std::vector<bool> sum(total, false);
    for (const auto& k : shifts)
        for (const auto& a : reach_t) {
            std::size_t idx = 0;
            bool inside = true;
            for (int d = 0; d < n && inside; ++d) {
                const std::int64_t b = a[d] + k[d] * P;
                inside = b >= 0 && b < dims[d];
                idx += static_cast<std::size_t>(b) * stride[d];
            }
            if (inside)
                sum[idx] = true;
        }

    SubadditivityResult result;
    result.shifts = shifts.size();
    std::int64_t max_r = 0;
    for (int d = 0; d < n; ++d)
        max_r = std::max(max_r, dims[d]);
    F.for_each_accepted([&](const std::int64_t* k, double T) {
        if (T > t + s)
            return;
        ++result.checked;
        std::size_t idx = 0;
        for (int d = 0; d < n; ++d)
            idx += static_cast<std::size_t>(k[d]) * stride[d];
        if (sum[idx])
            return;
        // Nearest member by growing cubic shells.
        double best2 = std::numeric_limits<double>::infinity();
        for (std::int64_t r = 1; r <= max_r; ++r) {
            if (static_cast<double>(r * r) >= best2)
                break;
            std::int64_t o[3] = {-r, n > 1 ? -r : 0, n > 2 ? -r : 0};
            for (;;) {
                bool shell = false;
                for (int d = 0; d < n; ++d)
                    shell = shell || std::abs(o[d]) == r;
                if (shell) {
                    std::size_t j = 0;
                    bool inside = true;
                    double r2 = 0.0;
                    for (int d = 0; d < n && inside; ++d) {
                        const std::int64_t b = k[d] + o[d];
                        inside = b >= 0 && b < dims[d];
                        j += static_cast<std::size_t>(b) * stride[d];
                        r2 += static_cast<double>(o[d] * o[d]);
                    }
                    if (inside && sum[j])
                        best2 = std::min(best2, r2);
                }
                int d = 0;
                for (; d < n; ++d) {
                    if (++o[d] <= r)
                        break;
                    o[d] = -r;
                }
                if (d == n)
                    break;
            }
        }
        result.violation = std::max(result.violation, std::sqrt(best2) * h);
    });
    return result;
}

}  // namespace frontforge::front
