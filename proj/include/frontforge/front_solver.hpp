#pragma once

// Reachable sets R_t = {T <= t}, their rescaled shapes R_t / t, and
// comparisons against the expected limit shape.

#include "frontforge/arrival_field.hpp"
#include "frontforge/convex_geom.hpp"
#include "frontforge/report.hpp"

namespace frontforge::front {

/// Boundary nodes of {T <= t} (T <= t with a grid neighbour above t), scaled
/// by 1/t. Mirrored halves are unfolded. Throws ValidationError when the set
/// is empty or t exceeds the completed range of the field.
geom::PointCloud reachable_cloud(const ArrivalField& field, double t);

struct ShapeDeficits
{
    double inner = 0.0;  // sup over D of the distance to R_t / t
    double outer = 0.0;  // sup over R_t / t of the distance to D
    std::size_t boundary_points = 0;
    double rho() const { return std::max(inner, outer); }
};

/// Both directed deficits at time t. `resolution` controls the sampling of
/// the boundary of D for the inner one.
ShapeDeficits shape_deficits(const ArrivalField& field, double t, const geom::ConvexBody& D, int resolution = 24);

struct ShapeOptions
{
    /// Use reflection planes through the source centre where the medium is
    /// symmetric (Hedlund environments are checked; constant media always are).
    bool auto_mirror = true;
    int boundary_resolution = 24;
    /// Points with t * rho below floor_factor * h are declared at the grid floor.
    double floor_factor = 2.0;
};

/// Shape series from the unit cell: one arrival field up to max(t_list),
/// then per t the two deficits and rho. Columns:
/// t, inner, outer, rho, t_rho, boundary_points, wall_time_s. Diagnostics:
/// slope (and slope_inner, slope_outer) of log rho against log t over the
/// pre-floor points, fit residuals, and t_rho_ratio = max/min of t rho.
ExperimentReport shape_series(const Medium& medium, const geom::ConvexBody& D, const Vec& t_list, double h,
                              const ShapeOptions& options = {});

/// Mirror flags for a unit-cell source in this medium.
std::vector<bool> symmetric_axes(const Medium& medium, std::span<const double> centre);

struct SubadditivityResult
{
    double violation = 0.0;       // max over {T <= t+s} of the distance to the sum set
    std::size_t checked = 0;      // nodes of {T <= t+s}
    std::size_t shifts = 0;       // lattice shifts used for R_s + Y~
};

/// Checks R_{t+s}(Y) in R_s(Y) + R_t(Y) + Y~ on one field from the unit cell.
/// The sum set is under-approximated by the union of k + R_t(Y) over integer
/// k whose cell k + Y meets R_s(Y) (each such k lies in R_s + Y~), so the
/// reported distance bounds the true one from above. Needs 1/h integral.
SubadditivityResult subadditivity_check(const Medium& medium, double t, double s, double h);

}  // namespace frontforge::front
