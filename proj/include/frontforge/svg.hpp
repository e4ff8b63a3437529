#pragma once

// 2-D slices of reachable clouds against the polytope cross-section.

#include <array>
#include <string>
#include <vector>

#include "frontforge/convex_geom.hpp"

namespace frontforge::io {

struct SlicePlane
{
    int axis_x = 0;
    int axis_y = 1;
    double offset = 0.0;     // value of the remaining coordinate (n = 3)
    double thickness = 0.05; // cloud points within this of the plane are drawn
};

struct LabelledCloud
{
    std::string label;
    geom::PointCloud cloud;
};

/// Scatter of each cloud's slice plus the outline of P on the plane, with a
/// legend. Output depends only on the inputs.
std::string svg_front_plot(const std::vector<LabelledCloud>& clouds, const geom::Polytope& P,
                           const SlicePlane& plane = {});

/// Cross-section of P by the plane, as a counter-clockwise polygon in the
/// plane's (axis_x, axis_y) coordinates. Empty if the plane misses P.
std::vector<std::array<double, 2>> polytope_section(const geom::Polytope& P, const SlicePlane& plane);

}  // namespace frontforge::io
