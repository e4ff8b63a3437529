#include "frontforge/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "frontforge/report.hpp"

namespace frontforge::io {

namespace {

constexpr const char* kModule = "cli_io";
constexpr double kSize = 480.0;
constexpr double kMargin = 40.0;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& text)
{
    std::string out;
    for (char ch : text) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

int third_axis(const SlicePlane& plane)
{
    return 3 - plane.axis_x - plane.axis_y;
}

void check_plane(int n, const SlicePlane& plane)
{
    if (n < 2 || n > 3)
        throw ValidationError(kModule, "front plots need n in {2, 3}");
    if (plane.axis_x == plane.axis_y || plane.axis_x < 0 || plane.axis_y < 0 || plane.axis_x >= n ||
        plane.axis_y >= n)
        throw ValidationError(kModule, "slice plane axes must be two distinct coordinates");
}

}  // namespace

std::vector<std::array<double, 2>> polytope_section(const geom::Polytope& P, const SlicePlane& plane)
{
    const int n = P.dimension();
    check_plane(n, plane);
    std::vector<std::array<double, 2>> pts;
    const auto& hull = P.hull();
    if (n == 2) {
        for (const auto& v : hull.points)
            pts.push_back({v[plane.axis_x], v[plane.axis_y]});
    } else {
        // Edge-plane crossings of every facet triangle.
        const int c = third_axis(plane);
        for (const auto& f : hull.facets)
            for (std::size_t a = 0; a < f.vertices.size(); ++a)
                for (std::size_t b = a + 1; b < f.vertices.size(); ++b) {
                    const Vec& p = hull.points[f.vertices[a]];
                    const Vec& q = hull.points[f.vertices[b]];
                    const double sp = p[c] - plane.offset, sq = q[c] - plane.offset;
                    if ((sp > 0.0 && sq > 0.0) || (sp < 0.0 && sq < 0.0))
                        continue;
                    if (sp == sq) {
                        pts.push_back({p[plane.axis_x], p[plane.axis_y]});
                        pts.push_back({q[plane.axis_x], q[plane.axis_y]});
                        continue;
                    }
                    const double w = sp / (sp - sq);
                    pts.push_back({p[plane.axis_x] + w * (q[plane.axis_x] - p[plane.axis_x]),
                                   p[plane.axis_y] + w * (q[plane.axis_y] - p[plane.axis_y])});
                }
    }
    if (pts.size() < 3)
        return {};
    // Convex hull (monotone chain), counter-clockwise.
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) {
                              return std::abs(a[0] - b[0]) < 1e-12 && std::abs(a[1] - b[1]) < 1e-12;
                          }),
              pts.end());
    auto cross = [](const auto& o, const auto& a, const auto& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> out(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(out[k - 2], out[k - 1], pts[i]) <= 1e-15)
            --k;
        out[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
        while (k >= lo && cross(out[k - 2], out[k - 1], pts[i]) <= 1e-15)
            --k;
        out[k++] = pts[i];
    }
    out.resize(k > 1 ? k - 1 : k);
    return out;
}

std::string svg_front_plot(const std::vector<LabelledCloud>& clouds, const geom::Polytope& P, const SlicePlane& plane)
{
    const int n = P.dimension();
    check_plane(n, plane);
    const auto outline = polytope_section(P, plane);

    struct Sliced
    {
        std::string label;
        std::vector<std::array<double, 2>> pts;
    };
    std::vector<Sliced> sliced;
    double extent = 1e-9;
    for (const auto& [x, y] : outline)
        extent = std::max({extent, std::abs(x), std::abs(y)});
    for (const auto& lc : clouds) {
        if (lc.cloud.dimension() != n && !lc.cloud.empty())
            throw ValidationError(kModule, "cloud dimension does not match the polytope");
        Sliced s{lc.label, {}};
        for (std::size_t i = 0; i < lc.cloud.size(); ++i) {
            const auto p = lc.cloud.point(i);
            if (n == 3 && std::abs(p[third_axis(plane)] - plane.offset) > plane.thickness)
                continue;
            s.pts.push_back({p[plane.axis_x], p[plane.axis_y]});
            extent = std::max({extent, std::abs(p[plane.axis_x]), std::abs(p[plane.axis_y])});
        }
        sliced.push_back(std::move(s));
    }
    extent *= 1.1;
    const double scale = (kSize - 2.0 * kMargin) / (2.0 * extent);
    auto sx = [&](double x) { return format_double(kSize / 2.0 + scale * x); };
    auto sy = [&](double y) { return format_double(kSize / 2.0 - scale * y); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!outline.empty()) {
        svg << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < outline.size(); ++i)
            svg << (i ? " " : "") << sx(outline[i][0]) << ',' << sy(outline[i][1]);
        svg << "\"/>\n";
    }
    for (std::size_t c = 0; c < sliced.size(); ++c) {
        const char* colour = kColours[c % std::size(kColours)];
        svg << "<g fill=\"" << colour << "\">\n";
        for (const auto& [x, y] : sliced[c].pts)
            svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"1.2\"/>\n";
        svg << "</g>\n";
        const double ly = 18.0 + 16.0 * static_cast<double>(c);
        svg << "<circle cx=\"14\" cy=\"" << format_double(ly - 4.0) << "\" r=\"4\" fill=\"" << colour << "\"/>\n";
        svg << "<text x=\"24\" y=\"" << format_double(ly) << "\" font-size=\"12\">" << escape(sliced[c].label)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace frontforge::io
