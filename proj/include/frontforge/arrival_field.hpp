#pragma once

// First-arrival times T for a(x)|DT| = 1 by fast marching on a box grid.
// Storage is sparse: 8^n blocks are allocated when the front first touches
// them, so only the reached region costs memory.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>

#include "frontforge/common.hpp"
#include "frontforge/medium.hpp"

namespace frontforge::front {

inline constexpr double kUnreached = std::numeric_limits<double>::infinity();

/// Dense n-dimensional grid of doubles, x_1 fastest.
struct ScalarField
{
    int n = 0;
    std::vector<std::uint64_t> dims;
    Vec origin;
    double h = 1.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool operator==(const ScalarField&) const = default;
};

struct Source
{
    enum class Kind
    {
        Point,
        Cell,  // the closed unit cube [corner, corner + 1]^n
    };
    Kind kind = Kind::Cell;
    Vec anchor;  // the point, or the cube's lower corner

    static Source point(Vec x) { return {Kind::Point, std::move(x)}; }
    static Source cell(Vec corner) { return {Kind::Cell, std::move(corner)}; }
    static Source unit_cell(int n) { return {Kind::Cell, Vec(static_cast<std::size_t>(n), 0.0)}; }

    /// Centre of the point or cube.
    Vec centre() const;
};

struct FmmOptions
{
    double h = 1.0 / 32.0;
    double t_max = 1.0;
    /// Per axis: the medium and source are symmetric under reflection through
    /// the plane x_d = centre_d, so only the upper half is stored.
    std::vector<bool> mirror;
    /// Stop as soon as T can be interpolated at every target.
    std::vector<Vec> targets;
    /// Extra box margin beyond (max a) t_max, in cells.
    int margin_cells = 3;
    /// Point sources: nodes within this many cells get the travel time of
    /// the straight segment from x0 (quadrature of 1 / a along it).
    double init_radius_cells = 4.0;
    /// Point sources: place nodes at grid_anchor + h Z^n instead of through
    /// the source point (keeps lattice-aligned tubes on grid lines).
    std::optional<Vec> grid_anchor;
    bool record_order = false;
};

class ArrivalField
{
  public:
    static constexpr int kBlock = 8;

    int dimension() const { return n_; }
    double h() const { return h_; }
    const Vec& origin() const { return origin_; }
    const std::vector<std::int64_t>& dims() const { return dims_; }
    const Source& source() const { return source_; }
    const std::vector<bool>& mirror() const { return mirror_; }
    double t_max() const { return t_max_; }
    /// Every node with T below this value has been accepted.
    double complete_to() const { return complete_to_; }
    std::size_t accepted_count() const { return accepted_; }
    std::size_t allocated_nodes() const { return blocks_allocated_ * block_volume_; }
    const std::vector<double>& acceptance_order() const { return order_; }

    /// T at an index inside the box (kUnreached when not accepted).
    double node(const std::int64_t* k) const;
    Vec node_position(const std::int64_t* k) const;
    bool in_box(const std::int64_t* k) const;

    /// Multilinear interpolation after folding through mirror planes;
    /// kUnreached if x is outside the box or a corner is unreached.
    double at(std::span<const double> x) const;

    /// Folds x into the stored half-spaces.
    Vec fold(std::span<const double> x) const;

    /// Calls fn(index, T) for every accepted node of the stored region.
    void for_each_accepted(const std::function<void(const std::int64_t*, double)>& fn) const;

    /// Dense copy of the box (kUnreached where not accepted).
    ScalarField to_scalar_field() const;

  private:
    friend ArrivalField fmm_arrival(const Medium&, const Source&, const FmmOptions&);

    struct Block
    {
        std::unique_ptr<double[]> T;
        std::unique_ptr<std::uint8_t[]> state;
    };

    std::size_t block_of(const std::int64_t* k, std::size_t& offset) const;
    Block* block_ptr(const std::int64_t* k, std::size_t& offset) const;
    Block& touch(const std::int64_t* k, std::size_t& offset);

    int n_ = 0;
    double h_ = 0.0;
    Vec origin_;
    std::vector<std::int64_t> dims_;
    std::vector<std::int64_t> block_dims_;
    std::size_t block_volume_ = 0;
    std::vector<Block> blocks_;
    std::size_t blocks_allocated_ = 0;
    Source source_;
    std::vector<bool> mirror_;
    double t_max_ = 0.0;
    double complete_to_ = 0.0;
    std::size_t accepted_ = 0;
    std::vector<double> order_;
};

/// Fast marching from the source until T exceeds t_max or until
/// all targets are resolved. The box is sized (max a) t_max plus a margin
/// around the source. Throws ValidationError if the front reaches the box
/// boundary before t_max.
ArrivalField fmm_arrival(const Medium& medium, const Source& source, const FmmOptions& options);

}  // namespace frontforge::front
