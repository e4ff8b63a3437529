#pragma once

// The oscillatory problem u_t + a(x/eps)|Du| = 0 and its effective limit
// u_t + H(Du) = 0 with H the support function of D, plus the rate
// experiment comparing the two.

#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "frontforge/arrival_field.hpp"
#include "frontforge/convex_geom.hpp"
#include "frontforge/medium.hpp"
#include "frontforge/report.hpp"

namespace frontforge::hj {

using front::ScalarField;

class InitialData
{
  public:
    enum class Kind
    {
        Linear,     // p . x
        Cone,       // |x - x0|
        Bump,       // height exp(1 - 1/(1 - s^2)) with s = |x - x0| / radius, 0 for s >= 1
        Tabulated,  // multilinear on a grid, constant extension outside
        Function,   // user callable with a stated Lipschitz constant
    };

    static InitialData linear(Vec p);
    static InitialData cone(Vec x0);
    static InitialData bump(Vec x0, double radius, double height);
    static InitialData tabulated(ScalarField table);
    static InitialData function(int n, std::function<double(std::span<const double>)> fn, double lipschitz,
                                std::string label);

    /// "linear:px,py,pz", "cone:x,y,z" or "bump:x,y,z,radius,height".
    static InitialData parse(const std::string& text);

    Kind kind() const { return kind_; }
    int dimension() const { return n_; }
    double lipschitz() const { return lipschitz_; }
    const Vec& p() const { return p_; }
    std::string describe() const;

    double operator()(std::span<const double> x) const;

  private:
    Kind kind_ = Kind::Linear;
    int n_ = 0;
    Vec p_;
    Vec x0_;
    double radius_ = 1.0;
    double height_ = 1.0;
    double lipschitz_ = 0.0;
    std::shared_ptr<const ScalarField> table_;
    std::function<double(std::span<const double>)> fn_;
    std::string label_;
};

struct HopfLaxOptions
{
    int lattice = 8;        // barycentric steps per simplex of the fan triangulation
    double tol = 1e-4;      // descent stops at step tol * max(1, t) / Lip
};

/// inf of g over x + tP: a barycentric lattice on the fan triangulation of
/// P (vertices included, so linear g is exact), then pattern-search descent
/// inside x + tP from the best lattice point.
double hopf_lax_effective(const InitialData& g, const geom::Polytope& P, std::span<const double> x, double t,
                          const HopfLaxOptions& options = {});

/// Same for a ball of radius R (the constant-medium front): exact for linear
/// g, otherwise sphere-shell sampling plus the same descent.
double hopf_lax_effective(const InitialData& g, const geom::ConvexBody& D, std::span<const double> x, double t,
                          const HopfLaxOptions& options = {});

struct RepresentationOptions
{
    /// Nodes of the fast-variable grid sit at grid_anchor + (h/eps) Z^n.
    std::optional<Vec> grid_anchor;
};

/// u^eps(x,t) = inf { g(eps z) : T_{x/eps}(z) <= t/eps } with T the
/// first-arrival field from the point x/eps on a grid of spacing h/eps.
/// Fields are cached by the fractional part of x/eps (the medium is
/// Z^n periodic), so probes sharing it share one solve.
class RepresentationSolver
{
  public:
    RepresentationSolver(Medium medium, double eps, double t, double h, RepresentationOptions options = {});

    double operator()(const InitialData& g, std::span<const double> x);
    std::size_t solves() const { return cache_.size(); }
    double fmm_seconds() const { return fmm_seconds_; }

  private:
    const front::ArrivalField& field_for(const Vec& frac);

    Medium medium_;
    double eps_, t_, h_;
    RepresentationOptions options_;
    std::map<std::vector<std::int64_t>, front::ArrivalField> cache_;
    double fmm_seconds_ = 0.0;
};

double oscillatory_from_arrival(const InitialData& g, const Medium& medium, double eps, std::span<const double> x,
                                double t, double h, const RepresentationOptions& options = {});

struct PdeOptions
{
    double cfl = 0.4;
};

/// Lax-Friedrichs stepping of u_t + a(x/eps)|Du| = 0 on the grid of `box`
/// (its values are ignored) from g to time t. Ghost nodes outside the box
/// hold g; values are trustworthy on the box shrunk by (max a) t plus a few
/// diffusion widths sqrt(steps) h, since the viscosity spreads ghost errors.
ScalarField oscillatory_pde(const InitialData& g, const Medium& medium, double eps, const ScalarField& box, double t,
                            const PdeOptions& options = {});

struct RateOptions
{
    Vec eps_list;
    double t = 1.0;
    double h_factor = 1.0 / 8.0;  // h = h_factor * eps
    std::vector<Vec> probes;
    RepresentationOptions representation;
    /// Errors below floor_factor * Lip(g) * h are at the grid floor.
    double floor_factor = 2.0;
};

/// Default probes: k^n points c + (i - (k-1)/2) s on each axis with
/// s = 0.3183, offset so x / eps has distinct fractional parts for dyadic eps.
std::vector<Vec> probe_lattice(int n, int k, std::span<const double> centre);

struct RateReport
{
    Vec eps;
    Vec h;
    Vec errors;
    Vec slope_partial;  // local slope to the previous eps (NaN for the first)
    Vec wall_time_s;
    double slope = 0.0;  // fit over the pre-floor points
    double slope_residual = 0.0;
    std::size_t pre_floor_points = 0;
    double floor_estimate = 0.0;  // at the smallest eps
    std::vector<std::string> flags;  // "floor", "non-monotone", "too-few-pre-floor-points"

    bool has_flag(const std::string& f) const;
    ExperimentReport to_report() const;
};

/// err(eps) = max over probes |u^eps - u| at time t, with u from
/// hopf_lax_effective on D and u^eps from the representation formula.
RateReport rate_experiment(const InitialData& g, const Medium& medium, const geom::ConvexBody& D,
                           const RateOptions& options);

}  // namespace frontforge::hj
