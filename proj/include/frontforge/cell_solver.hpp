#pragma once

// Effective Hamiltonian of a(y)|p + Dv| = H(p) on the unit torus, by evolving
// w_t + a(y)|p + Dw| = 0 from w = 0 and reading off the linear decay rate.

#include <functional>

#include "frontforge/common.hpp"
#include "frontforge/convex_geom.hpp"
#include "frontforge/medium.hpp"

namespace frontforge::cell {

/// Values on the lattice (k/N) for k in [0,N)^n, x_1 fastest. n <= 3.
struct TorusField
{
    int n = 3;
    int N = 0;
    std::vector<double> values;

    double h() const { return 1.0 / N; }
    std::size_t size() const { return values.size(); }
};

TorusField sample_torus(const Medium& medium, int N);

/// Lax-Friedrichs flux a|p + (g- + g+)/2| - sum_j sigma_j (g+_j - g-_j)/2.
/// Throws ValidationError if some sigma_j < a_val.
double numerical_hamiltonian(double a_val, std::span<const double> p, std::span<const double> grad_minus,
                             std::span<const double> grad_plus, std::span<const double> viscosity);

/// Godunov flux for a|q|: a sqrt(sum_j max(max(p_j + g-_j, 0), -min(p_j + g+_j, 0))^2).
double godunov_hamiltonian(double a_val, std::span<const double> p, std::span<const double> grad_minus,
                           std::span<const double> grad_plus);

enum class Flux
{
    LaxFriedrichs,
    Godunov,
};

enum class Viscosity
{
    Local,   // sigma_j = a(y) at the node
    Global,  // sigma_j = max a
};

struct CellOptions
{
    int N = 64;
    double tol = 1e-3;
    double T_max = 400.0;
    double T_first = 1.0;  // first checkpoint; later ones double
    double min_horizon = 1.0;  // no stop before min_horizon / min a
    Flux flux = Flux::LaxFriedrichs;
    Viscosity viscosity = Viscosity::Local;
    double cfl = 0.4;
    int mean_every = 100;
    bool warm_start = true;  // run N/2, N/4, ... first (down to warm_start_min_N)
    int warm_start_min_N = 16;
};

struct CellResult
{
    Vec p;
    double hbar = 0.0;
    double residual = 0.0;  // gap between the last two decay-rate estimates
    int N = 0;
    double T_final = 0.0;
    double wall_time_s = 0.0;
    bool converged = false;
};

/// Large-time solve. The estimate at checkpoint T is
/// -(wbar(T) - wbar(T/2)) / (T/2) with wbar the spatial mean; the run stops
/// when two successive estimates differ by at most tol and T >= min_horizon
/// / min a, or at T_max (converged = false, best estimate kept).
CellResult solve_cell_large_T(const TorusField& a, std::span<const double> p, const CellOptions& options);
CellResult solve_cell_large_T(const Medium& medium, std::span<const double> p, const CellOptions& options);

/// |p| / integral_0^1 dy / a1d(y), by adaptive Gauss-Kronrod quadrature.
double stratified_oracle_H(const std::function<double(double)>& a1d, double p_parallel);

/// Support function of the shape estimate: exact for a polytope, max over
/// points for a cloud.
double effective_H_from_shape(const geom::Polytope& D, std::span<const double> p);
double effective_H_from_shape(const geom::PointCloud& D, std::span<const double> p);

}  // namespace frontforge::cell
