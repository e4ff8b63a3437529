#include "frontforge/cell_solver.hpp"

#include <algorithm>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace frontforge::cell {

namespace {

constexpr const char* kModule = "cell_solver";

struct Layout
{
    int n;
    int N;
    std::size_t stride[3];
    std::size_t total;
};

Layout layout(int n, int N)
{
    if (n < 1 || n > 3)
        throw ValidationError(kModule, "torus fields support n in {1,2,3}");
    if (N < 4)
        throw ValidationError(kModule, "torus resolution must be at least 4");
    Layout L{n, N, {1, 1, 1}, 1};
    for (int d = 0; d < n; ++d) {
        L.stride[d] = L.total;
        L.total *= static_cast<std::size_t>(N);
    }
    return L;
}

/// One explicit step w_out = w - dt * H(w) over the rows [row_begin, row_end),
/// where a row is a line of nodes along x_1.
template <int Dim, bool UseGodunov>
void step_rows(const Layout& L, const double* a, const double* w, double* out, const double* p, double dt,
               double sigma_global, std::size_t row_begin, std::size_t row_end)
{
    const int N = L.N;
    const double inv_h = static_cast<double>(N);
    const std::size_t sy = L.stride[1 % 3], sz = L.stride[2 % 3];
    const std::size_t plane = static_cast<std::size_t>(N) * (Dim >= 2 ? static_cast<std::size_t>(N) : 1);
    for (std::size_t row = row_begin; row < row_end; ++row) {
        const std::size_t base = row * static_cast<std::size_t>(N);
        std::size_t ym = 0, yp = 0, zm = 0, zp = 0;
        if constexpr (Dim >= 2) {
            const std::size_t j = row % static_cast<std::size_t>(N);
            ym = j == 0 ? base + (N - 1) * sy : base - sy;
            yp = j + 1 == static_cast<std::size_t>(N) ? base - (N - 1) * sy : base + sy;
        }
        if constexpr (Dim >= 3) {
            const std::size_t k = row / static_cast<std::size_t>(N);
            zm = k == 0 ? base + (N - 1) * sz : base - sz;
            zp = k + 1 == static_cast<std::size_t>(N) ? base + sz - static_cast<std::size_t>(N) * sz : base + sz;
            (void)plane;
        }
        for (int i = 0; i < N; ++i) {
            const std::size_t c = base + i;
            const double wc = w[c];
            const double av = a[c];
            const double xm = w[base + (i == 0 ? N - 1 : i - 1)];
            const double xp = w[base + (i == N - 1 ? 0 : i + 1)];
            double gm[3], gp[3];
            gm[0] = (wc - xm) * inv_h;
            gp[0] = (xp - wc) * inv_h;
            if constexpr (Dim >= 2) {
                gm[1] = (wc - w[ym + i]) * inv_h;
                gp[1] = (w[yp + i] - wc) * inv_h;
            }
            if constexpr (Dim >= 3) {
                gm[2] = (wc - w[zm + i]) * inv_h;
                gp[2] = (w[zp + i] - wc) * inv_h;
            }
            double H;
            if constexpr (UseGodunov) {
                double s = 0.0;
                for (int d = 0; d < Dim; ++d) {
                    const double qm = std::max(p[d] + gm[d], 0.0);
                    const double qp = -std::min(p[d] + gp[d], 0.0);
                    const double q = std::max(qm, qp);
                    s += q * q;
                }
                H = av * std::sqrt(s);
            } else {
                const double sigma = sigma_global > 0.0 ? sigma_global : av;
                double s = 0.0, visc = 0.0;
                for (int d = 0; d < Dim; ++d) {
                    const double q = p[d] + 0.5 * (gm[d] + gp[d]);
                    s += q * q;
                    visc += gp[d] - gm[d];
                }
                H = av * std::sqrt(s) - 0.5 * sigma * visc;
            }
            out[c] = wc - dt * H;
        }
    }
}

using StepFn = void (*)(const Layout&, const double*, const double*, double*, const double*, double, double,
                        std::size_t, std::size_t);

StepFn pick_step(int n, Flux flux)
{
    const bool g = flux == Flux::Godunov;
    switch (n) {
    case 1:
        return g ? &step_rows<1, true> : &step_rows<1, false>;
    case 2:
        return g ? &step_rows<2, true> : &step_rows<2, false>;
    default:
        return g ? &step_rows<3, true> : &step_rows<3, false>;
    }
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

TorusField sample_torus(const Medium& medium, int N)
{
    const Layout L = layout(medium.n, N);
    if (!medium.periodic)
        throw ValidationError(kModule, "medium is not periodic");
    if (medium.environment) {
        const double delta = medium.environment->spec().delta;
        if (delta < 4.0 / N)
            warn(kModule, "tube radius " + std::to_string(delta) + " is below 4h at N=" + std::to_string(N));
    }
    TorusField f{medium.n, N, std::vector<double>(L.total)};
    const std::size_t rows = L.total / static_cast<std::size_t>(N);
    parallel_for(rows, [&](std::size_t row) {
        Vec x(static_cast<std::size_t>(medium.n));
        std::size_t r = row;
        for (int d = 1; d < medium.n; ++d) {
            x[d] = static_cast<double>(r % N) / N;
            r /= N;
        }
        for (int i = 0; i < N; ++i) {
            x[0] = static_cast<double>(i) / N;
            f.values[row * N + i] = medium(x);
        }
    });
    return f;
}

double numerical_hamiltonian(double a_val, std::span<const double> p, std::span<const double> grad_minus,
                             std::span<const double> grad_plus, std::span<const double> viscosity)
{
    double s = 0.0, visc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (viscosity[j] < a_val)
            throw ValidationError(kModule, "viscosity below a on axis " + std::to_string(j) + ": scheme not monotone");
        const double q = p[j] + 0.5 * (grad_minus[j] + grad_plus[j]);
        s += q * q;
        visc += viscosity[j] * (grad_plus[j] - grad_minus[j]);
    }
    return a_val * std::sqrt(s) - 0.5 * visc;
}

double godunov_hamiltonian(double a_val, std::span<const double> p, std::span<const double> grad_minus,
                           std::span<const double> grad_plus)
{
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double q = std::max(std::max(p[j] + grad_minus[j], 0.0), -std::min(p[j] + grad_plus[j], 0.0));
        s += q * q;
    }
    return a_val * std::sqrt(s);
}

namespace {

/// Coarse torus field: every other node of the fine one.
TorusField restrict_field(const TorusField& fine)
{
    const int Nc = fine.N / 2;
    const Layout L = layout(fine.n, Nc);
    TorusField c{fine.n, Nc, std::vector<double>(L.total)};
    for (std::size_t idx = 0; idx < L.total; ++idx) {
        std::size_t r = idx, f = 0, stride = 1;
        for (int d = 0; d < fine.n; ++d) {
            f += 2 * (r % Nc) * stride;
            r /= Nc;
            stride *= fine.N;
        }
        c.values[idx] = fine.values[f];
    }
    return c;
}

/// Periodic multilinear prolongation from N/2 to N, one axis at a time.
std::vector<double> prolong(const std::vector<double>& coarse, int n, int Nc)
{
    std::vector<double> cur = coarse;
    std::vector<std::size_t> dims(n, static_cast<std::size_t>(Nc));
    for (int axis = 0; axis < n; ++axis) {
        std::size_t inner = 1, outer = 1;
        for (int d = 0; d < axis; ++d)
            inner *= dims[d];
        for (int d = axis + 1; d < n; ++d)
            outer *= dims[d];
        const std::size_t m = dims[axis];
        std::vector<double> out(inner * 2 * m * outer);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t i = 0; i < inner; ++i) {
                    const double v0 = cur[(o * m + k) * inner + i];
                    const double v1 = cur[(o * m + (k + 1) % m) * inner + i];
                    out[(o * 2 * m + 2 * k) * inner + i] = v0;
                    out[(o * 2 * m + 2 * k + 1) * inner + i] = 0.5 * (v0 + v1);
                }
        dims[axis] = 2 * m;
        cur.swap(out);
    }
    return cur;
}

CellResult evolve(const TorusField& a, std::span<const double> p, const CellOptions& options, std::vector<double>& w)
{
    const double t0 = wall_seconds();
    const Layout L = layout(a.n, a.N);
    const double amax = *std::max_element(a.values.begin(), a.values.end());
    const double amin = *std::min_element(a.values.begin(), a.values.end());
    if (!(amin > 0.0))
        throw ValidationError(kModule, "speed must be positive on the grid");

    const double h = a.h();
    const double dt_cfl = options.cfl * h / (a.n * amax);
    const double sigma_global = options.viscosity == Viscosity::Global ? amax : 0.0;
    const StepFn step = pick_step(a.n, options.flux);
    const std::size_t rows = L.total / static_cast<std::size_t>(a.N);
    const std::size_t chunk = std::max<std::size_t>(1, rows / (4 * std::max(1u, worker_count())));
    const std::size_t chunks = (rows + chunk - 1) / chunk;

    std::vector<double> next(L.total);
    double offset = mean(w);
    for (auto& v : w)
        v -= offset;
    offset = 0.0;
    double now = 0.0;
    int since_mean = 0;

    CellResult result;
    result.p.assign(p.begin(), p.end());
    result.N = a.N;

    auto advance_to = [&](double target) {
        const auto steps = static_cast<long>(std::ceil((target - now) / dt_cfl - 1e-9));
        const double dt = (target - now) / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            parallel_for(chunks, [&](std::size_t c) {
                const std::size_t r0 = c * chunk, r1 = std::min(rows, r0 + chunk);
                step(L, a.values.data(), w.data(), next.data(), p.data(), dt, sigma_global, r0, r1);
            });
            w.swap(next);
            if (++since_mean >= options.mean_every) {
                const double m = mean(w);
                if (!std::isfinite(m))
                    throw ConvergenceError(kModule, "non-finite values in the time evolution");
                for (auto& v : w)
                    v -= m;
                offset += m;
                since_mean = 0;
            }
        }
        now = target;
    };

    // A prolonged start can plateau briefly long before the slow regions
    // have relaxed, so no stop before one slowest cell crossing.
    const double min_a = *std::min_element(a.values.begin(), a.values.end());
    const double T_floor = options.min_horizon / min_a;

    double prev_time = 0.0, prev_mean = 0.0;
    double prev_estimate = std::numeric_limits<double>::quiet_NaN();
    double T = options.T_first;
    for (;;) {
        advance_to(T);
        const double wbar = offset + mean(w);
        if (!std::isfinite(wbar))
            throw ConvergenceError(kModule, "non-finite values in the time evolution");
        const double estimate = -(wbar - prev_mean) / (T - prev_time);
        result.hbar = estimate;
        result.T_final = T;
        if (std::isfinite(prev_estimate)) {
            result.residual = std::abs(estimate - prev_estimate);
            if (result.residual <= options.tol && T >= T_floor) {
                result.converged = true;
                break;
            }
        } else {
            result.residual = std::numeric_limits<double>::infinity();
        }
        prev_estimate = estimate;
        prev_time = T;
        prev_mean = wbar;
        if (2.0 * T > options.T_max * (1.0 + 1e-12))
            break;
        T *= 2.0;
    }
    result.wall_time_s = wall_seconds() - t0;
    return result;
}

}  // namespace

CellResult solve_cell_large_T(const TorusField& a, std::span<const double> p, const CellOptions& options)
{
    const double t0 = wall_seconds();
    const Layout L = layout(a.n, a.N);
    if (p.size() != static_cast<std::size_t>(a.n))
        throw ValidationError(kModule, "p has dimension " + std::to_string(p.size()) + ", field has " + std::to_string(a.n));
    if (a.values.size() != L.total)
        throw ValidationError(kModule, "torus field size does not match its resolution");
    if (!(options.tol > 0.0) || !(options.T_first > 0.0) || options.T_max < options.T_first)
        throw ValidationError(kModule, "need tol > 0 and 0 < T_first <= T_max");

    // Coarse levels settle the transient cheaply; each finer level starts
    // from the prolonged profile.
    std::vector<TorusField> levels{a};
    if (options.warm_start)
        while (levels.back().N % 2 == 0 && levels.back().N / 2 >= options.warm_start_min_N)
            levels.push_back(restrict_field(levels.back()));
    std::vector<double> w(layout(a.n, levels.back().N).total, 0.0);
    CellResult result;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        if (w.size() != it->values.size())
            w = prolong(w, a.n, it->N / 2);
        result = evolve(*it, p, options, w);
    }
    result.wall_time_s = wall_seconds() - t0;
    return result;
}

CellResult solve_cell_large_T(const Medium& medium, std::span<const double> p, const CellOptions& options)
{
    return solve_cell_large_T(sample_torus(medium, options.N), p, options);
}

double stratified_oracle_H(const std::function<double(double)>& a1d, double p_parallel)
{
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double y) {
            const double v = a1d(y);
            if (!(v > 0.0))
                throw ValidationError(kModule, "layer speed must be positive");
            return 1.0 / v;
        },
        0.0, 1.0, 15, 1e-13, &err);
    if (!(err <= 1e-10))
        throw ConvergenceError(kModule, "quadrature error estimate " + std::to_string(err) + " above 1e-10");
    return std::abs(p_parallel) / integral;
}

double effective_H_from_shape(const geom::Polytope& D, std::span<const double> p) { return geom::support(D, p); }

double effective_H_from_shape(const geom::PointCloud& D, std::span<const double> p)
{
    if (D.empty())
        throw ValidationError(kModule, "empty shape cloud");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < D.size(); ++i)
        best = std::max(best, dot(D.point(i), p));
    return best;
}

}  // namespace frontforge::cell
