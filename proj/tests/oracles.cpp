#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

double line_family_distance(const I3& u, const V3& bu, const I3& v, const V3& bv)
{
    const I3 N = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    const std::int64_t g = std::gcd(std::gcd(std::abs(N[0]), std::abs(N[1])), std::abs(N[2]));
    const double len = std::sqrt(static_cast<double>(N[0] * N[0] + N[1] * N[1] + N[2] * N[2]));
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        s += (bv[i] - bu[i]) * static_cast<double>(N[i]);
    const double r = std::fmod(std::fmod(s, static_cast<double>(g)) + static_cast<double>(g), static_cast<double>(g));
    return std::min(r, static_cast<double>(g) - r) / len;
}

double brute_line_distance(const V3& x, const V3& q, const V3& base, int K)
{
    const double qq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    double best = std::numeric_limits<double>::infinity();
    for (int i = -K; i <= K; ++i)
        for (int j = -K; j <= K; ++j)
            for (int k = -K; k <= K; ++k) {
                const V3 w = {x[0] - base[0] - i, x[1] - base[1] - j, x[2] - base[2] - k};
                const double s = (w[0] * q[0] + w[1] * q[1] + w[2] * q[2]) / qq;
                double d2 = 0.0;
                for (int c = 0; c < 3; ++c)
                    d2 += (w[c] - s * q[c]) * (w[c] - s * q[c]);
                best = std::min(best, std::sqrt(d2));
            }
    return best;
}

double cube_support(const std::vector<double>& p)
{
    double s = 0.0;
    for (double v : p)
        s += std::abs(v);
    return s;
}

double cross_support(const std::vector<double>& p)
{
    double s = 0.0;
    for (double v : p)
        s = std::max(s, std::abs(v));
    return s;
}

double generator_support(const std::vector<std::vector<double>>& q, const std::vector<double>& p)
{
    double best = 0.0;
    for (const auto& g : q) {
        double d = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            d += g[i] * p[i];
        best = std::max(best, std::abs(d));
    }
    return best;
}

double stratified_closed_form(double c, double b, double p)
{
    return std::sqrt(c * c - b * b) * std::abs(p);
}

double blend(double s)
{
    auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    if (s <= 0.0)
        return 1.0;
    if (s >= 1.0)
        return 0.0;
    return f(1.0 - s) / (f(s) + f(1.0 - s));
}

double brute_hausdorff(const std::vector<std::vector<double>>& E, const std::vector<std::vector<double>>& F)
{
    auto directed = [](const auto& A, const auto& B) {
        double worst = 0.0;
        for (const auto& a : A) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& b : B) {
                double d2 = 0.0;
                for (std::size_t i = 0; i < a.size(); ++i)
                    d2 += (a[i] - b[i]) * (a[i] - b[i]);
                best = std::min(best, d2);
            }
            worst = std::max(worst, std::sqrt(best));
        }
        return worst;
    };
    return std::max(directed(E, F), directed(F, E));
}

double hopf_lax_linear(const std::vector<double>& p, const std::vector<double>& x, double t, double support_value)
{
    double px = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        px += p[i] * x[i];
    return px - t * support_value;
}

}  // namespace oracle
