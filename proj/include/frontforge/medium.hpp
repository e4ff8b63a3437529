#pragma once

// A speed field a(x) > 0 together with its bounds. Hedlund environments,
// constant media and layered media all reduce to this.

#include <functional>
#include <memory>
#include <string>

#include "frontforge/common.hpp"
#include "frontforge/hedlund_env.hpp"

namespace frontforge {

struct Medium
{
    int n = 3;
    std::function<double(std::span<const double>)> speed;
    double lower = 1.0;  // inf a
    double upper = 1.0;  // sup a
    bool periodic = true;  // Z^n periodic
    std::string label;
    std::shared_ptr<const env::Environment> environment;  // set for Hedlund media

    double operator()(std::span<const double> x) const { return speed(x); }
    bool is_constant() const { return lower == upper; }
};

Medium constant_medium(int n, double c);

/// a(x) = a1d(x_1 mod 1).
Medium layered_medium(int n, std::function<double(double)> a1d, double lower, double upper, std::string label);

/// a(x) = c + b sin(2 pi x_1), c > |b|.
Medium sine_layers(int n, double c, double b);

Medium hedlund_medium(std::shared_ptr<const env::Environment> environment);
Medium hedlund_medium(const env::EnvironmentSpec& spec);

/// Pointwise max / min of two media (used by monotonicity tests).
Medium pointwise_max(const Medium& a, const Medium& b);

}  // namespace frontforge
