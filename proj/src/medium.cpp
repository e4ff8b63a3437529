#include "frontforge/medium.hpp"

#include <algorithm>

namespace frontforge {

Medium constant_medium(int n, double c)
{
    if (!(c > 0.0))
        throw ValidationError("medium", "constant speed must be positive");
    Medium m;
    m.n = n;
    m.speed = [c](std::span<const double>) { return c; };
    m.lower = m.upper = c;
    m.label = "const:" + std::to_string(c);
    return m;
}

Medium layered_medium(int n, std::function<double(double)> a1d, double lower, double upper, std::string label)
{
    if (!(lower > 0.0) || upper < lower)
        throw ValidationError("medium", "layered speed bounds must satisfy 0 < lower <= upper");
    Medium m;
    m.n = n;
    m.speed = [f = std::move(a1d)](std::span<const double> x) { return f(x[0] - std::floor(x[0])); };
    m.lower = lower;
    m.upper = upper;
    m.label = std::move(label);
    return m;
}

Medium sine_layers(int n, double c, double b)
{
    if (!(c > std::abs(b)))
        throw ValidationError("medium", "sine layers need c > |b|");
    return layered_medium(
        n, [c, b](double y) { return c + b * std::sin(2.0 * M_PI * y); }, c - std::abs(b), c + std::abs(b),
        "sine:" + std::to_string(c) + "," + std::to_string(b));
}

Medium hedlund_medium(std::shared_ptr<const env::Environment> environment)
{
    Medium m;
    m.n = environment->dimension();
    m.speed = [e = environment.get()](std::span<const double> x) { return e->a(x); };
    m.lower = environment->min_speed();
    m.upper = environment->max_speed();
    m.label = "hedlund";
    m.environment = std::move(environment);
    return m;
}

Medium hedlund_medium(const env::EnvironmentSpec& spec)
{
    return hedlund_medium(std::make_shared<const env::Environment>(spec));
}

Medium pointwise_max(const Medium& a, const Medium& b)
{
    if (a.n != b.n)
        throw ValidationError("medium", "dimension mismatch");
    Medium m;
    m.n = a.n;
    m.speed = [fa = a.speed, fb = b.speed](std::span<const double> x) { return std::max(fa(x), fb(x)); };
    m.lower = std::max(a.lower, b.lower);
    m.upper = std::max(a.upper, b.upper);
    m.periodic = a.periodic && b.periodic;
    m.label = "max(" + a.label + "," + b.label + ")";
    return m;
}

}  // namespace frontforge
