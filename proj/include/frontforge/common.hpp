#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace frontforge {

using Vec = std::vector<double>;

/// Base error. Messages are prefixed with the owning module ("convex_geom: ...").
class Error : public std::runtime_error
{
  public:
    Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module)
    {}
    const std::string& module() const noexcept { return module_; }

  private:
    std::string module_;
};

/// Bad input: malformed config, violated precondition, inconsistent file.
class ValidationError : public Error
{
  public:
    using Error::Error;
};

/// A numerical procedure could not reach its requested accuracy.
class ConvergenceError : public Error
{
  public:
    using Error::Error;
};

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Vec scaled(std::span<const double> a, double s)
{
    Vec r(a.begin(), a.end());
    for (auto& x : r)
        x *= s;
    return r;
}

inline Vec add(std::span<const double> a, std::span<const double> b)
{
    Vec r(a.begin(), a.end());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] += b[i];
    return r;
}

inline Vec sub(std::span<const double> a, std::span<const double> b)
{
    Vec r(a.begin(), a.end());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] -= b[i];
    return r;
}

/// Warnings (e.g. under-resolved tubes) go through one replaceable sink.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& module, const std::string& message);

/// Worker count: FRONTFORGE_THREADS if set, otherwise the hardware concurrency.
unsigned worker_count();
void set_worker_count(unsigned workers);

/// Runs body(i) for i in [0, count) on worker_count() threads. Exceptions from
/// workers are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Seconds since an arbitrary epoch, for wall_time columns.
double wall_seconds();

}  // namespace frontforge
