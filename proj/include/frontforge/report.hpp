#pragma once

// Tabular experiment output: named numeric columns, free-form diagnostics and
// flags, written as CSV.

#include <map>
#include <ostream>
#include <string>

#include "frontforge/common.hpp"

namespace frontforge {

struct LineFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square of the fit residuals
    std::size_t count = 0;
};

/// Least-squares line through (x_i, y_i). Needs at least two points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log y against log x; all values must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct ExperimentReport
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<Vec> rows;
    std::map<std::string, double> diagnostics;
    std::vector<std::string> flags;

    void add_row(Vec row);
    std::size_t column(const std::string& name) const;
    Vec column_values(const std::string& name) const;
    bool has_flag(const std::string& flag) const;

    /// Header plus one line per row; columns named in `skip` are omitted.
    std::string to_csv(const std::vector<std::string>& skip = {}) const;
    /// "name: key=value ..." summary line.
    std::string summary() const;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace frontforge
