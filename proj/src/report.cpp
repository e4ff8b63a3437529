#include "frontforge/report.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace frontforge {

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("report", "line fit needs at least two (x, y) pairs");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw ValidationError("report", "line fit needs distinct x values");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        rr += r * r;
    }
    f.residual = std::sqrt(rr / n);
    f.count = x.size();
    return f;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y)
{
    Vec lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ValidationError("report", "log-log fit needs positive values");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

void ExperimentReport::add_row(Vec row)
{
    if (row.size() != columns.size())
        throw ValidationError("report", "row has " + std::to_string(row.size()) + " values, report has " +
                                            std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
}

std::size_t ExperimentReport::column(const std::string& col) const
{
    const auto it = std::find(columns.begin(), columns.end(), col);
    if (it == columns.end())
        throw ValidationError("report", "no column '" + col + "' in " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

Vec ExperimentReport::column_values(const std::string& col) const
{
    const std::size_t c = column(col);
    Vec out;
    for (const auto& r : rows)
        out.push_back(r[c]);
    return out;
}

bool ExperimentReport::has_flag(const std::string& flag) const
{
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string ExperimentReport::to_csv(const std::vector<std::string>& skip) const
{
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (std::find(skip.begin(), skip.end(), columns[c]) == skip.end())
            keep.push_back(c);
    std::ostringstream out;
    for (std::size_t i = 0; i < keep.size(); ++i)
        out << (i ? "," : "") << columns[keep[i]];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < keep.size(); ++i)
            out << (i ? "," : "") << format_double(r[keep[i]]);
        out << '\n';
    }
    return out.str();
}

std::string ExperimentReport::summary() const
{
    std::ostringstream out;
    out << name << ":";
    for (const auto& [k, v] : diagnostics)
        out << ' ' << k << '=' << format_double(v);
    for (const auto& f : flags)
        out << " [" << f << ']';
    return out.str();
}

}  // namespace frontforge
