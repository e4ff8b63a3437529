#pragma once

// Explicit admissible paths in Hedlund environments: connectors between
// nearby points, runs along tube cores, and concatenated combinations of
// runs. Their durations bound arrival times from above.

#include "frontforge/hedlund_env.hpp"
#include "frontforge/medium.hpp"

namespace frontforge::paths {

/// Piecewise-linear path through (time, point) breakpoints.
class AdmissiblePath
{
  public:
    explicit AdmissiblePath(Vec start);

    int dimension() const { return static_cast<int>(points_.front().size()); }
    double duration() const { return times_.back(); }
    const Vec& start() const { return points_.front(); }
    const Vec& endpoint() const { return points_.back(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec>& points() const { return points_; }

    /// Moves to `to` in time dt (dt = 0 only for a zero move).
    void move_to(const Vec& to, double dt);
    void rest(double dt);
    void append(const AdmissiblePath& other);  // other must start at endpoint()

    Vec position(double t) const;

  private:
    std::vector<double> times_;
    std::vector<Vec> points_;
};

struct SpeedCheck
{
    bool admissible = true;
    double worst_excess = 0.0;  // max over samples of |velocity| - a
    std::size_t samples = 0;
};

/// Samples a along every moving segment at spacing <= spacing / 2 and
/// compares with the segment speed (tolerance 1e-9).
SpeedCheck check_admissible(const AdmissiblePath& path, const Medium& medium, double spacing);

/// Straight segment from p to q at speed alpha, then rest at q until
/// sqrt(n) / alpha. Needs |q - p| <= sqrt(n).
AdmissiblePath connector_path(const Vec& p, const Vec& q, double alpha);

/// Connector duration sqrt(n) / alpha.
double connector_time(int n, double alpha);

/// Closest point of line family i (any lattice translate) to x.
Vec nearest_core_point(const env::Environment& env, int i, std::span<const double> x);

struct TubeRun
{
    double time = 0.0;
    Vec endpoint;
    AdmissiblePath path;
};

/// One connector from `start` onto the nearest core of family i, then
/// `periods` closed orbits along it (sign +-1 picks the direction).
TubeRun tube_path_arrival_bound(const env::Environment& env, int i, std::int64_t periods, const Vec& start,
                                int sign = 1);

/// A vertex +-q_i of the front (velocity on the core of family i).
struct VertexRun
{
    int family = 0;
    int sign = 1;
};

struct CombinationPath
{
    AdmissiblePath path;
    Vec target;             // t * sum lambda_i v_i
    double deviation = 0.0; // |endpoint - target|
    double bound = 0.0;     // C_path >= deviation
};

/// Runs of length lambda_i t' along the vertices, each entered through a
/// connector, with t' = t - k l for k runs. Total duration t.
CombinationPath convex_combination_path(const env::Environment& env, const std::vector<double>& weights,
                                        const std::vector<VertexRun>& vertices, double t, const Vec& start);

/// Core speed of family i: |q_i|, or A |q_i| unnormalized.
double core_speed(const env::Environment& env, int i);

}  // namespace frontforge::paths
