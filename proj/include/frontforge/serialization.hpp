#pragma once

// JSON for polytopes and environment specs, the HJGRID01 binary grid
// cache, and CSV export of reachable clouds.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "frontforge/arrival_field.hpp"
#include "frontforge/convex_geom.hpp"
#include "frontforge/hedlund_env.hpp"

namespace frontforge::io {

using Json = nlohmann::json;

Json to_json(const geom::RationalVector& q);
geom::RationalVector rational_from_json(const Json& j);

/// {"n": 3, "generators": [...]}; rational generators are written as
/// {"num": [...], "den": d}, real ones as plain arrays.
Json to_json(const geom::Polytope& P);
geom::Polytope polytope_from_json(const Json& j);

Json to_json(const env::EnvironmentSpec& spec);
env::EnvironmentSpec spec_from_json(const Json& j);

/// Reads a whole file; ValidationError("cli_io: cannot open ...") on failure.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

env::EnvironmentSpec load_spec(const std::string& path);
void save_spec(const std::string& path, const env::EnvironmentSpec& spec);

/// Grid cache: "HJGRID01", u32 n, u64 dims[n], f64 origin[n], f64 h, then
/// the values as little-endian f64 with x_1 fastest.
void write_grid(std::ostream& out, const front::ScalarField& field);
front::ScalarField read_grid(std::istream& in);
void save_grid(const std::string& path, const front::ScalarField& field);
front::ScalarField load_grid(const std::string& path);

/// Boundary nodes of {T <= t} (unscaled, mirrors unfolded) with their T:
/// header x1,...,xn,T.
void write_cloud_csv(std::ostream& out, const front::ArrivalField& field, double t);

}  // namespace frontforge::io
