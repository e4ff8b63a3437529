#pragma once

// Experiment configuration shared by the CLI subcommands. A run is
// reproducible from its config (the seed included).

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "frontforge/common.hpp"

namespace frontforge::io {

struct ExperimentConfig
{
    std::string command = "validate";  // construct-env | effective-h | shape | rate | instability | validate
    std::string env;                   // spec JSON path, or const:c
    std::string polytope = "cross3";   // preset for construct-env
    double delta = 0.2;
    double amplitude = 0.0;            // 0: recommended_A
    std::uint64_t seed = 1;
    int N = 64;
    double h = 1.0 / 32.0;
    double tol = 1e-3;
    std::string flux = "godunov";      // godunov | lax-friedrichs
    std::vector<Vec> p_list;
    Vec t_list;
    Vec eps_list;
    double t = 1.0;
    double h_factor = 1.0 / 8.0;
    std::string g = "linear:0.5773502691896258,0.5773502691896258,0.5773502691896258";
    int probes = 3;
    std::vector<int> m_values{3, 6, 12};
    std::string output_dir = ".";
    int threads = 0;                   // 0: FRONTFORGE_THREADS or hardware

    bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& known_commands();

/// Throws ValidationError("cli_io: ...") on schema violations.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace frontforge::io
