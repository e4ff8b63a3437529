#include "frontforge/config.hpp"

#include <algorithm>

namespace frontforge::io {

namespace {

constexpr const char* kModule = "cli_io";

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(kModule, std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace

const std::vector<std::string>& known_commands()
{
    static const std::vector<std::string> names = {"construct-env", "effective-h", "shape",
                                                   "rate",          "instability", "validate"};
    return names;
}

void validate(const ExperimentConfig& c)
{
    const auto& names = known_commands();
    if (std::find(names.begin(), names.end(), c.command) == names.end())
        throw ValidationError(kModule, "unknown command '" + c.command + "'");
    if (!(c.delta > 0.0) || c.amplitude < 0.0)
        throw ValidationError(kModule, "delta must be positive and amplitude nonnegative");
    if (c.N < 4 || !(c.h > 0.0) || !(c.tol > 0.0) || !(c.t > 0.0) || !(c.h_factor > 0.0))
        throw ValidationError(kModule, "N >= 4 and h, tol, t, h_factor > 0 required");
    if (c.flux != "godunov" && c.flux != "lax-friedrichs")
        throw ValidationError(kModule, "flux must be godunov or lax-friedrichs");
    if (c.probes < 1 || c.threads < 0)
        throw ValidationError(kModule, "probes >= 1 and threads >= 0 required");
    for (double t : c.t_list)
        if (!(t > 0.0))
            throw ValidationError(kModule, "t list entries must be positive");
    for (double e : c.eps_list)
        if (!(e > 0.0))
            throw ValidationError(kModule, "eps list entries must be positive");
    for (int m : c.m_values)
        if (m < 3)
            throw ValidationError(kModule, "ball sequence members need m >= 3");
    static const std::vector<std::string> presets = {"cross3", "cube3", "cross-diag3", "cross2", "square2"};
    if (std::find(presets.begin(), presets.end(), c.polytope) == presets.end())
        throw ValidationError(kModule, "unknown polytope preset '" + c.polytope + "'");
}

nlohmann::json to_json(const ExperimentConfig& c)
{
    return nlohmann::json{{"command", c.command},   {"env", c.env},
                          {"polytope", c.polytope}, {"delta", c.delta},
                          {"amplitude", c.amplitude}, {"seed", c.seed},
                          {"N", c.N},               {"h", c.h},
                          {"tol", c.tol},           {"flux", c.flux},
                          {"p_list", c.p_list},     {"t_list", c.t_list},
                          {"eps_list", c.eps_list}, {"t", c.t},
                          {"h_factor", c.h_factor}, {"g", c.g},
                          {"probes", c.probes},     {"m_values", c.m_values},
                          {"output_dir", c.output_dir}, {"threads", c.threads}};
}

ExperimentConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ValidationError(kModule, "config must be a JSON object");
    static const std::vector<std::string> keys = {"command", "env",    "polytope", "delta",    "amplitude",
                                                  "seed",    "N",      "h",        "tol",      "flux",
                                                  "p_list",  "t_list", "eps_list", "t",        "h_factor",
                                                  "g",       "probes", "m_values", "output_dir", "threads"};
    for (const auto& [key, value] : j.items())
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ValidationError(kModule, "unknown config key '" + key + "'");
    ExperimentConfig c;
    read(j, "command", c.command);
    read(j, "env", c.env);
    read(j, "polytope", c.polytope);
    read(j, "delta", c.delta);
    read(j, "amplitude", c.amplitude);
    read(j, "seed", c.seed);
    read(j, "N", c.N);
    read(j, "h", c.h);
    read(j, "tol", c.tol);
    read(j, "flux", c.flux);
    read(j, "p_list", c.p_list);
    read(j, "t_list", c.t_list);
    read(j, "eps_list", c.eps_list);
    read(j, "t", c.t);
    read(j, "h_factor", c.h_factor);
    read(j, "g", c.g);
    read(j, "probes", c.probes);
    read(j, "m_values", c.m_values);
    read(j, "output_dir", c.output_dir);
    read(j, "threads", c.threads);
    validate(c);
    return c;
}

}  // namespace frontforge::io
