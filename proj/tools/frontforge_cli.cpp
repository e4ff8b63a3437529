// frontforge: command-line driver for environment construction, effective
// Hamiltonians, shape series, rate experiments and the ball sequence.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "frontforge/cell_solver.hpp"
#include "frontforge/config.hpp"
#include "frontforge/front_solver.hpp"
#include "frontforge/hj_solver.hpp"
#include "frontforge/serialization.hpp"
#include "frontforge/svg.hpp"

using namespace frontforge;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

struct LoadedMedium
{
    Medium medium;
    geom::ConvexBody shape;
};

LoadedMedium load_medium(const std::string& env_arg, int n)
{
    if (env_arg.empty())
        throw ValidationError("cli_io", "--env is required (spec JSON path or const:c)");
    if (env_arg.rfind("const:", 0) == 0) {
        double c = 0.0;
        try {
            c = std::stod(env_arg.substr(6));
        } catch (const std::exception&) {
            throw ValidationError("cli_io", "bad constant medium '" + env_arg + "'");
        }
        return {constant_medium(n, c), geom::Ball{n, c}};
    }
    auto env = std::make_shared<const env::Environment>(io::load_spec(env_arg));
    geom::ConvexBody shape = env->effective_polytope();
    return {hedlund_medium(env), std::move(shape)};
}

Vec parse_vec(const std::string& text)
{
    Vec v;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("cli_io", "bad number list '" + text + "'");
        }
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return v;
}

std::filesystem::path out_path(const io::ExperimentConfig& c, const std::string& name)
{
    std::filesystem::create_directories(c.output_dir);
    return std::filesystem::path(c.output_dir) / name;
}

void save_config(const io::ExperimentConfig& c)
{
    io::write_text(out_path(c, "config.json").string(), io::to_json(c).dump(2) + "\n");
}

void write_report(const io::ExperimentConfig& c, const ExperimentReport& r, const std::string& file)
{
    io::write_text(out_path(c, file).string(), r.to_csv());
    std::cout << r.summary() << "\n";
}

int run_construct_env(const io::ExperimentConfig& c)
{
    const geom::Polytope P = geom::polytope_preset(c.polytope);
    if (!P.rational_generators())
        throw ValidationError("cli_io", "preset has no rational generators");
    env::EnvironmentSpec spec;
    spec.n = P.dimension();
    spec.directions = *P.rational_generators();
    spec.delta = c.delta;
    spec.base_points = env::choose_base_points(spec.directions, c.delta, c.seed);
    spec.amplitude = c.amplitude > 0.0 ? c.amplitude : env::recommended_A(P, c.delta);
    const env::Environment environment(spec);  // validates
    const auto tubes = env::validate_tubes(spec);
    io::save_spec(out_path(c, "env.json").string(), spec);
    std::cout << "construct-env: polytope=" << c.polytope << " seed=" << c.seed
              << " validate_tubes=" << (tubes.disjoint ? "true" : "false") << " min_gap=" << format_double(tubes.min_gap)
              << " A=" << format_double(spec.amplitude) << " tube_volume=" << format_double(environment.tube_volume())
              << "\n";
    return tubes.disjoint ? 0 : kExitValidation;
}

int run_effective_h(const io::ExperimentConfig& c, int n)
{
    const auto loaded = load_medium(c.env, n);
    if (c.p_list.empty())
        throw ValidationError("cli_io", "effective-h needs at least one --p");
    cell::CellOptions opt;
    opt.N = c.N;
    opt.tol = c.tol;
    opt.flux = c.flux == "godunov" ? cell::Flux::Godunov : cell::Flux::LaxFriedrichs;
    ExperimentReport r;
    r.name = "effective_h";
    for (int d = 0; d < loaded.medium.n; ++d)
        r.columns.push_back("p" + std::to_string(d + 1));
    for (const char* col : {"hbar", "support", "rel_error", "residual", "converged", "wall_time_s"})
        r.columns.push_back(col);
    bool all_converged = true;
    for (const auto& p : c.p_list) {
        if (static_cast<int>(p.size()) != loaded.medium.n)
            throw ValidationError("cli_io", "--p has the wrong dimension");
        const auto res = cell::solve_cell_large_T(loaded.medium, p, opt);
        const double s = geom::support(loaded.shape, p);
        Vec row = p;
        row.insert(row.end(), {res.hbar, s, s > 0.0 ? std::abs(res.hbar - s) / s : 0.0, res.residual,
                               res.converged ? 1.0 : 0.0, res.wall_time_s});
        r.add_row(row);
        all_converged = all_converged && res.converged;
    }
    if (!all_converged)
        r.flags.push_back("not-converged");
    write_report(c, r, "effective_h.csv");
    return all_converged ? 0 : kExitConvergence;
}

int run_shape(const io::ExperimentConfig& c, int n, bool cache, bool svg)
{
    const auto loaded = load_medium(c.env, n);
    if (c.t_list.empty())
        throw ValidationError("cli_io", "shape needs --t-list");
    const auto r = front::shape_series(loaded.medium, loaded.shape, c.t_list, c.h);
    write_report(c, r, "shape.csv");
    if (cache || svg) {
        front::FmmOptions fo;
        fo.h = c.h;
        fo.t_max = c.t_list.back();
        const auto field = front::fmm_arrival(loaded.medium, front::Source::unit_cell(loaded.medium.n), fo);
        if (cache)
            io::save_grid(out_path(c, "arrival.hjgrid").string(), field.to_scalar_field());
        if (svg && loaded.medium.n >= 2) {
            const auto* P = std::get_if<geom::Polytope>(&loaded.shape);
            const geom::Polytope outline =
                P ? *P : geom::Polytope::from_real_generators([&] {
                      std::vector<Vec> g;
                      for (int d = 0; d < loaded.medium.n; ++d) {
                          Vec e(static_cast<std::size_t>(loaded.medium.n), 0.0);
                          e[d] = std::get<geom::Ball>(loaded.shape).radius;
                          g.push_back(e);
                      }
                      return g;
                  }());
            std::vector<io::LabelledCloud> clouds;
            for (double t : c.t_list)
                clouds.push_back({"t=" + format_double(t), front::reachable_cloud(field, t)});
            io::SlicePlane plane;
            plane.offset = 0.5 / c.t_list.back();
            io::write_text(out_path(c, "shape.svg").string(), io::svg_front_plot(clouds, outline, plane));
        }
    }
    return 0;
}

int run_rate(const io::ExperimentConfig& c, int n)
{
    const auto loaded = load_medium(c.env, n);
    hj::RateOptions opt;
    opt.eps_list = c.eps_list.empty() ? Vec{0.25, 0.125} : c.eps_list;
    opt.t = c.t;
    opt.h_factor = c.h_factor;
    opt.probes = hj::probe_lattice(loaded.medium.n, c.probes, Vec(static_cast<std::size_t>(loaded.medium.n), 0.5));
    if (loaded.medium.environment)
        opt.representation.grid_anchor = Vec(static_cast<std::size_t>(loaded.medium.n), 0.0);
    const hj::InitialData g = c.g.rfind("file:", 0) == 0
                                  ? hj::InitialData::tabulated(io::load_grid(c.g.substr(5)))
                                  : hj::InitialData::parse(c.g);
    if (g.dimension() != loaded.medium.n)
        throw ValidationError("cli_io", "--g dimension does not match the medium");
    const auto rep = hj::rate_experiment(g, loaded.medium, loaded.shape, opt);
    write_report(c, rep.to_report(), "rate.csv");
    return 0;
}

int run_instability(const io::ExperimentConfig& c, bool with_cell)
{
    const auto seq = env::ball_approx_sequence(c.m_values, c.seed);
    ExperimentReport r;
    r.name = "instability";
    r.columns = {"m", "sup_support_error", "delta", "A", "tube_volume"};
    if (with_cell)
        r.columns.push_back("max_hbar_rel_error");
    for (const auto& member : seq) {
        Vec row{static_cast<double>(member.m), member.sup_support_error, member.spec.delta, member.spec.amplitude,
                member.tube_volume};
        if (with_cell) {
            cell::CellOptions opt;
            opt.N = c.N;
            opt.tol = c.tol;
            opt.flux = c.flux == "godunov" ? cell::Flux::Godunov : cell::Flux::LaxFriedrichs;
            const Medium med = hedlund_medium(member.spec);
            double worst = 0.0;
            for (const Vec& p : {Vec{1, 0, 0}, Vec{0.6, 0.8, 0}, Vec{1 / std::sqrt(3.0), 1 / std::sqrt(3.0), 1 / std::sqrt(3.0)}}) {
                const double s = geom::support(member.polytope, p);
                worst = std::max(worst, std::abs(cell::solve_cell_large_T(med, p, opt).hbar - s) / s);
            }
            row.push_back(worst);
        }
        r.add_row(row);
        io::save_spec(out_path(c, "env_m" + std::to_string(member.m) + ".json").string(), member.spec);
    }
    write_report(c, r, "instability.csv");
    return 0;
}

int run_validate(const io::ExperimentConfig& c)
{
    const auto spec = io::load_spec(c.env);
    const auto tubes = env::validate_tubes(spec);
    const env::Environment environment(spec);
    std::cout << "validate: n=" << spec.n << " families=" << spec.directions.size()
              << " disjoint=" << (tubes.disjoint ? "true" : "false") << " min_gap=" << format_double(tubes.min_gap)
              << " tube_volume=" << format_double(environment.tube_volume()) << "\n";
    return tubes.disjoint ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"frontforge: fronts and homogenization in periodic highway media"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    io::ExperimentConfig c;
    std::string config_path;
    int dim = 3;
    bool cache = false, svg = false, with_cell = false;
    std::vector<std::string> p_text;
    std::string t_text, eps_text;

    app.add_option("--config", config_path, "JSON config (flags given on the command line override it)");
    app.add_option("--out", c.output_dir, "Output directory");
    app.add_option("--threads", c.threads, "Worker count (default FRONTFORGE_THREADS or hardware)");
    app.add_option("--seed", c.seed, "Seed for every random choice");

    auto* construct = app.add_subcommand("construct-env", "Build and validate a Hedlund environment");
    construct->add_option("--polytope", c.polytope, "Preset: cross3, cube3, cross-diag3");
    construct->add_option("--delta", c.delta, "Tube radius");
    construct->add_option("--amplitude", c.amplitude, "Tube amplitude A (default recommended_A)");

    auto add_env = [&](CLI::App* sub) {
        sub->add_option("--env", c.env, "Environment JSON path or const:c");
        sub->add_option("--dim", dim, "Dimension for const:c media");
    };
    auto* effh = app.add_subcommand("effective-h", "Effective Hamiltonian by the large-time cell solve");
    add_env(effh);
    effh->add_option("--p", p_text, "Slope p, comma separated (repeatable)");
    effh->add_option("--N", c.N, "Cells per axis");
    effh->add_option("--tol", c.tol, "Decay-rate tolerance");
    effh->add_option("--flux", c.flux, "godunov or lax-friedrichs");

    auto* shape = app.add_subcommand("shape", "Shape series of R_t(Y)/t");
    shape->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    add_env(shape);
    shape->add_option("--t-list", t_text, "Times, comma separated");
    shape->add_option("--h", c.h, "Grid spacing");
    shape->add_flag("--cache", cache, "Write the arrival field as arrival.hjgrid");
    shape->add_flag("--svg", svg, "Write a slice plot shape.svg");

    auto* rate = app.add_subcommand("rate", "Homogenization rate experiment");
    add_env(rate);
    rate->add_option("--g", c.g, "Initial data: linear:px,py,pz | cone:x0 | bump:x0,r,height | file:grid.hjgrid");
    rate->add_option("--eps,--eps-list", eps_text, "Epsilons, comma separated");
    rate->add_option("--t", c.t, "Time");
    rate->add_option("--h-rule", c.h_factor, "h = h_rule * eps");
    rate->add_option("--probes", c.probes, "Probes per axis");

    auto* inst = app.add_subcommand("instability", "Polytope fronts approaching the ball");
    inst->add_option("--m-values", c.m_values, "Generator counts")->delimiter(',');
    inst->add_option("--N", c.N, "Cells per axis for --cell");
    inst->add_flag("--cell", with_cell, "Also compare cell-solver H with the support function");

    auto* val = app.add_subcommand("validate", "Validate an environment JSON");
    val->add_option("--env", c.env, "Environment JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (!config_path.empty()) {
            // Re-parse so command-line flags win over the file.
            io::ExperimentConfig from_file = io::config_from_json(io::Json::parse(io::read_text(config_path)));
            from_file.command = app.get_subcommands().front()->get_name();
            c = from_file;
            app.parse(argc, argv);
        }
        c.command = app.get_subcommands().front()->get_name();
        for (const auto& s : p_text)
            c.p_list.push_back(parse_vec(s));
        if (!t_text.empty())
            c.t_list = parse_vec(t_text);
        if (!eps_text.empty())
            c.eps_list = parse_vec(eps_text);
        io::validate(c);
        if (c.threads > 0)
            set_worker_count(static_cast<unsigned>(c.threads));
        save_config(c);

        if (c.command == "construct-env")
            return run_construct_env(c);
        if (c.command == "effective-h")
            return run_effective_h(c, dim);
        if (c.command == "shape")
            return run_shape(c, dim, cache, svg);
        if (c.command == "rate")
            return run_rate(c, dim);
        if (c.command == "instability")
            return run_instability(c, with_cell);
        return run_validate(c);
    } catch (const ConvergenceError& e) {
        std::cerr << e.what() << "\n";
        return kExitConvergence;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "cli_io: bad JSON: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "cli_io: " << e.what() << "\n";
        return kExitValidation;
    }
}
