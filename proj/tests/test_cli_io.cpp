#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "frontforge/config.hpp"
#include "frontforge/serialization.hpp"
#include "frontforge/svg.hpp"

using namespace frontforge;
using namespace frontforge::io;
namespace fs = std::filesystem;

namespace {

front::ScalarField sample_grid()
{
    front::ScalarField f;
    f.n = 3;
    f.dims = {3, 2, 2};
    f.origin = {-0.5, 0.0, 1.25};
    f.h = 0.125;
    for (int i = 0; i < 12; ++i)
        f.values.push_back(i * 0.1 - 0.3);
    f.values[5] = front::kUnreached;
    return f;
}

std::string encoded(const front::ScalarField& f)
{
    std::ostringstream out(std::ios::binary);
    io::write_grid(out, f);
    return out.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("frontforge_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(FRONTFORGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("grid round trip")
{
    const auto f = sample_grid();
    std::istringstream in(encoded(f), std::ios::binary);
    CHECK(io::read_grid(in) == f);
}

TEST_CASE("grid reader rejects damaged files")
{
    const std::string good = encoded(sample_grid());
    auto fails_with = [](const std::string& bytes, const std::string& what) {
        std::istringstream in(bytes, std::ios::binary);
        try {
            (void)io::read_grid(in);
        } catch (const ValidationError& e) {
            return std::string(e.what()).find(what) != std::string::npos;
        }
        return false;
    };
    CHECK(fails_with(good.substr(0, good.size() - 3), "unexpected EOF"));
    CHECK(fails_with(good + std::string(8, '\0'), "header dims inconsistent"));
    CHECK(fails_with(good.substr(0, 10), "unexpected EOF"));
    std::string magic = good;
    magic[0] = 'X';
    CHECK(fails_with(magic, "bad magic"));
    std::string version = good;
    version[7] = '9';
    CHECK(fails_with(version, "unsupported version"));
}

TEST_CASE("environment spec JSON round trip")
{
    env::EnvironmentSpec s;
    s.n = 3;
    s.directions = *geom::polytope_preset("cross-diag3").rational_generators();
    s.base_points = env::choose_base_points(s.directions, 0.1, 7);
    s.delta = 0.1;
    s.amplitude = 3.0;
    CHECK(io::spec_from_json(io::to_json(s)) == s);
    CHECK(io::to_json(s).at("A") == 3.0);
    const fs::path dir = scratch("spec");
    io::save_spec((dir / "env.json").string(), s);
    CHECK(io::load_spec((dir / "env.json").string()) == s);
    CHECK_THROWS_AS(io::load_spec((dir / "missing.json").string()), ValidationError);
}

TEST_CASE("polytope JSON round trip and presets")
{
    const auto P = geom::polytope_preset("cross-diag3");
    const auto Q = io::polytope_from_json(io::to_json(P));
    CHECK(Q.generators() == P.generators());
    CHECK(io::polytope_from_json(io::Json("cube3")).generator_count() == 4);
}

TEST_CASE("config JSON round trip and schema checks")
{
    ExperimentConfig c;
    c.command = "rate";
    c.env = "const:1";
    c.eps_list = {0.25, 0.125};
    c.p_list = {{1, 0, 0}};
    CHECK(config_from_json(to_json(c)) == c);
    auto j = to_json(c);
    j["bogus"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ValidationError);
    c.command = "dance";
    CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("svg plot is deterministic and carries an escaped legend")
{
    geom::PointCloud cloud(3);
    cloud.push_back(Vec{0.5, 0.2, 0.0});
    cloud.push_back(Vec{-0.3, 0.6, 0.01});
    const std::vector<io::LabelledCloud> clouds{{"t=4 <a&b>", cloud}};
    const auto P = geom::polytope_preset("cross3");
    const std::string a = io::svg_front_plot(clouds, P, {});
    CHECK(a == io::svg_front_plot(clouds, P, {}));
    CHECK(a.find("t=4 &lt;a&amp;b&gt;") != std::string::npos);
    CHECK(a.find("<polygon") != std::string::npos);
    CHECK(io::polytope_section(P, {}).size() == 4);
}

TEST_CASE("svg plot without clouds and with the polytope vertices")
{
    const auto P = geom::polytope_preset("cross3");
    const std::string outline = io::svg_front_plot({}, P, {});
    CHECK(outline.find("<polygon") != std::string::npos);
    CHECK(outline.find("<circle") == std::string::npos);
    geom::PointCloud verts(3);
    for (const auto& v : P.vertices())
        verts.push_back(v);
    const std::string both = io::svg_front_plot({{"t", verts}, {"2t", verts}}, P, {});
    CHECK(both.find(">t<") != std::string::npos);
    CHECK(both.find(">2t<") != std::string::npos);
}

TEST_CASE("command line tool")
{
    const fs::path dir = scratch("cli");
    CHECK(run_cli("--out " + dir.string() + " construct-env --polytope cross3 --delta 0.2 --seed 7") == 0);
    REQUIRE(fs::exists(dir / "env.json"));
    CHECK(env::validate_tubes(io::load_spec((dir / "env.json").string())).disjoint);
    CHECK(run_cli("--out " + dir.string() + " validate --env " + (dir / "env.json").string()) == 0);
    CHECK(run_cli("--out " + dir.string() + " effective-h --env const:2 --dim 2 --p 1,0 --N 16") == 0);
    CHECK(fs::exists(dir / "effective_h.csv"));
    const fs::path bad = scratch("cli_bad");
    CHECK(run_cli("--out " + bad.string() + " effective-h --env const:2 --p 1,x") == 2);
    CHECK(run_cli("--out " + bad.string() + " construct-env --polytope dodecahedron") == 2);
    CHECK(run_cli("--no-such-flag") == 2);
    CHECK_FALSE(fs::exists(bad / "config.json"));
}

TEST_SUITE("properties")
{
    TEST_CASE("grid encoding is deterministic and lossless on random fields")
    {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> N(0.0, 10.0);
        for (int k = 0; k < 20; ++k) {
            front::ScalarField f;
            f.n = 1 + static_cast<int>(rng() % 3);
            f.h = std::abs(N(rng)) + 1e-3;
            std::size_t total = 1;
            for (int d = 0; d < f.n; ++d) {
                f.dims.push_back(1 + rng() % 5);
                f.origin.push_back(N(rng));
                total *= f.dims.back();
            }
            for (std::size_t i = 0; i < total; ++i)
                f.values.push_back(N(rng));
            const std::string bytes = encoded(f);
            CHECK(bytes == encoded(f));
            std::istringstream in(bytes, std::ios::binary);
            CHECK(io::read_grid(in) == f);
        }
    }
}
