#include "frontforge/serialization.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "frontforge/front_solver.hpp"
#include "frontforge/report.hpp"

namespace frontforge::io {

namespace {

constexpr const char* kModule = "cli_io";
constexpr std::array<char, 8> kMagic = {'H', 'J', 'G', 'R', 'I', 'D', '0', '1'};

template <typename T>
void put_le(std::ostream& out, T value)
{
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in)
{
    std::array<unsigned char, sizeof(T)> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
        throw ValidationError(kModule, "grid cache: unexpected EOF");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

Vec vec_from_json(const Json& j, const char* what)
{
    if (!j.is_array())
        throw ValidationError(kModule, std::string(what) + " must be an array of numbers");
    Vec v;
    for (const auto& x : j) {
        if (!x.is_number())
            throw ValidationError(kModule, std::string(what) + " must be an array of numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

template <typename T>
T field(const Json& j, const char* key)
{
    if (!j.contains(key))
        throw ValidationError(kModule, std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(kModule, std::string("key '") + key + "' has the wrong type");
    }
}

}  // namespace

Json to_json(const geom::RationalVector& q)
{
    return Json{{"num", q.numerators()}, {"den", q.denominator()}};
}

geom::RationalVector rational_from_json(const Json& j)
{
    if (!j.is_object())
        throw ValidationError(kModule, "rational vector must be {\"num\": [...], \"den\": d}");
    return geom::RationalVector(field<std::vector<std::int64_t>>(j, "num"), field<std::int64_t>(j, "den"));
}

Json to_json(const geom::Polytope& P)
{
    Json gens = Json::array();
    if (P.rational_generators()) {
        for (const auto& q : *P.rational_generators())
            gens.push_back(to_json(q));
    } else {
        for (const auto& g : P.generators())
            gens.push_back(g);
    }
    return Json{{"n", P.dimension()}, {"generators", gens}};
}

geom::Polytope polytope_from_json(const Json& j)
{
    if (j.is_string())
        return geom::polytope_preset(j.get<std::string>());
    const int n = field<int>(j, "n");
    const Json& gens = j.at("generators");
    if (!gens.is_array() || gens.empty())
        throw ValidationError(kModule, "polytope needs a nonempty generator list");
    std::optional<geom::Polytope> P;
    if (gens.front().is_object()) {
        std::vector<geom::RationalVector> q;
        for (const auto& g : gens)
            q.push_back(rational_from_json(g));
        P = geom::Polytope::from_generators(std::move(q));
    } else {
        std::vector<Vec> q;
        for (const auto& g : gens)
            q.push_back(vec_from_json(g, "generator"));
        P = geom::Polytope::from_real_generators(std::move(q));
    }
    if (P->dimension() != n)
        throw ValidationError(kModule, "polytope generators do not match n");
    return *P;
}

Json to_json(const env::EnvironmentSpec& spec)
{
    Json dirs = Json::array();
    for (const auto& q : spec.directions)
        dirs.push_back(to_json(q));
    return Json{{"n", spec.n},
                {"directions", dirs},
                {"base_points", spec.base_points},
                {"delta", spec.delta},
                {"A", spec.amplitude},
                {"profile", spec.profile},
                {"normalized", spec.normalized}};
}

env::EnvironmentSpec spec_from_json(const Json& j)
{
    if (!j.is_object())
        throw ValidationError(kModule, "environment spec must be a JSON object");
    env::EnvironmentSpec s;
    s.n = field<int>(j, "n");
    for (const auto& q : j.at("directions"))
        s.directions.push_back(rational_from_json(q));
    for (const auto& x : j.at("base_points"))
        s.base_points.push_back(vec_from_json(x, "base point"));
    s.delta = field<double>(j, "delta");
    s.amplitude = field<double>(j, "A");
    s.profile = j.value("profile", std::string(env::kSmoothBump));
    s.normalized = j.value("normalized", true);
    return s;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(kModule, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(kModule, "cannot write '" + path + "'");
    out << text;
}

env::EnvironmentSpec load_spec(const std::string& path)
{
    try {
        return spec_from_json(Json::parse(read_text(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(kModule, "bad JSON in '" + path + "': " + e.what());
    }
}

void save_spec(const std::string& path, const env::EnvironmentSpec& spec)
{
    write_text(path, to_json(spec).dump(2) + "\n");
}

void write_grid(std::ostream& out, const front::ScalarField& f)
{
    std::size_t total = 1;
    for (auto d : f.dims)
        total *= static_cast<std::size_t>(d);
    if (f.n < 1 || f.dims.size() != static_cast<std::size_t>(f.n) || f.origin.size() != f.dims.size() ||
        total != f.values.size())
        throw ValidationError(kModule, "grid cache: field dims inconsistent with its values");
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.n));
    for (auto d : f.dims)
        put_le<std::uint64_t>(out, d);
    for (double o : f.origin)
        put_le<double>(out, o);
    put_le<double>(out, f.h);
    for (double v : f.values)
        put_le<double>(out, v);
}

front::ScalarField read_grid(std::istream& in)
{
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != static_cast<std::streamsize>(magic.size()))
        throw ValidationError(kModule, "grid cache: unexpected EOF");
    if (std::memcmp(magic.data(), kMagic.data(), 6) != 0)
        throw ValidationError(kModule, "grid cache: bad magic");
    if (std::memcmp(magic.data() + 6, kMagic.data() + 6, 2) != 0)
        throw ValidationError(kModule, "grid cache: unsupported version '" + std::string(magic.data() + 6, 2) + "'");
    front::ScalarField f;
    const auto n = get_le<std::uint32_t>(in);
    if (n < 1 || n > 16)
        throw ValidationError(kModule, "grid cache: implausible dimension " + std::to_string(n));
    f.n = static_cast<int>(n);
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < n; ++d) {
        f.dims.push_back(get_le<std::uint64_t>(in));
        total *= static_cast<std::size_t>(f.dims.back());
    }
    for (std::uint32_t d = 0; d < n; ++d)
        f.origin.push_back(get_le<double>(in));
    f.h = get_le<double>(in);

    // Compare the payload length with the header before allocating.
    const auto here = in.tellg();
    if (here != std::streampos(-1)) {
        in.seekg(0, std::ios::end);
        const auto end = in.tellg();
        in.seekg(here);
        const auto remaining = static_cast<std::uint64_t>(end - here);
        if (remaining < total * sizeof(double))
            throw ValidationError(kModule, "grid cache: unexpected EOF (header dims need " +
                                               std::to_string(total * sizeof(double)) + " payload bytes, found " +
                                               std::to_string(remaining) + ")");
        if (remaining > total * sizeof(double))
            throw ValidationError(kModule, "grid cache: header dims inconsistent with payload length");
    }
    f.values.resize(total);
    for (auto& v : f.values)
        v = get_le<double>(in);
    return f;
}

void save_grid(const std::string& path, const front::ScalarField& field)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(kModule, "cannot write '" + path + "'");
    write_grid(out, field);
}

front::ScalarField load_grid(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(kModule, "cannot open '" + path + "'");
    return read_grid(in);
}

void write_cloud_csv(std::ostream& out, const front::ArrivalField& field, double t)
{
    const int n = field.dimension();
    for (int d = 0; d < n; ++d)
        out << 'x' << d + 1 << ',';
    out << "T\n";
    const geom::PointCloud cloud = front::reachable_cloud(field, t);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        Vec x(p.begin(), p.end());
        for (auto& v : x)
            v *= t;
        for (int d = 0; d < n; ++d)
            out << format_double(x[d]) << ',';
        out << format_double(field.at(x)) << '\n';
    }
}

}  // namespace frontforge::io
