#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"

namespace inclab::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    if (s.empty()) return parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(item);
    if (s.back() == sep) parts.emplace_back();
    return parts;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& raw, bool allow_inf) {
    const std::string s = trim(raw);
    if (allow_inf && (s == "inf" || s == "INF" || s == "infinity")) return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError(key, "expected a number, got '" + raw + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ValidationError(key, "expected a finite number, got '" + raw + "'");
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ValidationError(key, "expected an integer, got '" + raw + "'");
    }
    if (used != s.size()) throw ValidationError(key, "expected an integer, got '" + raw + "'");
    return v;
}

Json from_flag(const KeySpec& k, const std::string& raw) {
    switch (k.kind) {
        case Kind::Int: return parse_int(k.name, raw);
        case Kind::Real: return parse_real(k.name, raw, false);
        case Kind::RealOrInf: {
            const double v = parse_real(k.name, raw, true);
            return std::isinf(v) ? Json("inf") : Json(v);
        }
        case Kind::Text: return raw;
        case Kind::Flag: {
            if (raw == "true" || raw == "1" || raw.empty()) return true;
            if (raw == "false" || raw == "0") return false;
            throw ValidationError(k.name, "expected true or false, got '" + raw + "'");
        }
        case Kind::IntList: {
            Json arr = Json::array();
            for (const auto& part : split(raw, ',')) arr.push_back(parse_int(k.name, part));
            return arr;
        }
        case Kind::RealList: {
            Json arr = Json::array();
            for (const auto& part : split(raw, ',')) arr.push_back(parse_real(k.name, part, false));
            return arr;
        }
    }
    return raw;
}

void check_type(const KeySpec& k, const Json& v) {
    auto fail = [&](const std::string& expected) { throw ValidationError(k.name, "expected " + expected); };
    switch (k.kind) {
        case Kind::Int:
            if (!v.is_number_integer()) fail("an integer");
            break;
        case Kind::Real:
            if (!v.is_number()) fail("a number");
            break;
        case Kind::RealOrInf:
            if (!v.is_number() && !(v.is_string() && v.get<std::string>() == "inf")) fail("a number or \"inf\"");
            break;
        case Kind::Text:
            if (!v.is_string()) fail("a string");
            break;
        case Kind::Flag:
            if (!v.is_boolean()) fail("true or false");
            break;
        case Kind::IntList:
            if (!v.is_array()) fail("a list of integers");
            for (const auto& x : v)
                if (!x.is_number_integer()) fail("a list of integers");
            break;
        case Kind::RealList:
            if (!v.is_array()) fail("a list of numbers");
            for (const auto& x : v)
                if (!x.is_number()) fail("a list of numbers");
            break;
    }
}

const KeySpec* find_key(const std::vector<KeySpec>& keys, const std::string& name) {
    for (const auto& k : keys)
        if (k.name == name) return &k;
    return nullptr;
}

}  // namespace

std::vector<KeySpec> common_keys() {
    return {
        {"seed", Kind::Int, 1, "master seed"},
        {"workers", Kind::Int, 1, "worker threads for replica parallelism"},
        {"out", Kind::Text, "out", "output directory"},
    };
}

const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs = {
        {"simulate-ip",
         "simulate the inclusion process and write embedded measures",
         {
             {"L", Kind::Int, 64, "number of sites"},
             {"N", Kind::Int, 64, "number of particles"},
             {"d", Kind::Real, 0.125, "diffusivity"},
             {"times", Kind::RealList, Json::array({0.5, 1.0}), "snapshot times"},
             {"replicas", Kind::Int, 10, "independent replicas"},
             {"init", Kind::Text, "flat",
              "flat | condensed | stationary | partition:p1,p2,... | dirac:z (mesoscopic location)"},
             {"time_scale", Kind::Text, "raw", "raw | meso (times divided by dL)"},
             {"embedding", Kind::Text, "macro", "macro | meso"},
             {"observable", Kind::Text, "",
              "optional scalar output: poly:c0,c1,... | window:power,cutoff,exponent | const:c"},
         }},
        {"simulate-labelled",
         "simulate the labelled process and write type-space measures",
         {
             {"L", Kind::Int, 64, "number of sites"},
             {"N", Kind::Int, 64, "number of particles"},
             {"d", Kind::Real, 0.125, "diffusivity"},
             {"times", Kind::RealList, Json::array({0.5, 1.0}), "snapshot times"},
             {"replicas", Kind::Int, 10, "independent replicas"},
             {"init", Kind::Text, "flat", "flat | condensed | uniform"},
             {"time_scale", Kind::Text, "raw", "raw | meso"},
         }},
        {"simulate-diffusion",
         "sample the single-particle dual diffusions",
         {
             {"process", Kind::Text, "meso", "meso | macro | jacobi"},
             {"theta", Kind::Real, 1.0, "mutation rate (macro and jacobi)"},
             {"z0", Kind::RealOrInf, 0.0, "start point (inf allowed for meso)"},
             {"times", Kind::RealList, Json::array({1.0}), "sampling times"},
             {"replicas", Kind::Int, 10000, "samples per time"},
             {"scheme", Kind::Text, "auto", "auto | exact | euler (auto is exact for meso)"},
             {"dt", Kind::Real, 1e-3, "Euler step"},
         }},
        {"generator-check",
         "compare discrete and limit generators over a configuration battery",
         {
             {"scale", Kind::Text, "macro", "macro | meso | fv"},
             {"grid", Kind::IntList, Json::array({64, 128, 256, 512, 1024}), "values of L"},
             {"rho", Kind::Real, 1.0, "density N/L"},
             {"theta", Kind::Real, 1.0, "dL for macro and fv"},
             {"d_exponent", Kind::Real, 0.5, "meso uses d = L^-d_exponent"},
             {"battery", Kind::Text, "default", "default | constant"},
             {"factor", Kind::Real, 0.0, "required error decrease from first to last L (0: 4 for macro/meso, 2 for fv)"},
         }},
        {"duality-check",
         "compare particle-system averages with the dual process",
         {
             {"scale", Kind::Text, "macro", "macro | meso"},
             {"L", Kind::Int, 256, "number of sites"},
             {"N", Kind::Int, 256, "number of particles"},
             {"d", Kind::Real, 1.0 / 256.0, "diffusivity"},
             {"z0", Kind::Real, 1.0, "initial atom location on the chosen scale"},
             {"times", Kind::RealList, Json::array({0.5}), "comparison times"},
             {"replicas", Kind::Int, 200, "particle replicas"},
             {"dual_samples", Kind::Int, 20000, "dual samples per time"},
             {"observable", Kind::Text, "window:0,3,4", "test function"},
             {"sigmas", Kind::Real, 3.0, "gate: residual below this many standard errors"},
         }},
        {"stationary",
         "size-biased occupation law against its geometric limit",
         {
             {"L", Kind::Int, 100000, "number of sites"},
             {"N", Kind::Int, 1000, "number of particles"},
             {"d", Kind::Real, 0.01, "diffusivity"},
             {"gamma", Kind::Real, 0.0, "geometric parameter (0: N/(dL))"},
             {"nmax", Kind::Int, 10, "largest occupation listed"},
         }},
        {"density",
         "closed-form density of the resetting dual started at z0",
         {
             {"times", Kind::RealList, Json::array({0.5, 1.0, 3.0}), "times"},
             {"z0", Kind::RealOrInf, 0.0, "start point"},
             {"zmax", Kind::Real, 10.0, "largest location"},
             {"points", Kind::Int, 201, "grid points on (0, zmax]"},
         }},
        {"pde",
         "Fokker-Planck solution against the closed form",
         {
             {"t", Kind::Real, 1.0, "final time"},
             {"zmax", Kind::Real, 30.0, "domain size"},
             {"intervals", Kind::Int, 4000, "grid intervals"},
             {"stretch", Kind::Real, 8.0, "node clustering towards 0"},
             {"dt", Kind::Real, 2e-4, "time step"},
             {"tolerance", Kind::Real, 1e-3, "gate on the max error and the refinement check"},
             {"check_refinement", Kind::Flag, false, "repeat on a finer grid"},
         }},
        {"moments",
         "solutions of the closed moment equations",
         {
             {"system", Kind::Text, "macro_mean", "macro_mean | pd | mass"},
             {"theta", Kind::Real, 1.0, "mutation rate"},
             {"initial", Kind::RealList, Json::array({1.0}),
              "macro_mean: m0; pd: phi_1..phi_k with phi_1 = 1; mass: alpha0"},
             {"times", Kind::RealList, Json::array({0.0, 0.1, 0.5, 1.0, 2.0}), "times"},
         }},
        {"reproduce-figure",
         "particle system against the dual and Exp(1) at mesoscopic times",
         {
             {"L", Kind::Int, 1024, "number of sites"},
             {"N", Kind::Int, 1024, "number of particles"},
             {"d", Kind::Real, 1.0 / 32.0, "diffusivity"},
             {"z0", Kind::Real, 25.0 / 32.0, "initial mesoscopic cluster size"},
             {"times", Kind::RealList, Json::array({1.0 / 32.0, 10.0 / 32.0, 50.0 / 32.0}), "mesoscopic times"},
             {"replicas", Kind::Int, 1000, "particle replicas"},
             {"dual_samples", Kind::Int, 10000, "dual samples per time"},
         }},
    };
    return specs;
}

const CommandSpec& command_spec(const std::string& name) {
    for (const auto& s : command_specs())
        if (s.name == name) return s;
    throw ValidationError("command", "unknown subcommand '" + name + "'");
}

Json resolve_descriptor(const CommandSpec& spec, const std::string& config_path,
                        const std::map<std::string, std::string>& flags) {
    std::vector<KeySpec> keys = spec.keys;
    for (auto& k : common_keys()) keys.push_back(k);

    Json tree = Json::object();
    for (const auto& k : keys) tree[k.name] = k.fallback;

    Json file = Json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ValidationError("config", "cannot open '" + config_path + "'");
        try {
            file = Json::parse(in);
        } catch (const std::exception& e) {
            throw ValidationError("config", std::string("not valid JSON: ") + e.what());
        }
        if (!file.is_object()) throw ValidationError("config", "descriptor must be a key-value object");
        for (auto it = file.begin(); it != file.end(); ++it) {
            if (it.key() == "command") {
                if (!it.value().is_string() || it.value().get<std::string>() != spec.name)
                    throw ValidationError("command", "descriptor is for a different subcommand");
                continue;
            }
            const KeySpec* k = find_key(keys, it.key());
            if (!k) throw ValidationError(it.key(), "unknown key for " + spec.name);
            check_type(*k, it.value());
            tree[it.key()] = it.value();
        }
    }
    for (const auto& [name, raw] : flags) {
        const KeySpec* k = find_key(keys, name);
        if (!k) throw ValidationError(name, "unknown key for " + spec.name);
        if (file.contains(name)) throw ValidationError(name, "set both in the descriptor file and by a flag");
        tree[name] = from_flag(*k, raw);
    }
    Json out = Json::object();
    out["command"] = spec.name;
    for (auto it = tree.begin(); it != tree.end(); ++it) out[it.key()] = it.value();
    return out;
}

std::int64_t Params::integer(const std::string& key) const { return tree_.at(key).get<std::int64_t>(); }

double Params::real(const std::string& key) const {
    const Json& v = tree_.at(key);
    if (v.is_string()) return std::numeric_limits<double>::infinity();
    return v.get<double>();
}

std::string Params::text(const std::string& key) const { return tree_.at(key).get<std::string>(); }

bool Params::flag(const std::string& key) const { return tree_.at(key).get<bool>(); }

std::vector<double> Params::reals(const std::string& key) const { return tree_.at(key).get<std::vector<double>>(); }

std::vector<std::int64_t> Params::integers(const std::string& key) const {
    return tree_.at(key).get<std::vector<std::int64_t>>();
}

std::int64_t Params::positive_int(const std::string& key) const {
    const auto v = integer(key);
    if (v < 1) throw ValidationError(key, "must be at least 1");
    return v;
}

double Params::positive_real(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) throw ValidationError(key, "must be positive");
    return v;
}

std::vector<double> Params::schedule(const std::string& key) const {
    const auto v = reals(key);
    if (v.empty()) throw ValidationError(key, "schedule must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0.0) throw ValidationError(key, "times must be nonnegative");
        if (i > 0 && v[i] < v[i - 1]) throw ValidationError(key, "times must be nondecreasing");
    }
    return v;
}

std::string number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file(const Params& p, RunResult& result, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(p.out());
    std::ofstream f(p.out() / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (p.out() / name).string());
    result.files.push_back(name);
}

void write_manifest(const Params& p, const std::string& command, const RunResult& result, double wall_seconds) {
    Json m = Json::object();
    m["command"] = command;
    m["descriptor"] = p.tree();
    m["seed"] = p.seed();
    m["versions"] = {{"inclab", INCLAB_VERSION},
                     {"compiler", __VERSION__},
                     {"cli11", CLI11_VERSION},
                     {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    m["outputs"] = result.files;
    m["gate"] = {{"passed", result.gate_passed}, {"message", result.gate_message}};
    m["wall_time_seconds"] = wall_seconds;
    std::filesystem::create_directories(p.out());
    std::ofstream(p.out() / "manifest.json") << m.dump(2) << '\n';
    Json replay = p.tree();
    replay.erase("out");
    replay.erase("workers");
    std::ofstream(p.out() / "descriptor.json") << replay.dump(2) << '\n';
}

}  // namespace inclab::cli
