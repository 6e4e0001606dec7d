#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace inclab::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitValidation = 2;
inline constexpr int kExitGate = 3;

// Descriptor problem tied to one key; reported with exit code 2.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& key, const std::string& constraint)
        : std::runtime_error("key `" + key + "`: " + constraint), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class Kind { Int, Real, RealOrInf, Text, Flag, IntList, RealList };

struct KeySpec {
    std::string name;
    Kind kind;
    Json fallback;
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<KeySpec> keys;
};

// Keys shared by every subcommand.
std::vector<KeySpec> common_keys();
const std::vector<CommandSpec>& command_specs();
const CommandSpec& command_spec(const std::string& name);

// Resolved parameter tree: defaults, then the descriptor file, then flags.
// A key set both in the file and by a flag is a conflict.
Json resolve_descriptor(const CommandSpec& spec, const std::string& config_path,
                        const std::map<std::string, std::string>& flags);

// Typed access to a resolved descriptor.
class Params {
public:
    explicit Params(Json tree) : tree_(std::move(tree)) {}
    const Json& tree() const { return tree_; }

    std::int64_t integer(const std::string& key) const;
    double real(const std::string& key) const;  // "inf" maps to infinity
    std::string text(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::int64_t> integers(const std::string& key) const;

    std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }
    std::size_t workers() const { return static_cast<std::size_t>(integer("workers")); }
    std::filesystem::path out() const { return text("out"); }

    std::int64_t positive_int(const std::string& key) const;
    double positive_real(const std::string& key) const;
    std::vector<double> schedule(const std::string& key) const;

private:
    Json tree_;
};

struct RunResult {
    std::vector<std::string> files;
    bool gate_passed = true;
    std::string gate_message;
};

// Writes a CSV file under the output directory and records it.
void write_file(const Params& p, RunResult& result, const std::string& name, const std::string& content);
void write_manifest(const Params& p, const std::string& command, const RunResult& result, double wall_seconds);

std::string number(double x);

RunResult run_command(const std::string& command, const Params& params);

}  // namespace inclab::cli
