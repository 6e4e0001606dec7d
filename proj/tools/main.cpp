#include <chrono>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "cli.hpp"
#include "inclab/errors.hpp"

namespace {

std::string kind_hint(inclab::cli::Kind kind) {
    using inclab::cli::Kind;
    switch (kind) {
        case Kind::Int: return "INT";
        case Kind::Real: return "REAL";
        case Kind::RealOrInf: return "REAL|inf";
        case Kind::Text: return "TEXT";
        case Kind::Flag: return "true|false";
        case Kind::IntList: return "INT,...";
        case Kind::RealList: return "REAL,...";
    }
    return "VALUE";
}

std::string fallback_text(const inclab::cli::Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ",") + x.dump();
        return s;
    }
    return v.dump();
}

struct Subcommand {
    CLI::App* app = nullptr;
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
};

}  // namespace

int main(int argc, char** argv) {
    using namespace inclab::cli;
    CLI::App app{"Inclusion process laboratory: simulation, generator and duality checks"};
    app.require_subcommand(1);

    std::vector<std::unique_ptr<Subcommand>> subs;
    for (const auto& spec : command_specs()) {
        auto sub = std::make_unique<Subcommand>();
        sub->app = app.add_subcommand(spec.name, spec.help);
        sub->app->add_option("--config", sub->config, "JSON descriptor with key-value settings");
        std::vector<KeySpec> keys = spec.keys;
        for (auto& k : common_keys()) keys.push_back(k);
        for (const auto& k : keys) {
            auto* opt = sub->app->add_option("--" + k.name, sub->values[k.name],
                                             k.help + " [default: " + fallback_text(k.fallback) + "]");
            opt->type_name(kind_hint(k.kind));
            if (k.kind == Kind::Flag) opt->expected(0, 1);
            sub->options[k.name] = opt;
        }
        subs.push_back(std::move(sub));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    for (const auto& sub : subs) {
        if (!sub->app->parsed()) continue;
        const std::string command = sub->app->get_name();
        std::map<std::string, std::string> given;
        for (const auto& [name, opt] : sub->options)
            if (opt->count() > 0) given[name] = sub->values[name];
        try {
            const auto start = std::chrono::steady_clock::now();
            Params params(resolve_descriptor(command_spec(command), sub->config, given));
            if (params.integer("workers") < 1) throw ValidationError("workers", "must be at least 1");
            if (params.integer("seed") < 0) throw ValidationError("seed", "must be nonnegative");
            const RunResult result = run_command(command, params);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            write_manifest(params, command, result, wall);
            for (const auto& f : result.files) std::cout << (params.out() / f).string() << '\n';
            if (!result.gate_message.empty())
                std::cout << "gate " << (result.gate_passed ? "passed" : "failed") << ": " << result.gate_message
                          << '\n';
            return result.gate_passed ? 0 : kExitGate;
        } catch (const ValidationError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitValidation;
        } catch (const inclab::InvalidArgument& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitValidation;
        } catch (const inclab::MismatchedSetup& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitValidation;
        } catch (const inclab::DoesNotFit& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitValidation;
        } catch (const inclab::DomainMismatch& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitValidation;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return 1;
}
