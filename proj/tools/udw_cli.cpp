// udw-tomo: runs the curve, grid and tomography scenarios and writes CSV outputs.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "udw/errors.hpp"
#include "udw/scenarios.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool quadrature = false;
};

udw::ScenarioConfig load(const std::string& path, const Overrides& o) {
    udw::ScenarioConfig c = udw::load_config(path);
    if (o.out) c.output_dir = *o.out;
    if (o.seed) c.seed = *o.seed;
    if (o.threads) c.threads = *o.threads;
    if (o.quadrature) c.quadrature_columns = true;
    udw::validate(c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smeared-detector field tomography scenarios"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--out", o.out, "Output directory (overrides output_dir)");
    app.add_option("--seed", o.seed, "Base RNG seed (overrides seed)");
    app.add_option("--threads", o.threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    app.add_flag("--enable-quadrature-columns", o.quadrature, "Add smeared quadrature columns to state curves");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a scenario from a JSON config");
    run->add_option("config", config_path, "Config file")->required();
    auto* check = app.add_subcommand("validate", "Validate a config and print it fully resolved");
    check->add_option("config", config_path, "Config file")->required();
    auto* list = app.add_subcommand("list-scenarios", "List scenario ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*list) {
            for (const auto& info : udw::list_scenarios()) {
                std::cout << udw::to_string(info.id) << "\t" << info.summary << "\n";
            }
            return 0;
        }
        const udw::ScenarioConfig cfg = load(config_path, o);
        if (*check) {
            std::cout << udw::resolved_json(cfg);
            return 0;
        }
        const udw::RunReport report = udw::run(cfg);
        std::cout << udw::to_string(cfg.id) << ":\n";
        for (const auto& line : report.summary) std::cout << "  " << line << "\n";
        if (report.point_errors) std::cout << "  rows with errors: " << report.point_errors << "\n";
        for (const auto& f : report.files) std::cout << "  wrote " << f.generic_string() << "\n";
        return 0;
    } catch (const udw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}
