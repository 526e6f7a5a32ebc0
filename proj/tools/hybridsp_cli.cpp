#include "hybridsp/runner.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace hybridsp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
    std::string scenario;
    std::string config_path;
    std::string out_dir = "out";
    std::string overrides;
    std::optional<std::uint64_t> seed;
    bool json = false;
};

ScenarioConfig load(const Options& o) {
    const ScenarioKind kind = parse_scenario(o.scenario);
    std::string text;
    if (!o.config_path.empty()) {
        std::ifstream is(o.config_path, std::ios::binary);
        if (!is) throw ConfigError("cannot read config file " + o.config_path);
        std::ostringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    ScenarioConfig cfg = load_config(kind, text);
    if (!o.overrides.empty()) apply_overrides(cfg, o.overrides);
    if (o.seed) cfg.doc["seed"] = static_cast<std::int64_t>(*o.seed);
    return cfg;
}

int cmd_run(const Options& o) {
    const ScenarioConfig cfg = load(o);
    const auto report = run_scenario(cfg, o.out_dir);
    if (o.json) {
        std::cout << report.dump(2) << '\n';
        return 0;
    }
    std::cout << report["scenario"].get<std::string>() << ": termination " << report["termination"].get<std::string>()
              << ", t = " << report["final_time"].get<double>() << ", jumps = " << report["n_jumps"].get<std::size_t>()
              << '\n';
    std::cout << "final distance to attractor: " << report["final_distance_to_attractor"].get<double>() << '\n';
    if (report.contains("final_distance_to_nash")) {
        std::cout << "final distance to Nash equilibrium: " << report["final_distance_to_nash"].get<double>() << " m\n";
    }
    std::cout << "outputs written to " << o.out_dir << '\n';
    return 0;
}

int cmd_sweep(const Options& o) {
    const ScenarioConfig cfg = load(o);
    const auto report = run_sweep(cfg, o.out_dir);
    if (o.json) {
        std::cout << report.to_json().dump(2) << '\n';
    } else {
        std::cout << "gamma tau epsilon beta | sup_distance tail_radius failures\n";
        for (const auto& e : report.entries) {
            std::cout << e.point.gamma << ' ' << e.point.tau << ' ' << e.point.epsilon << ' ' << e.point.beta << " | "
                      << e.sup_distance << ' ' << e.tail_radius << ' ' << e.numeric_failures << '\n';
        }
    }
    std::cerr << "monotonicity flags: " << report.flags.size() << '\n';
    for (const auto& f : report.flags) {
        std::cerr << "  point " << f.refined << " refines point " << f.coarse << " but tail radius grew from "
                  << f.coarse_tail << " to " << f.refined_tail << '\n';
    }
    return 0;
}

int cmd_list(const Options& o) {
    if (o.json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto k : all_scenarios()) {
            arr.push_back({{"name", scenario_name(k)}, {"description", scenario_description(k)}, {"keys", config_keys(k)}});
        }
        std::cout << arr.dump(2) << '\n';
        return 0;
    }
    for (const auto k : all_scenarios()) {
        std::string keys;
        for (const auto& key : config_keys(k)) keys += (keys.empty() ? "" : ",") + key;
        std::cout << scenario_name(k) << "\t" << scenario_description(k) << "\tkeys: " << keys << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and analysis of singularly perturbed hybrid systems"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--config", o.config_path, "TOML scenario configuration");
    app.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    app.add_option("--overrides", o.overrides, "Comma-separated key=value overrides");
    app.add_option("--seed", o.seed, "Random seed (overrides the config)");
    app.add_flag("--json", o.json, "Machine-readable output");

    auto* run = app.add_subcommand("run", "Solve a scenario and export trajectory, jumps, report and figures");
    run->add_option("scenario", o.scenario, "example1 | example2 | unicycle_nes")->required();
    auto* sweep = app.add_subcommand("sweep", "Run the practical-attractivity sweep of a scenario");
    sweep->add_option("scenario", o.scenario, "example1 | example2 | unicycle_nes")->required();
    auto* list = app.add_subcommand("list", "List scenarios and their configuration keys");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (list->parsed()) return cmd_list(o);
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ConcurrentSampling& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
