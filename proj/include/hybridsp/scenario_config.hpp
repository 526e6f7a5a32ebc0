#pragma once

#include "hybridsp/analysis.hpp"
#include "hybridsp/examples.hpp"
#include "hybridsp/full_system.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hybridsp {

enum class ScenarioKind { Example1, Example2, UnicycleNes };

const char* scenario_name(ScenarioKind kind);
const char* scenario_description(ScenarioKind kind);

/// Throws ConfigError for names outside {example1, example2, unicycle_nes}.
ScenarioKind parse_scenario(std::string_view name);

std::vector<ScenarioKind> all_scenarios();

/// Default configuration of a scenario. It doubles as the schema: merged
/// documents may only contain keys present here (plus further
/// `[unicycle.<i>]` agent tables for unicycle_nes) with matching types.
nlohmann::json default_document(ScenarioKind kind);

/// Dotted paths of every leaf key of the defaults, sorted.
std::vector<std::string> config_keys(ScenarioKind kind);

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Example1;
    nlohmann::json doc;

    [[nodiscard]] std::uint64_t seed() const;
    [[nodiscard]] std::string to_toml() const;
};

/// Defaults merged with a TOML document. Unknown keys and type mismatches
/// raise ConfigError; integers given for float keys are widened.
ScenarioConfig load_config(ScenarioKind kind, std::string_view toml_text = {});

/// Splits `k=v,k=v` at commas outside brackets and quotes.
std::vector<std::pair<std::string, std::string>> split_overrides(std::string_view text);

/// Applies `key=value` overrides. A bare key must name exactly one leaf of
/// the scenario; dotted keys address a leaf directly. Values are TOML
/// literals; string-valued keys also accept unquoted words.
void apply_overrides(ScenarioConfig& cfg, std::string_view text);

// =============================================================================
// Typed views
// =============================================================================

SolverConfig solver_config(const ScenarioConfig& cfg);
Example1Params example1_params(const ScenarioConfig& cfg);
Example2Params example2_params(const ScenarioConfig& cfg);
GameParams game_params(const ScenarioConfig& cfg);
/// Frequencies are drawn from the seed when the configured list is empty.
NESControllerParams nes_params(const ScenarioConfig& cfg);
std::vector<UnicycleParams> unicycle_params(const ScenarioConfig& cfg);
double plant_epsilon(const ScenarioConfig& cfg);
std::vector<double> plant_timers(const ScenarioConfig& cfg);
/// Initial actions; the sources when the configured list is empty.
State initial_actions(const ScenarioConfig& cfg);
SGPASProbe sweep_probe(const ScenarioConfig& cfg);
unsigned sweep_threads(const ScenarioConfig& cfg);

}  // namespace hybridsp
