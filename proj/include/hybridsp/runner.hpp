#pragma once

#include "hybridsp/scenario_config.hpp"

#include "json.hpp"

#include <filesystem>
#include <memory>

namespace hybridsp {

/// A configured scenario ready to solve.
struct ScenarioModel {
    ScenarioKind kind = ScenarioKind::Example1;
    std::shared_ptr<const TwoTimescaleModel> model;
    std::shared_ptr<const FullSystemModel> fleet;  ///< set for unicycle_nes
    State x0;

    [[nodiscard]] const HybridSystem& system() const { return model->system; }
};

ScenarioModel build_scenario(const ScenarioConfig& cfg);

/// Lyapunov monitor used in run reports: V1 + sqrt(eps) V2 with zero
/// thresholds, active outside the sweep's inner radius.
LyapunovSpec report_lyapunov(const ScenarioModel& sm, double inner_radius);

/// Summary of a solved arc as written to report.json.
nlohmann::json make_report(const ScenarioConfig& cfg, const ScenarioModel& sm, const HybridArc& arc);

/// Solves the scenario and writes trajectory.csv, jumps.csv, report.json,
/// phase.svg and timeseries.svg into `out_dir`. Nothing is written when the
/// configuration is invalid or the solve fails. Returns the report.
nlohmann::json run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Parameter-point factory of the scenario. Grid rows (gamma, tau, epsilon,
/// beta) set the example parameters directly; for unicycle_nes they map to
/// (alpha, tau0, plant epsilon, beta).
SweepFactory sweep_factory(const ScenarioConfig& cfg);

/// Runs the configured sweep and writes attractivity.json and
/// attractivity.csv into `out_dir`.
AttractivityReport run_sweep(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace hybridsp
