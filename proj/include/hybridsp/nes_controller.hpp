#pragma once

#include "hybridsp/game.hpp"
#include "hybridsp/hybrid_system.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

namespace hybridsp {

/// Asynchronous zeroth-order Nash-seeking controller. Agent i owns a 2-D
/// action u_i, a filter xi_i, two oscillator pairs mu_i and a timer t_i
/// that flows at rate 1/(tau0 tau_i) and triggers an update at t_i = 1.
struct NESControllerParams {
    double alpha = 0.05;
    double beta = 0.003;
    std::vector<double> amplitudes = {0.1, 0.1, 0.1, 0.1};
    std::vector<double> frequencies;  ///< (w_i^1, w_i^2) per agent, see generate_frequencies
    std::vector<double> tau = {1e-2, 1.5e-2, 2e-2, 1e-2};
    double tau0 = 1.0;
    std::vector<double> t0 = {0.0, 0.002, 0.004, 0.006};
    double filter_bound = 100.0;
    bool dither_in_measurement = true;  ///< false evaluates J at the unperturbed positions

    [[nodiscard]] std::size_t agents() const { return tau.size(); }

    /// Checks sizes, signs, timer spacing and frequency distinctness.
    void validate(std::size_t n_agents) const;
};

/// `count` frequencies n + U(-1/2, 1/2), n = 1..count, redrawn until no
/// frequency is near 0 or pi modulo 2 pi and no two are near-aliases of
/// each other (|w_a -/+ w_b| mod 2 pi >= 0.2). When that fails the values
/// are drawn one by one over distinct natural numbers n with the gap
/// reduced to min(0.2, pi / (4 (count + 1))).
std::vector<double> generate_frequencies(std::size_t count, std::uint64_t seed);

/// Returns J_i for every agent at the queried stacked positions.
using Measurement = std::function<std::vector<double>(std::span<const double> positions)>;

/// J_i = h_i of the game.
Measurement game_measurement(const GameParams& g);

/// Offsets into the controller block (u, xi, mu, t).
struct ControllerLayout {
    std::size_t N = 0;

    [[nodiscard]] std::size_t u(std::size_t i) const { return 2 * i; }
    [[nodiscard]] std::size_t xi(std::size_t i) const { return 2 * N + 2 * i; }
    [[nodiscard]] std::size_t mu(std::size_t i) const { return 4 * N + 4 * i; }
    [[nodiscard]] std::size_t timer(std::size_t i) const { return 8 * N + i; }
    [[nodiscard]] std::size_t size() const { return 9 * N; }
};

std::vector<std::string> controller_labels(std::size_t N);

/// Index of the agent whose timer is within `tol` of 1 (or above), if any.
/// Throws ConcurrentSampling when more than one is.
std::optional<std::size_t> triggered_agent(const ControllerLayout& L, std::span<const double> chi, double tol);

/// Applies the update of agent i in place. `positions` are the 2N measured
/// positions the dither is added to.
void controller_jump(const NESControllerParams& p, const ControllerLayout& L, std::span<double> chi,
                     std::span<const double> positions, const Measurement& J, std::size_t i);

/// Initial controller state: u = u0, xi = 0, oscillators at (1, 0), timers t0.
State controller_initial_state(const NESControllerParams& p, const State& u0);

inline constexpr double kTriggerTol = 1e-9;

/// Standalone controller in which the measured positions are the actions u.
HybridSystem build_nes_controller(const NESControllerParams& p, const GameParams& g, Measurement J = {});

}  // namespace hybridsp
