#pragma once

#include "hybridsp/examples.hpp"
#include "hybridsp/nes_controller.hpp"
#include "hybridsp/unicycle.hpp"

namespace hybridsp {

/// Offsets into the composed state [controller (9N), agent 1 (7), ...,
/// agent N (7), theta_r].
struct FullLayout {
    ControllerLayout ctrl;

    [[nodiscard]] std::size_t N() const { return ctrl.N; }
    [[nodiscard]] std::size_t plant(std::size_t i) const { return ctrl.size() + uni::kSize * i; }
    [[nodiscard]] std::size_t theta_r() const { return ctrl.size() + uni::kSize * ctrl.N; }
    [[nodiscard]] std::size_t size() const { return theta_r() + 1; }
};

/// Composed Nash-seeking fleet: the controller is the slow block, the
/// unicycles (flowing 1/eps faster) and theta_r the fast block.
struct FullSystemModel : TwoTimescaleModel {
    FullLayout layout;
    GameParams game;
    NESControllerParams nes;
    std::vector<UnicycleParams> unicycles;
    NashSolution nash;
    double epsilon = 1.0;

    /// Plant positions (x_i, y_i), stacked.
    [[nodiscard]] State positions(const State& x) const;

    /// Bounded part of the fast flow f2 at x: (x', y', theta_e') per agent,
    /// unscaled by eps.
    [[nodiscard]] State fast_flow(const State& x) const;
};

/// Builds the composed system. J defaults to the game costs.
FullSystemModel build_full_system(const GameParams& g, const NESControllerParams& nes,
                                  const std::vector<UnicycleParams>& uni, double epsilon, Measurement J = {});

/// Initial state: actions u0, filters 0, oscillators at (1, 0), controller
/// timers nes.t0; every unicycle parked at its u0 entry with heading 0,
/// v_hat = 0, omega_hat = omega_r and timer plant_t0[i]; theta_r = 0.
State full_initial_state(const FullSystemModel& m, const State& u0, const std::vector<double>& plant_t0 = {});

}  // namespace hybridsp
