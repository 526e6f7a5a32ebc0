#pragma once

#include "hybridsp/perturbation.hpp"

namespace hybridsp {

/// A two-timescale hybrid system together with everything needed to derive
/// its boundary-layer and reduced systems.
struct TwoTimescaleModel {
    HybridSystem system;
    TimescaleDecomposition dec;
    SteadyStateMap steady_state;
    SetDescriptor attractor;       ///< full-state target set
    SetDescriptor slow_attractor;  ///< A, on the slow block
    SetDescriptor slow_domain;     ///< X1
};

// =============================================================================
// Example 1: attractivity without stability of the slow state
//
//   u' = gamma max{0, 1 - |u|/R},  v' = 1/tau,  x' = -(x - u)/eps   on [0,R]x[0,1]x[0,R]
//   (u, v, x)+ = (x/2, 0, R)                                          when v = 1
// =============================================================================

struct Example1Params {
    double gamma = 0.01;
    double tau = 1.0;
    double epsilon = 1e-3;
    double R = 10.0;
    State x0 = {5.0, 0.0, 5.0};

    void validate() const;
};

TwoTimescaleModel build_example1(const Example1Params& p);

// =============================================================================
// Example 2: jumps map M_A into itself
//
//   u' = gamma,  v' = 1/tau,  x' = -(x - u)/eps   on R x [0,1] x R
//   (u, v, x)+ = (x/2, 0, 2x)                     when v = 1
// =============================================================================

struct Example2Params {
    double gamma = 0.1;
    double tau = 1.0;
    double epsilon = 1e-2;
    State x0 = {2.0, 0.0, 2.0};

    void validate() const;
};

TwoTimescaleModel build_example2(const Example2Params& p);

/// V1(u, v) = (2 - v) u^2, the reduced-system certificate shared by both
/// examples (takes the slow block).
double example_v1(const State& slow);

/// V2(x) = (x - u)^2 / 2 on the full state (u, v, x).
double example_v2(const State& x);

}  // namespace hybridsp
