#pragma once

#include "hybridsp/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace hybridsp {

using Point2 = std::array<double, 2>;

/// Quadratic source-seeking game on the plane:
///   h_i(u) = |u_i - s_i|^2 + c sum_{j != i} |u_i - u_j|^2.
struct GameParams {
    std::vector<Point2> sources = {{-4.0, -8.0}, {-12.0, -3.0}, {1.0, 7.0}, {16.0, 8.0}};
    double c = 0.25;

    [[nodiscard]] std::size_t agents() const { return sources.size(); }
    void validate() const;
};

/// Stacked actions u = (u_1, ..., u_N), two entries per agent. Throws
/// IndexError when i >= N.
double game_cost(const GameParams& g, std::size_t i, const State& u);

/// Gradient of h_i with respect to u_i.
Point2 game_gradient(const GameParams& g, std::size_t i, const State& u);

/// All N costs at once.
std::vector<double> game_costs(const GameParams& g, const State& u);

struct NashSolution {
    State u;                ///< stacked equilibrium actions
    double residual = 0.0;  ///< max_i |grad_i h_i(u)|
};

/// Solves the stacked first-order conditions with a dense LU factorisation.
/// Throws SingularSystem when the pseudo-gradient is not invertible.
NashSolution solve_nash_quadratic(const GameParams& g);

/// max_i |grad_i h_i(u)|.
double nash_residual(const GameParams& g, const State& u);

}  // namespace hybridsp
