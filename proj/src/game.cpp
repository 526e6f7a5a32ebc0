#include "hybridsp/game.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace hybridsp {

void GameParams::validate() const {
    if (sources.empty()) {
        throw ParamError("game: at least one agent is required");
    }
    if (!std::isfinite(c)) {
        throw ParamError("game: coupling c must be finite");
    }
    for (const auto& s : sources) {
        if (!std::isfinite(s[0]) || !std::isfinite(s[1])) {
            throw ParamError("game: source coordinates must be finite");
        }
    }
}

namespace {

void check_actions(const GameParams& g, const State& u) {
    if (u.size() != 2 * g.agents()) {
        throw DimensionError("game: action vector must have 2N entries");
    }
}

void check_index(const GameParams& g, std::size_t i) {
    if (i >= g.agents()) {
        throw IndexError("game: agent index " + std::to_string(i) + " out of range");
    }
}

double sq(double v) { return v * v; }

}  // namespace

double game_cost(const GameParams& g, std::size_t i, const State& u) {
    check_index(g, i);
    check_actions(g, u);
    const double ux = u[2 * i];
    const double uy = u[2 * i + 1];
    double h = sq(ux - g.sources[i][0]) + sq(uy - g.sources[i][1]);
    for (std::size_t j = 0; j < g.agents(); ++j) {
        if (j == i) continue;
        h += g.c * (sq(ux - u[2 * j]) + sq(uy - u[2 * j + 1]));
    }
    return h;
}

Point2 game_gradient(const GameParams& g, std::size_t i, const State& u) {
    check_index(g, i);
    check_actions(g, u);
    Point2 grad{};
    for (int d = 0; d < 2; ++d) {
        const double ui = u[2 * i + d];
        double acc = 2.0 * (ui - g.sources[i][d]);
        for (std::size_t j = 0; j < g.agents(); ++j) {
            if (j == i) continue;
            acc += 2.0 * g.c * (ui - u[2 * j + d]);
        }
        grad[d] = acc;
    }
    return grad;
}

std::vector<double> game_costs(const GameParams& g, const State& u) {
    std::vector<double> out(g.agents());
    for (std::size_t i = 0; i < g.agents(); ++i) {
        out[i] = game_cost(g, i, u);
    }
    return out;
}

double nash_residual(const GameParams& g, const State& u) {
    double r = 0.0;
    for (std::size_t i = 0; i < g.agents(); ++i) {
        const auto grad = game_gradient(g, i, u);
        r = std::max(r, std::hypot(grad[0], grad[1]));
    }
    return r;
}

NashSolution solve_nash_quadratic(const GameParams& g) {
    g.validate();
    const auto n = static_cast<Eigen::Index>(g.agents());
    Eigen::MatrixXd A = Eigen::MatrixXd::Constant(n, n, -g.c);
    A.diagonal().setConstant(1.0 + g.c * static_cast<double>(n - 1));
    Eigen::MatrixXd rhs(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        rhs(i, 0) = g.sources[static_cast<std::size_t>(i)][0];
        rhs(i, 1) = g.sources[static_cast<std::size_t>(i)][1];
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
        throw SingularSystem("game: first-order conditions are singular");
    }
    const Eigen::MatrixXd sol = lu.solve(rhs);

    NashSolution out;
    out.u.resize(2 * g.agents());
    for (Eigen::Index i = 0; i < n; ++i) {
        out.u[2 * static_cast<std::size_t>(i)] = sol(i, 0);
        out.u[2 * static_cast<std::size_t>(i) + 1] = sol(i, 1);
    }
    if (!all_finite(out.u)) {
        throw SingularSystem("game: equilibrium is not finite");
    }
    out.residual = nash_residual(g, out.u);
    return out;
}

}  // namespace hybridsp
