#include "hybridsp/examples.hpp"

#include <algorithm>
#include <cmath>

namespace hybridsp {

namespace {

void check_state3(const State& x0, const char* who) {
    if (x0.size() != 3) {
        throw ParamError(std::string(who) + ": x0 must have three entries (u, v, x)");
    }
}

TimescaleDecomposition three_state_decomposition(double epsilon) {
    TimescaleDecomposition dec;
    dec.n1 = 2;
    dec.n2 = 1;
    dec.epsilon = epsilon;
    dec.fast_bounded_dims = {0};
    return dec;
}

SteadyStateMap x_equals_u() {
    SteadyStateMap h;
    h.h1 = [](const State& slow) { return State{slow[0]}; };
    AffineSelection aff;
    aff.M = Eigen::MatrixXd::Zero(1, 2);
    aff.M(0, 0) = 1.0;
    aff.b = Eigen::VectorXd::Zero(1);
    h.affine = aff;
    return h;
}

Guard timer_guard() {
    return [](const State& x) { return x[1] - 1.0; };
}

}  // namespace

void Example1Params::validate() const {
    if (!(gamma >= 0.0) || !(tau > 0.0) || !(epsilon > 0.0) || !(R > 0.0)) {
        throw ParamError("example1: need gamma >= 0 and tau, epsilon, R > 0");
    }
    check_state3(x0, "example1");
    const bool ok = x0[0] >= 0.0 && x0[0] <= R && x0[1] >= 0.0 && x0[1] <= 1.0 && x0[2] >= 0.0 && x0[2] <= R;
    if (!ok) {
        throw ParamError("example1: x0 must lie in [0,R] x [0,1] x [0,R]");
    }
}

TwoTimescaleModel build_example1(const Example1Params& p) {
    p.validate();
    TwoTimescaleModel m;
    auto& sys = m.system;
    sys.n = 3;
    sys.labels = {"u", "v", "x"};
    sys.flow_map = [gamma = p.gamma, tau = p.tau, eps = p.epsilon, R = p.R](const State& s) {
        return State{gamma * std::max(0.0, 1.0 - std::abs(s[0]) / R), 1.0 / tau, -(s[2] - s[0]) / eps};
    };
    sys.jump_map = [R = p.R](const State& s) { return State{s[2] / 2.0, 0.0, R}; };
    sys.flow_set = make_box({0.0, 0.0, 0.0}, {p.R, 1.0, p.R});
    sys.jump_set = make_box({0.0, 1.0, 0.0}, {p.R, 1.0, p.R});
    sys.guards = {timer_guard()};

    m.dec = three_state_decomposition(p.epsilon);
    m.steady_state = x_equals_u();
    m.attractor = make_box({0.0, 0.0, 0.0}, {0.0, 1.0, p.R});
    m.slow_attractor = make_box({0.0, 0.0}, {0.0, 1.0});
    m.slow_domain = make_box({0.0, 0.0}, {p.R, 1.0});
    return m;
}

void Example2Params::validate() const {
    if (!(gamma >= 0.0) || !(tau > 0.0) || !(epsilon > 0.0)) {
        throw ParamError("example2: need gamma >= 0 and tau, epsilon > 0");
    }
    check_state3(x0, "example2");
    if (!(x0[1] >= 0.0 && x0[1] <= 1.0)) {
        throw ParamError("example2: v(0) must lie in [0,1]");
    }
}

TwoTimescaleModel build_example2(const Example2Params& p) {
    p.validate();
    TwoTimescaleModel m;
    auto& sys = m.system;
    sys.n = 3;
    sys.labels = {"u", "v", "x"};
    sys.flow_map = [gamma = p.gamma, tau = p.tau, eps = p.epsilon](const State& s) {
        return State{gamma, 1.0 / tau, -(s[2] - s[0]) / eps};
    };
    sys.jump_map = [](const State& s) { return State{s[2] / 2.0, 0.0, 2.0 * s[2]}; };
    sys.flow_set = make_box({-kInf, 0.0, -kInf}, {kInf, 1.0, kInf});
    sys.jump_set = make_box({-kInf, 1.0, -kInf}, {kInf, 1.0, kInf});
    sys.guards = {timer_guard()};

    m.dec = three_state_decomposition(p.epsilon);
    m.steady_state = x_equals_u();
    m.attractor = make_box({0.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    m.slow_attractor = make_box({0.0, 0.0}, {0.0, 1.0});
    m.slow_domain = make_box({-kInf, 0.0}, {kInf, 1.0});
    return m;
}

double example_v1(const State& slow) {
    return (2.0 - slow[1]) * slow[0] * slow[0];
}

double example_v2(const State& x) {
    const double e = x[2] - x[0];
    return 0.5 * e * e;
}

}  // namespace hybridsp
