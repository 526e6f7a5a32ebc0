#include "hybridsp/full_system.hpp"

#include <algorithm>
#include <cmath>

namespace hybridsp {

namespace {

/// Which block jumps from a given pre-state.
struct JumpChoice {
    bool controller = false;
    std::size_t agent = 0;
};

double max_controller_timer(const FullLayout& L, const State& x, std::size_t& arg) {
    arg = 0;
    for (std::size_t i = 1; i < L.N(); ++i) {
        if (x[L.ctrl.timer(i)] > x[L.ctrl.timer(arg)]) arg = i;
    }
    return x[L.ctrl.timer(arg)];
}

double max_plant_timer(const FullLayout& L, const State& x, std::size_t& arg) {
    arg = 0;
    for (std::size_t i = 1; i < L.N(); ++i) {
        if (x[L.plant(i) + uni::kTimer] > x[L.plant(arg) + uni::kTimer]) arg = i;
    }
    return x[L.plant(arg) + uni::kTimer];
}

/// Controller updates take precedence; among unicycles the lowest index
/// with the largest timer jumps first.
JumpChoice choose_jump(const FullLayout& L, const State& x) {
    const std::span<const double> chi(x.data(), L.ctrl.size());
    if (const auto i = triggered_agent(L.ctrl, chi, kTriggerTol)) {
        return {true, *i};
    }
    std::size_t ic = 0;
    std::size_t ip = 0;
    const double tc = max_controller_timer(L, x, ic);
    const double tp = max_plant_timer(L, x, ip);
    return tp >= tc ? JumpChoice{false, ip} : JumpChoice{true, ic};
}

void apply_controller(const FullSystemModel& m, const Measurement& J, State& x, std::size_t i) {
    const auto& L = m.layout;
    const State pos = m.positions(x);
    controller_jump(m.nes, L.ctrl, std::span<double>(x.data(), L.ctrl.size()), pos, J, i);
}

void apply_plant(const FullSystemModel& m, State& x, std::size_t i) {
    const auto& L = m.layout;
    const Point2 ref{x[L.ctrl.u(i)], x[L.ctrl.u(i) + 1]};
    unicycle_jump(m.unicycles[i], ref, std::span<double>(x.data() + L.plant(i), uni::kSize));
}

/// Box on the controller block: xi in the filter box, timers in [0, 1];
/// with `u_star`, u pinned to it. Oscillator pairs are measured by their
/// distance to the unit circle.
SetDescriptor controller_set(const ControllerLayout& L, double bound, std::optional<State> u_star) {
    auto project = [L, bound, u_star](const State& chi) {
        State p = chi;
        for (std::size_t i = 0; i < L.N; ++i) {
            for (std::size_t d = 0; d < 2; ++d) {
                if (u_star) p[L.u(i) + d] = (*u_star)[2 * i + d];
                p[L.xi(i) + d] = std::clamp(p[L.xi(i) + d], -bound, bound);
                const std::size_t k = L.mu(i) + 2 * d;
                const double r = std::hypot(p[k], p[k + 1]);
                if (r > 0.0) {
                    p[k] /= r;
                    p[k + 1] /= r;
                } else {
                    p[k] = 1.0;
                }
            }
            p[L.timer(i)] = std::clamp(p[L.timer(i)], 0.0, 1.0);
        }
        return p;
    };
    SetDescriptor s;
    s.projection = project;
    s.distance = [project](const State& chi) { return distance(chi, project(chi)); };
    s.membership = [dist = s.distance](const State& chi) { return dist(chi) <= 1e-12; };
    s.tolerance = 1e-12;
    return s;
}

}  // namespace

State FullSystemModel::positions(const State& x) const {
    State p(2 * layout.N());
    for (std::size_t i = 0; i < layout.N(); ++i) {
        p[2 * i] = x[layout.plant(i) + uni::kX];
        p[2 * i + 1] = x[layout.plant(i) + uni::kY];
    }
    return p;
}

State FullSystemModel::fast_flow(const State& x) const {
    State out;
    out.reserve(3 * layout.N());
    State dq(uni::kSize);
    for (std::size_t i = 0; i < layout.N(); ++i) {
        unicycle_flow(unicycles[i], std::span<const double>(x.data() + layout.plant(i), uni::kSize), dq);
        out.push_back(dq[uni::kX]);
        out.push_back(dq[uni::kY]);
        out.push_back(dq[uni::kThetaE]);
    }
    return out;
}

FullSystemModel build_full_system(const GameParams& g, const NESControllerParams& nes,
                                  const std::vector<UnicycleParams>& uni, double epsilon, Measurement J) {
    g.validate();
    nes.validate(g.agents());
    const std::size_t N = g.agents();
    if (uni.size() != N) {
        throw ParamError("full system: need one unicycle parameter set per agent");
    }
    for (const auto& u : uni) {
        u.validate();
        if (u.omega_r != uni.front().omega_r) {
            throw ParamError("full system: all unicycles must share omega_r");
        }
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ParamError("full system: epsilon must be positive");
    }
    if (!J) J = game_measurement(g);

    FullSystemModel m;
    m.layout = FullLayout{ControllerLayout{N}};
    m.game = g;
    m.nes = nes;
    m.unicycles = uni;
    m.nash = solve_nash_quadratic(g);
    m.epsilon = epsilon;
    const FullLayout L = m.layout;
    const double omega_r = uni.front().omega_r;

    auto& sys = m.system;
    sys.n = L.size();
    sys.labels = controller_labels(N);
    for (std::size_t i = 0; i < N; ++i) {
        const std::string k = std::to_string(i + 1);
        for (const char* name : {"x", "y", "theta_e", "timer", "theta", "v_hat", "omega_hat"}) {
            sys.labels.push_back(std::string("p") + k + "_" + name);
        }
    }
    sys.labels.push_back("theta_r");

    sys.flow_map = [L, nes, uni, epsilon, omega_r](const State& x) {
        State d(x.size(), 0.0);
        for (std::size_t i = 0; i < L.N(); ++i) {
            d[L.ctrl.timer(i)] = 1.0 / (nes.tau0 * nes.tau[i]);
            const std::span<double> dq(d.data() + L.plant(i), uni::kSize);
            unicycle_flow(uni[i], std::span<const double>(x.data() + L.plant(i), uni::kSize), dq);
            for (double& v : dq) v /= epsilon;
        }
        d[L.theta_r()] = omega_r / epsilon;
        return d;
    };

    // Flow set: filter box and all timers in [0, 1].
    State lo(L.size(), -kInf);
    State hi(L.size(), kInf);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t d = 0; d < 2; ++d) {
            lo[L.ctrl.xi(i) + d] = -nes.filter_bound;
            hi[L.ctrl.xi(i) + d] = nes.filter_bound;
        }
        lo[L.ctrl.timer(i)] = 0.0;
        hi[L.ctrl.timer(i)] = 1.0;
        lo[L.plant(i) + uni::kTimer] = 0.0;
        hi[L.plant(i) + uni::kTimer] = 1.0;
    }
    sys.flow_set = make_box(lo, hi);

    std::vector<std::size_t> ctrl_timers;
    std::vector<std::size_t> plant_timers;
    for (std::size_t i = 0; i < N; ++i) {
        ctrl_timers.push_back(L.ctrl.timer(i));
        plant_timers.push_back(L.plant(i) + uni::kTimer);
    }
    auto timer_set = [](std::vector<std::size_t> idx) {
        SetDescriptor s;
        s.membership = [idx](const State& x) {
            return std::any_of(idx.begin(), idx.end(), [&x](std::size_t k) { return x[k] >= 1.0; });
        };
        s.distance = [idx](const State& x) {
            double d = kInf;
            for (const std::size_t k : idx) d = std::min(d, std::abs(x[k] - 1.0));
            return d;
        };
        return s;
    };
    auto timer_guards = [](const std::vector<std::size_t>& idx) {
        std::vector<Guard> gs;
        for (const std::size_t k : idx) {
            gs.push_back([k](const State& x) { return x[k] - 1.0; });
        }
        return gs;
    };
    std::vector<std::size_t> all_timers = ctrl_timers;
    all_timers.insert(all_timers.end(), plant_timers.begin(), plant_timers.end());
    sys.jump_set = timer_set(all_timers);
    sys.guards = timer_guards(all_timers);

    auto snapshot = std::make_shared<const FullSystemModel>(m);
    sys.jump_map = [snapshot, J](const State& x) {
        State out = x;
        const JumpChoice c = choose_jump(snapshot->layout, x);
        if (c.controller) {
            apply_controller(*snapshot, J, out, c.agent);
        } else {
            apply_plant(*snapshot, out, c.agent);
        }
        return out;
    };
    sys.jump_tag = [L](const State& x) -> std::optional<std::string> {
        const JumpChoice c = choose_jump(L, x);
        return c.controller ? std::string("controller") : "unicycle-" + std::to_string(c.agent + 1);
    };

    SplitJumps split;
    split.slow.set = timer_set(ctrl_timers);
    split.slow.guards = timer_guards(ctrl_timers);
    split.slow.map = [snapshot, J](const State& x) {
        State out = x;
        const auto& L = snapshot->layout;
        std::size_t i = 0;
        const auto hit = triggered_agent(L.ctrl, std::span<const double>(x.data(), L.ctrl.size()), kTriggerTol);
        if (hit) {
            i = *hit;
        } else {
            max_controller_timer(L, x, i);
        }
        apply_controller(*snapshot, J, out, i);
        return out;
    };
    split.fast.set = timer_set(plant_timers);
    split.fast.guards = timer_guards(plant_timers);
    split.fast.map = [snapshot](const State& x) {
        State out = x;
        std::size_t i = 0;
        max_plant_timer(snapshot->layout, x, i);
        apply_plant(*snapshot, out, i);
        return out;
    };
    sys.split = split;

    // Two-timescale structure.
    auto& dec = m.dec;
    dec.n1 = L.ctrl.size();
    dec.n2 = uni::kSize * N + 1;
    dec.epsilon = epsilon;
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t base = uni::kSize * i;
        dec.fast_bounded_dims.insert(dec.fast_bounded_dims.end(), {base + uni::kX, base + uni::kY, base + uni::kThetaE});
        dec.fast_unbounded_dims.insert(dec.fast_unbounded_dims.end(),
                                       {base + uni::kTimer, base + uni::kTheta, base + uni::kVHat, base + uni::kOmegaHat});
    }
    dec.fast_unbounded_dims.push_back(uni::kSize * N);
    dec.validate(L.size());

    m.steady_state.h1 = [L](const State& chi) {
        State out;
        for (std::size_t i = 0; i < L.N(); ++i) {
            out.insert(out.end(), {chi[L.ctrl.u(i)], chi[L.ctrl.u(i) + 1], 0.0});
        }
        return out;
    };
    m.steady_state.unbounded_fill = [N, omega_r](const State&) {
        State out;
        for (std::size_t i = 0; i < N; ++i) {
            out.insert(out.end(), {0.0, 0.0, 0.0, omega_r});
        }
        out.push_back(0.0);
        return out;
    };
    AffineSelection aff;
    aff.M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(3 * N), static_cast<Eigen::Index>(L.ctrl.size()));
    aff.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * N));
    for (std::size_t i = 0; i < N; ++i) {
        aff.M(static_cast<Eigen::Index>(3 * i), static_cast<Eigen::Index>(L.ctrl.u(i))) = 1.0;
        aff.M(static_cast<Eigen::Index>(3 * i + 1), static_cast<Eigen::Index>(L.ctrl.u(i) + 1)) = 1.0;
    }
    m.steady_state.affine = aff;

    m.slow_attractor = controller_set(L.ctrl, nes.filter_bound, m.nash.u);
    m.slow_domain = controller_set(L.ctrl, nes.filter_bound, std::nullopt);

    // A_chi: slow attractor, and every unicycle at (u*_i, theta_e = 0).
    const State u_star = m.nash.u;
    SetDescriptor att;
    att.distance = [L, slow = m.slow_attractor, u_star](const State& x) {
        const State chi(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(L.ctrl.size()));
        const double ds = slow.distance(chi);
        double sq = ds * ds;
        for (std::size_t i = 0; i < L.N(); ++i) {
            const double dx = x[L.plant(i) + uni::kX] - u_star[2 * i];
            const double dy = x[L.plant(i) + uni::kY] - u_star[2 * i + 1];
            const double dt = x[L.plant(i) + uni::kThetaE];
            const double tc = x[L.plant(i) + uni::kTimer];
            const double dtimer = tc < 0.0 ? -tc : (tc > 1.0 ? tc - 1.0 : 0.0);
            sq += dx * dx + dy * dy + dt * dt + dtimer * dtimer;
        }
        return std::sqrt(sq);
    };
    att.membership = [dist = att.distance](const State& x) { return dist(x) <= 1e-12; };
    att.tolerance = 1e-12;
    m.attractor = att;
    return m;
}

State full_initial_state(const FullSystemModel& m, const State& u0, const std::vector<double>& plant_t0) {
    const auto& L = m.layout;
    if (!plant_t0.empty() && plant_t0.size() != L.N()) {
        throw DimensionError("full system: need one initial plant timer per agent");
    }
    const State chi = controller_initial_state(m.nes, u0);
    State x(L.size(), 0.0);
    std::copy(chi.begin(), chi.end(), x.begin());
    for (std::size_t i = 0; i < L.N(); ++i) {
        const std::size_t b = L.plant(i);
        x[b + uni::kX] = u0[2 * i];
        x[b + uni::kY] = u0[2 * i + 1];
        x[b + uni::kTimer] = plant_t0.empty() ? 0.0 : plant_t0[i];
        x[b + uni::kOmegaHat] = m.unicycles[i].omega_r;
    }
    return x;
}

}  // namespace hybridsp
