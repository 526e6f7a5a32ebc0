#include "hybridsp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hybridsp {

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("x" + std::to_string(i));
    }
    return labels;
}

void SolverConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ParamError("solver: step must be positive");
    }
    if (!(max_t > 0.0)) {
        throw ParamError("solver: max_t must be positive");
    }
    if (step > max_t) {
        throw ParamError("solver: step exceeds max_t");
    }
    if (max_j == 0) {
        throw ParamError("solver: max_j must be positive");
    }
    if (!(guard_tol > 0.0)) {
        throw ParamError("solver: guard_tol must be positive");
    }
    if (bisection_iters < 1) {
        throw ParamError("solver: bisection_iters must be at least 1");
    }
    if (record_stride == 0) {
        throw ParamError("solver: record_stride must be positive");
    }
    if (!(sample_interval >= 0.0) || !std::isfinite(sample_interval)) {
        throw ParamError("solver: sample_interval must be finite and non-negative");
    }
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::MaxT: return "MaxT";
        case Termination::MaxJ: return "MaxJ";
        case Termination::LeftDomain: return "LeftDomain";
        case Termination::NumericFailure: return "NumericFailure";
    }
    return "Unknown";
}

std::size_t HybridArc::sample_count() const {
    std::size_t n = 0;
    for (const auto& seg : segments) {
        n += seg.samples.size();
    }
    return n;
}

State rk4_step(const FlowMap& f, const State& x, double h) {
    const std::size_t n = x.size();
    const State k1 = f(x);
    State tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    const State k2 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    const State k3 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    const State k4 = f(tmp);
    State out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

namespace {

std::vector<double> eval_guards(const std::vector<Guard>& guards, const State& x) {
    std::vector<double> g;
    g.reserve(guards.size());
    for (const auto& guard : guards) {
        g.push_back(guard(x));
    }
    return g;
}

}  // namespace

FlowResult integrate_flow(const HybridSystem& sys, const State& x0, double budget_t,
                          const SolverConfig& cfg, const StepObserver& observer) {
    cfg.validate();
    if (!(budget_t > 0.0)) {
        throw ParamError("integrate_flow: budget must be positive");
    }
    if (x0.size() != sys.n) {
        throw DimensionError("integrate_flow: state dimension does not match system");
    }
    if (!all_finite(x0)) {
        throw NumericFailure("integrate_flow: non-finite initial state");
    }
    if (!sys.flow_set.contains_within(x0, cfg.guard_tol)) {
        throw DomainError("integrate_flow: initial state outside the flow set");
    }

    State x = x0;
    double elapsed = 0.0;
    std::vector<double> g_start = eval_guards(sys.guards, x);

    // Guards that start negative and end nonnegative; returns the largest
    // such guard value, or a negative number when none crossed.
    auto crossing = [&](const State& y) {
        double worst = -1.0;
        for (std::size_t k = 0; k < sys.guards.size(); ++k) {
            if (g_start[k] < 0.0) {
                worst = std::max(worst, sys.guards[k](y));
            }
        }
        return worst;
    };

    for (std::size_t k = 1; elapsed < budget_t; ++k) {
        const double target = std::min(budget_t, static_cast<double>(k) * cfg.step);
        const double h = target - elapsed;
        if (h <= 0.0) {
            break;
        }
        State xn = rk4_step(sys.flow_map, x, h);
        if (!all_finite(xn)) {
            throw NumericFailure("integrate_flow: non-finite state at t+" + std::to_string(target));
        }

        double g_hi = crossing(xn);
        if (g_hi >= 0.0) {
            double lo = 0.0;
            double hi = h;
            State x_hi = std::move(xn);
            for (int it = 0; it < cfg.bisection_iters && g_hi > cfg.guard_tol; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
                State xm = rk4_step(sys.flow_map, x, mid);
                const double gm = crossing(xm);
                if (gm >= 0.0) {
                    hi = mid;
                    x_hi = std::move(xm);
                    g_hi = gm;
                } else {
                    lo = mid;
                }
            }
            elapsed += hi;
            if (observer) observer(elapsed, x_hi);
            return {std::move(x_hi), elapsed, true, FlowStop::Guard};
        }

        if (!sys.flow_set.contains_within(xn, cfg.guard_tol)) {
            double lo = 0.0;
            double hi = h;
            State x_lo = x;
            for (int it = 0; it < cfg.bisection_iters; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
                State xm = rk4_step(sys.flow_map, x, mid);
                if (sys.flow_set.contains_within(xm, cfg.guard_tol)) {
                    lo = mid;
                    x_lo = std::move(xm);
                } else {
                    hi = mid;
                }
            }
            elapsed += lo;
            if (observer && lo > 0.0) observer(elapsed, x_lo);
            return {std::move(x_lo), elapsed, false, FlowStop::LeftFlowSet};
        }

        x = std::move(xn);
        elapsed = target;
        if (observer) observer(elapsed, x);
    }
    return {std::move(x), elapsed, false, FlowStop::Budget};
}

State apply_jump(const HybridSystem& sys, const State& x, double guard_tol) {
    if (x.size() != sys.n) {
        throw DimensionError("apply_jump: state dimension does not match system");
    }
    if (!sys.jump_set.contains_within(x, guard_tol)) {
        throw DomainError("apply_jump: state outside the jump set");
    }
    State post = sys.jump_map(x);
    if (post.size() != sys.n) {
        throw DimensionError("apply_jump: jump map changed the state dimension");
    }
    return post;
}

HybridArc solve(const HybridSystem& sys, const State& x0, const SolverConfig& cfg) {
    cfg.validate();
    if (x0.size() != sys.n) {
        throw DimensionError("solve: state dimension does not match system");
    }
    if (!all_finite(x0)) {
        throw NumericFailure("solve: non-finite initial state");
    }
    auto in_flow = [&](const State& x) { return sys.flow_set.contains_within(x, cfg.guard_tol); };
    auto in_jump = [&](const State& x) { return sys.jump_set.contains_within(x, cfg.guard_tol); };
    if (!in_flow(x0) && !in_jump(x0)) {
        throw DomainError("solve: initial state outside C ∪ D");
    }

    HybridArc arc;
    double t = 0.0;
    std::size_t j = 0;
    State x = x0;
    bool stalled = false;
    const bool decimate = cfg.sample_interval > 0.0;
    double last_kept = 0.0;
    double last_jump_state = -kInf;

    auto keep = [&](double ts, const State& y, bool force) {
        if (!force && decimate && ts < last_kept + cfg.sample_interval) return;
        if (arc.segments.empty() || arc.segments.back().j != j) {
            arc.segments.push_back({j, {}});
        }
        auto& samples = arc.segments.back().samples;
        if (!samples.empty() && samples.back().t >= ts) return;
        samples.push_back({ts, y});
        last_kept = ts;
    };
    arc.segments.push_back({0, {{0.0, x0}}});

    auto fail = [&arc](const std::string& what) {
        arc.termination = Termination::NumericFailure;
        throw NumericFailure(what, std::make_shared<const HybridArc>(std::move(arc)));
    };

    while (true) {
        if (t >= cfg.max_t) {
            arc.termination = Termination::MaxT;
            break;
        }
        const bool d = in_jump(x);
        const bool c = in_flow(x);
        if (d && (cfg.priority == Priority::JumpFirst || !c || stalled)) {
            if (j >= cfg.max_j) {
                arc.termination = Termination::MaxJ;
                break;
            }
            State post = sys.jump_map(x);
            if (post.size() != sys.n) {
                throw DimensionError("solve: jump map changed the state dimension");
            }
            if (!all_finite(post)) {
                fail("solve: non-finite state after jump " + std::to_string(j + 1));
            }
            if (!decimate || t >= last_jump_state + cfg.sample_interval) {
                arc.jumps.push_back({t, j, x, post, sys.tag_for(x)});
                last_jump_state = t;
            } else {
                arc.jumps.push_back({t, j, {}, {}, sys.tag_for(x)});
            }
            ++j;
            x = std::move(post);
            if (!decimate) {
                arc.segments.push_back({j, {{t, x}}});
            }
            stalled = false;
            continue;
        }
        if (!c) {
            arc.termination = Termination::LeftDomain;
            break;
        }

        const double t0 = t;
        std::size_t count = 0;
        const StepObserver observer = [&](double el, const State& y) {
            if (++count % cfg.record_stride == 0) {
                keep(t0 + el, y, false);
            }
        };
        FlowResult r;
        try {
            r = integrate_flow(sys, x, cfg.max_t - t, cfg, observer);
        } catch (const NumericFailure& e) {
            fail(e.what());
        }
        t = t0 + r.elapsed;
        x = std::move(r.x);
        if (!decimate) {
            keep(t, x, true);
        }
        if (r.stop == FlowStop::LeftFlowSet || r.elapsed <= 0.0) {
            if (!in_jump(x)) {
                arc.termination = Termination::LeftDomain;
                break;
            }
            stalled = true;
        }
    }
    keep(t, x, true);
    return arc;
}

std::vector<std::pair<HybridTime, double>> distance_series(const HybridArc& arc, const SetDescriptor& set) {
    std::vector<std::pair<HybridTime, double>> out;
    out.reserve(arc.sample_count());
    arc.for_each_sample([&](HybridTime ht, const State& x) { out.emplace_back(ht, set.distance(x)); });
    return out;
}

}  // namespace hybridsp
