#pragma once

// Structural checks on hybrid arcs shared by the unit tests and the
// acceptance binary. Each check returns the worst observed value or a list
// of problems; an empty list means the property holds.

#include "hybridsp/full_system.hpp"
#include "hybridsp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace hybridsp::testing {

/// Hybrid-domain well-formedness. With `dense` (no decimation) every jump
/// count has its segment and segment j+1 starts where segment j ends.
inline std::vector<std::string> domain_problems(const HybridArc& arc, bool dense) {
    std::vector<std::string> out;
    if (arc.segments.empty()) {
        out.push_back("arc has no segments");
        return out;
    }
    for (std::size_t s = 0; s < arc.segments.size(); ++s) {
        const auto& seg = arc.segments[s];
        if (seg.samples.empty()) out.push_back("segment " + std::to_string(s) + " is empty");
        for (std::size_t k = 1; k < seg.samples.size(); ++k) {
            if (!(seg.samples[k].t > seg.samples[k - 1].t)) {
                out.push_back("time not increasing in segment j=" + std::to_string(seg.j));
                break;
            }
        }
        if (s == 0) continue;
        const auto& prev = arc.segments[s - 1];
        if (!(seg.j > prev.j)) out.push_back("jump count not increasing at segment " + std::to_string(s));
        if (seg.samples.empty() || prev.samples.empty()) continue;
        const double t_end = prev.samples.back().t;
        const double t_start = seg.samples.front().t;
        if (t_start < t_end) out.push_back("segment j=" + std::to_string(seg.j) + " starts before its predecessor ends");
        if (dense && (seg.j != prev.j + 1 || t_start != t_end)) {
            out.push_back("segment j=" + std::to_string(seg.j) + " does not continue segment j=" + std::to_string(prev.j));
        }
    }
    for (std::size_t k = 0; k < arc.jumps.size(); ++k) {
        if (arc.jumps[k].j != k) out.push_back("jump record " + std::to_string(k) + " has j=" + std::to_string(arc.jumps[k].j));
        if (k > 0 && arc.jumps[k].t < arc.jumps[k - 1].t) out.push_back("jump times decrease at " + std::to_string(k));
    }
    return out;
}

/// max ||jump_map(pre) - post|| over jumps that kept their states.
inline double max_replay_error(const HybridSystem& sys, const HybridArc& arc) {
    double worst = 0.0;
    for (const auto& jr : arc.jumps) {
        if (jr.pre.empty()) continue;
        worst = std::max(worst, distance(sys.jump_map(jr.pre), jr.post));
    }
    return worst;
}

/// max over stored pre-jump states of the guard value closest to zero.
inline double max_guard_at_jump(const HybridSystem& sys, const HybridArc& arc) {
    double worst = 0.0;
    for (const auto& jr : arc.jumps) {
        if (jr.pre.empty()) continue;
        double best = kInf;
        for (const auto& g : sys.guards) best = std::min(best, std::abs(g(jr.pre)));
        worst = std::max(worst, best);
    }
    return worst;
}

/// Number of stored pre-jump states outside the jump set (within `tol`).
inline std::size_t pre_states_outside_jump_set(const HybridSystem& sys, const HybridArc& arc, double tol) {
    std::size_t bad = 0;
    for (const auto& jr : arc.jumps) {
        if (!jr.pre.empty() && !sys.jump_set.contains_within(jr.pre, tol)) ++bad;
    }
    return bad;
}

/// Visits every recorded state: flow samples and stored jump states.
template <typename F>
void for_each_state(const HybridArc& arc, F&& f) {
    arc.for_each_sample([&](HybridTime, const State& x) { f(x); });
    for (const auto& jr : arc.jumps) {
        if (!jr.pre.empty()) f(jr.pre);
        if (!jr.post.empty()) f(jr.post);
    }
}

/// max | |mu pair| - 1 | over all oscillator pairs of the fleet.
inline double max_oscillator_error(const FullSystemModel& m, const HybridArc& arc) {
    const auto& L = m.layout.ctrl;
    double worst = 0.0;
    for_each_state(arc, [&](const State& x) {
        for (std::size_t i = 0; i < L.N; ++i) {
            for (std::size_t d = 0; d < 2; ++d) {
                const double r = std::hypot(x[L.mu(i) + 2 * d], x[L.mu(i) + 2 * d + 1]);
                worst = std::max(worst, std::abs(r - 1.0));
            }
        }
    });
    return worst;
}

struct TimerRange {
    double lo = kInf;
    double hi = -kInf;
};

/// Range of every controller and plant timer over the arc.
inline TimerRange timer_range(const FullSystemModel& m, const HybridArc& arc) {
    const auto& L = m.layout;
    TimerRange r;
    for_each_state(arc, [&](const State& x) {
        for (std::size_t i = 0; i < L.N(); ++i) {
            for (const double t : {x[L.ctrl.timer(i)], x[L.plant(i) + uni::kTimer]}) {
                r.lo = std::min(r.lo, t);
                r.hi = std::max(r.hi, t);
            }
        }
    });
    return r;
}

/// Block structure of stored jumps: a controller jump resets exactly one
/// controller timer and leaves the plants alone; a unicycle jump leaves the
/// controller alone.
inline std::vector<std::string> jump_block_problems(const FullSystemModel& m, const HybridArc& arc) {
    const auto& L = m.layout;
    const std::size_t nc = L.ctrl.size();
    std::vector<std::string> out;
    for (const auto& jr : arc.jumps) {
        if (jr.pre.empty()) continue;
        const std::string tag = jr.tag.value_or("");
        const std::string at = " at t=" + std::to_string(jr.t);
        if (tag == "controller") {
            std::size_t resets = 0;
            for (std::size_t i = 0; i < L.N(); ++i) {
                const double before = jr.pre[L.ctrl.timer(i)];
                const double after = jr.post[L.ctrl.timer(i)];
                if (after == 0.0 && before >= 1.0 - 1e-6) {
                    ++resets;
                } else if (after != before) {
                    out.push_back("controller timer " + std::to_string(i) + " changed without firing" + at);
                }
            }
            if (resets != 1) out.push_back(std::to_string(resets) + " controller timers reset" + at);
            for (std::size_t k = nc; k < L.size(); ++k) {
                if (jr.pre[k] != jr.post[k]) {
                    out.push_back("controller jump changed plant state" + at);
                    break;
                }
            }
        } else if (tag.rfind("unicycle-", 0) == 0) {
            for (std::size_t k = 0; k < nc; ++k) {
                if (jr.pre[k] != jr.post[k]) {
                    out.push_back("unicycle jump changed controller state" + at);
                    break;
                }
            }
        } else {
            out.push_back("untagged jump" + at);
        }
    }
    return out;
}

/// max ||bounded fast flow|| at (x1, H(x1)) over up to `count` slow states
/// taken evenly from the arc.
inline double steady_state_residual(const TwoTimescaleModel& m, const HybridArc& arc, std::size_t count) {
    std::vector<State> slow;
    arc.for_each_sample([&](HybridTime, const State& x) { slow.push_back(m.dec.slow(x)); });
    const std::size_t stride = std::max<std::size_t>(1, slow.size() / std::max<std::size_t>(1, count));
    double worst = 0.0;
    for (std::size_t k = 0; k < slow.size(); k += stride) {
        const State lifted = m.steady_state.lift(slow[k], m.dec);
        const State f = m.system.flow_map(lifted);
        worst = std::max(worst, norm(m.dec.bounded_fast(f)));
    }
    return worst;
}

}  // namespace hybridsp::testing
