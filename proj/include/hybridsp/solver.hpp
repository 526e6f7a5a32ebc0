#pragma once

#include "hybridsp/hybrid_system.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hybridsp {

// =============================================================================
// Configuration
// =============================================================================

/// Resolution of x in C ∩ D.
enum class Priority { JumpFirst, FlowFirst };

struct SolverConfig {
    double step = 1e-3;
    double max_t = 10.0;
    std::size_t max_j = 1'000'000;
    Priority priority = Priority::JumpFirst;
    double guard_tol = 1e-9;
    int bisection_iters = 60;
    std::size_t record_stride = 1;
    /// When positive, flow samples closer than this to the previous kept
    /// sample are dropped, and jump records keep their pre/post states only
    /// when at least this much time has passed since the last stored pair.
    /// Every jump keeps its time, index and tag.
    double sample_interval = 0.0;

    /// Throws ParamError when the configuration is inconsistent.
    void validate() const;
};

// =============================================================================
// Hybrid arcs
// =============================================================================

struct Sample {
    double t = 0.0;
    State x;
};

/// Flow interval with constant jump count j.
struct Segment {
    std::size_t j = 0;
    std::vector<Sample> samples;
};

struct JumpRecord {
    double t = 0.0;
    std::size_t j = 0;  ///< jump count before the jump
    State pre;          ///< empty when dropped by sample_interval
    State post;
    std::optional<std::string> tag;
};

enum class Termination { MaxT, MaxJ, LeftDomain, NumericFailure };

const char* to_string(Termination t);

struct HybridArc {
    std::vector<Segment> segments;
    std::vector<JumpRecord> jumps;
    Termination termination = Termination::MaxT;

    [[nodiscard]] bool empty() const { return segments.empty(); }
    [[nodiscard]] const State& initial_state() const { return segments.front().samples.front().x; }
    [[nodiscard]] const State& final_state() const { return segments.back().samples.back().x; }
    [[nodiscard]] double final_time() const { return segments.back().samples.back().t; }
    [[nodiscard]] std::size_t sample_count() const;

    /// Visits every recorded sample in hybrid-time order.
    template <typename F>
    void for_each_sample(F&& f) const {
        for (const auto& seg : segments) {
            for (const auto& s : seg.samples) {
                f(HybridTime{s.t, seg.j}, s.x);
            }
        }
    }
};

/// Raised on NaN/Inf. Carries the arc computed up to the failure when
/// thrown from `solve`.
class NumericFailure : public Error {
public:
    explicit NumericFailure(const std::string& what, std::shared_ptr<const HybridArc> partial = {})
        : Error(what), partial_(std::move(partial)) {}

    [[nodiscard]] const HybridArc* partial_arc() const { return partial_.get(); }

private:
    std::shared_ptr<const HybridArc> partial_;
};

// =============================================================================
// Operations
// =============================================================================

enum class FlowStop { Budget, Guard, LeftFlowSet };

struct FlowResult {
    State x;
    double elapsed = 0.0;
    bool hit_guard = false;
    FlowStop stop = FlowStop::Budget;
};

/// Called after every accepted integration step with the elapsed flow time.
using StepObserver = std::function<void(double elapsed, const State& x)>;

/// One classical Runge-Kutta step of the flow map.
State rk4_step(const FlowMap& f, const State& x, double h);

/// Flows from x0 with fixed-step RK4 until a guard upcrossing, exit from
/// the flow set (both localized by bisection) or budget exhaustion.
FlowResult integrate_flow(const HybridSystem& sys, const State& x0, double budget_t,
                          const SolverConfig& cfg, const StepObserver& observer = {});

/// Evaluates the jump map at a state of the jump set.
State apply_jump(const HybridSystem& sys, const State& x, double guard_tol = 1e-9);

/// Computes a hybrid arc from x0 under the flow/jump semantics of `sys`.
/// LeftDomain, MaxT and MaxJ are recorded as the arc's termination;
/// NaN/Inf raises NumericFailure carrying the partial arc.
HybridArc solve(const HybridSystem& sys, const State& x0, const SolverConfig& cfg);

std::vector<std::pair<HybridTime, double>> distance_series(const HybridArc& arc, const SetDescriptor& set);

}  // namespace hybridsp
