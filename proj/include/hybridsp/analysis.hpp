#pragma once

#include "hybridsp/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace hybridsp {

// =============================================================================
// Lyapunov monitors
// =============================================================================

using ScalarFn = std::function<double(double)>;

/// Candidate Lyapunov function with its decrease thresholds. Thresholds map
/// the attractor distance to the required decrease; they stand in for the
/// class-K envelopes of a certificate and are supplied per scenario.
struct LyapunovSpec {
    std::function<double(const State&)> V;
    SetDescriptor attractor;
    ScalarFn flow_threshold = [](double) { return 0.0; };
    ScalarFn jump_threshold = [](double) { return 0.0; };
    std::function<bool(const State&)> active_region = [](const State&) { return true; };
    std::optional<ScalarFn> lower_bound;
    std::optional<ScalarFn> upper_bound;
};

struct LyapunovSample {
    HybridTime time;
    double V = 0.0;
    std::optional<double> dV_flow;  ///< forward difference to the next sample of the segment
    std::optional<double> dV_jump;  ///< V(post) - V(pre), on the last sample before a jump
};

std::vector<LyapunovSample> lyapunov_along_arc(const HybridArc& arc, const LyapunovSpec& spec);

struct LyapunovViolation {
    HybridTime time;
    double distance = 0.0;
    double change = 0.0;  ///< dV_flow or dV_jump
    double bound = 0.0;   ///< the value it had to stay below
};

/// Jumps in the active region with dV_jump > -jump_threshold(d) + 1e-9.
std::vector<LyapunovViolation> check_jump_decrease(const HybridArc& arc, const LyapunovSpec& spec);

inline constexpr double kDefaultFlowSlack = 10 * 1e-3;

/// Samples in the active region with dV_flow > -flow_threshold(d) + slack.
std::vector<LyapunovViolation> check_flow_decrease(const HybridArc& arc, const LyapunovSpec& spec,
                                                   double slack = kDefaultFlowSlack);

/// Samples `count` states from `sampler` and counts violations of the
/// declared lower/upper bounds of `spec`.
std::size_t count_bound_violations(const LyapunovSpec& spec, const std::function<State(std::mt19937_64&)>& sampler,
                                   std::size_t count, std::uint64_t seed);

/// V(x) = V1(x1) + sqrt(eps) V2(x), the composite monitor for a two-timescale
/// system; V1 sees the slow block of length n1.
std::function<double(const State&)> composite_lyapunov(std::function<double(const State&)> v1,
                                                       std::function<double(const State&)> v2, std::size_t n1,
                                                       double epsilon);

// =============================================================================
// Practical attractivity sweeps
// =============================================================================

struct SweepPoint {
    double gamma = 0.0;
    double tau = 0.0;
    double epsilon = 0.0;
    double beta = 0.0;
};

/// One system instance of a sweep: the system, an initial-condition sampler
/// for the Δ-neighbourhood of the attractor, and the attractor itself.
struct SweepInstance {
    HybridSystem system;
    std::function<State(std::mt19937_64&, double Delta)> sample_initial;
    SetDescriptor attractor;
};

using SweepFactory = std::function<SweepInstance(const SweepPoint&)>;

struct SGPASProbe {
    double Delta = 1.0;
    double delta = 0.1;
    std::vector<SweepPoint> grid;
    std::size_t n_initial = 10;
    double horizon_t = 10.0;
    double tail_fraction = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AttractivityEntry {
    SweepPoint point;
    double sup_distance = 0.0;
    std::optional<double> T_hat;  ///< nullopt when some trajectory never settles within delta
    double tail_radius = 0.0;
    std::size_t n_trajectories = 0;
    std::size_t numeric_failures = 0;
};

/// Pair (coarse, refined) of grid indices where the refined point has a
/// larger tail radius than 1.1 × the coarse one.
struct MonotonicityFlag {
    std::size_t coarse = 0;
    std::size_t refined = 0;
    double coarse_tail = 0.0;
    double refined_tail = 0.0;
};

/// Finite-horizon estimates; every figure is an estimate of the asymptotic
/// quantity it names.
struct AttractivityReport {
    std::vector<AttractivityEntry> entries;
    std::vector<MonotonicityFlag> flags;

    [[nodiscard]] nlohmann::json to_json() const;
    void write_csv(std::ostream& os) const;
};

/// Per-trajectory summary of a distance series.
struct DistanceSummary {
    double sup_distance = 0.0;
    double tail_radius = 0.0;
    std::optional<double> entry_time;
};

/// Earliest sample time after which the distance stays <= r until the end.
std::optional<double> entry_time(const std::vector<std::pair<HybridTime, double>>& series, double r);

DistanceSummary summarize_distances(const std::vector<std::pair<HybridTime, double>>& series, double horizon_t,
                                    double tail_fraction, double r);

/// True when b refines a: gamma, epsilon, beta not larger, tau not smaller,
/// and at least one coordinate differs.
bool refines(const SweepPoint& a, const SweepPoint& b);

inline constexpr double kMonotonicitySlack = 0.10;

/// Receives (grid index, trajectory index, arc) for every trajectory that
/// solved. Called from worker threads.
using ArcVisitor = std::function<void(std::size_t, std::size_t, const HybridArc&)>;

/// Runs `probe.n_initial` solves per grid point (in parallel, results are
/// schedule-invariant) and aggregates boundedness, entry time and tail radius.
/// NumericFailure is counted per trajectory and does not abort the sweep.
AttractivityReport estimate_attractivity(const SweepFactory& factory, const SGPASProbe& probe,
                                         const SolverConfig& cfg, unsigned threads = 0,
                                         const ArcVisitor& visit = {});

}  // namespace hybridsp
