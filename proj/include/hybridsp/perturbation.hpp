#pragma once

#include "hybridsp/solver.hpp"

#include <Eigen/Dense>

#include "json.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybridsp {

// =============================================================================
// Two-timescale structure
// =============================================================================

/// Partition x = (x1, x2) with x1 slow (first n1 entries) and x2 fast.
/// The fast block is split into bounded dims x2' and unbounded dims x2''
/// (logic states, reference phases); indices are relative to the fast block.
struct TimescaleDecomposition {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double epsilon = 1.0;
    std::vector<std::size_t> fast_bounded_dims;
    std::vector<std::size_t> fast_unbounded_dims;

    /// Throws DimensionError unless n1 + n2 == n and the fast index sets
    /// partition [0, n2).
    void validate(std::size_t n) const;

    [[nodiscard]] State slow(const State& x) const;
    [[nodiscard]] State fast(const State& x) const;
    [[nodiscard]] State bounded_fast(const State& x) const;
};

/// Affine form h1(x1) = M x1 + b of a steady-state selection.
struct AffineSelection {
    Eigen::MatrixXd M;
    Eigen::VectorXd b;
};

/// Steady-state map H(x1) = H1(x1) × X2''. `h1` returns the bounded fast
/// coordinates; `unbounded_fill` picks representative values for x2''
/// (zeros when unset) so that full states can be assembled.
struct SteadyStateMap {
    std::function<State(const State&)> h1;
    std::function<State(const State&)> unbounded_fill;
    std::optional<AffineSelection> affine;

    /// Full state (x1, h1(x1), fill(x1)).
    [[nodiscard]] State lift(const State& x1, const TimescaleDecomposition& dec) const;
    /// Tests x2' ∈ H1(x1) within `tol`.
    [[nodiscard]] bool membership(const State& x1, const State& x2_bounded, double tol = 1e-9) const;
};

// =============================================================================
// Derived systems
// =============================================================================

enum class LayerVariant { H1, H2 };

/// Boundary-layer system: slow block frozen, fast block at unit rate, flow
/// set restricted to ((A + rho B) ∩ X1) × X2. H1 has no jumps; H2 keeps the
/// fast-block jumps of `sys.split`.
HybridSystem make_boundary_layer(const HybridSystem& sys, const TimescaleDecomposition& dec,
                                 const SetDescriptor& slow_attractor, double rho, LayerVariant variant);

/// Reduced system on the slow block: flows and jumps evaluated at
/// (x1, H(x1)). For split systems the slow jump block supplies G_r.
HybridSystem make_reduced(const HybridSystem& sys, const TimescaleDecomposition& dec, const SteadyStateMap& h);

// =============================================================================
// Manifolds
// =============================================================================

enum class ManifoldKind { MRho, MA };

/// M_rho = {(x1, x2) : x1 ∈ (A + rho B) ∩ X1, x2 ∈ H(x1)} or
/// M_A = {(x1, x2) : x1 ∈ A, x2 ∈ H(x1)}. Unbounded fast coordinates do not
/// contribute to distances.
struct ManifoldSet {
    ManifoldKind kind = ManifoldKind::MA;
    double rho = 0.0;
    TimescaleDecomposition dec;
    SteadyStateMap steady_state;
    SetDescriptor slow_attractor;  ///< needs a projection
    SetDescriptor slow_domain;     ///< X1; universe when unset

    [[nodiscard]] SetDescriptor as_set(double tolerance = 1e-9) const;
};

ManifoldSet make_m_rho(const TimescaleDecomposition& dec, const SteadyStateMap& h, const SetDescriptor& slow_attractor,
                       double rho, std::optional<SetDescriptor> slow_domain = std::nullopt);
ManifoldSet make_m_a(const TimescaleDecomposition& dec, const SteadyStateMap& h, const SetDescriptor& slow_attractor);

/// Euclidean distance from x to the manifold. Exact when the steady-state
/// selection is affine and the unconstrained projection is feasible,
/// otherwise a compass search refined to a step of 1e-8.
double manifold_distance(const State& x, const ManifoldSet& m);

/// rho = 1.1 × the largest slow distance to A along the arc.
double default_rho(const HybridArc& arc, const TimescaleDecomposition& dec, const SetDescriptor& slow_attractor);

// =============================================================================
// Jump regularity
// =============================================================================

enum class RegularityVariant { AllJumps, SlowJumpsOnly };

/// Slack added to the flow interval before comparing with tau.
inline constexpr double kRegularitySlack = 1e-9;

struct JumpLabel {
    double t = 0.0;
    std::size_t j = 0;
    double interval = 0.0;
    bool regular = true;
};

struct JumpRegularityReport {
    double tau = 0.0;
    RegularityVariant variant = RegularityVariant::AllJumps;
    std::vector<JumpLabel> labels;
    std::size_t n_irregular = 0;
    std::optional<double> last_irregular_t;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Tags counted as slow-block jumps by default.
bool is_slow_tag(const std::string& tag);

/// Labels jumps as tau-regular when the preceding flow interval (interval
/// since the previous slow jump for SlowJumpsOnly) is at least tau.
JumpRegularityReport classify_jumps(const HybridArc& arc, double tau, RegularityVariant variant,
                                    const std::function<bool(const std::string&)>& slow_tag = is_slow_tag);

}  // namespace hybridsp
