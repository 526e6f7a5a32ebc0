#include "hybridsp/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hybridsp {

// =============================================================================
// TimescaleDecomposition / SteadyStateMap
// =============================================================================

void TimescaleDecomposition::validate(std::size_t n) const {
    if (n1 + n2 != n) {
        throw DimensionError("decomposition: n1 + n2 does not match the system dimension");
    }
    if (!(epsilon > 0.0)) {
        throw ParamError("decomposition: epsilon must be positive");
    }
    std::vector<int> seen(n2, 0);
    for (auto idx : fast_bounded_dims) {
        if (idx >= n2) throw DimensionError("decomposition: bounded fast index out of range");
        ++seen[idx];
    }
    for (auto idx : fast_unbounded_dims) {
        if (idx >= n2) throw DimensionError("decomposition: unbounded fast index out of range");
        ++seen[idx];
    }
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
        throw DimensionError("decomposition: fast index sets must partition the fast block");
    }
}

State TimescaleDecomposition::slow(const State& x) const {
    return State(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n1));
}

State TimescaleDecomposition::fast(const State& x) const {
    return State(x.begin() + static_cast<std::ptrdiff_t>(n1), x.end());
}

State TimescaleDecomposition::bounded_fast(const State& x) const {
    State out;
    out.reserve(fast_bounded_dims.size());
    for (auto idx : fast_bounded_dims) {
        out.push_back(x[n1 + idx]);
    }
    return out;
}

State SteadyStateMap::lift(const State& x1, const TimescaleDecomposition& dec) const {
    if (x1.size() != dec.n1) {
        throw DimensionError("steady-state lift: slow dimension mismatch");
    }
    State full(dec.n1 + dec.n2, 0.0);
    std::copy(x1.begin(), x1.end(), full.begin());
    const State bounded = h1(x1);
    if (bounded.size() != dec.fast_bounded_dims.size()) {
        throw DimensionError("steady-state lift: h1 returned the wrong dimension");
    }
    for (std::size_t k = 0; k < bounded.size(); ++k) {
        full[dec.n1 + dec.fast_bounded_dims[k]] = bounded[k];
    }
    if (unbounded_fill) {
        const State fill = unbounded_fill(x1);
        if (fill.size() != dec.fast_unbounded_dims.size()) {
            throw DimensionError("steady-state lift: fill returned the wrong dimension");
        }
        for (std::size_t k = 0; k < fill.size(); ++k) {
            full[dec.n1 + dec.fast_unbounded_dims[k]] = fill[k];
        }
    }
    return full;
}

bool SteadyStateMap::membership(const State& x1, const State& x2_bounded, double tol) const {
    return distance(h1(x1), x2_bounded) <= tol;
}

// =============================================================================
// Derived systems
// =============================================================================

HybridSystem make_boundary_layer(const HybridSystem& sys, const TimescaleDecomposition& dec,
                                 const SetDescriptor& slow_attractor, double rho, LayerVariant variant) {
    dec.validate(sys.n);
    if (!(rho > 0.0)) {
        throw ParamError("boundary layer: rho must be positive");
    }

    HybridSystem bl;
    bl.n = sys.n;
    bl.labels = sys.labels;
    bl.flow_map = [f = sys.flow_map, n1 = dec.n1, eps = dec.epsilon](const State& x) {
        State dx = f(x);
        for (std::size_t i = 0; i < dx.size(); ++i) {
            dx[i] = i < n1 ? 0.0 : dx[i] * eps;
        }
        return dx;
    };

    const auto& flow_set = sys.flow_set;
    bl.flow_set.tolerance = flow_set.tolerance;
    bl.flow_set.membership = [flow_set, slow_attractor, rho, dec](const State& x) {
        return flow_set.membership(x) && slow_attractor.distance(dec.slow(x)) <= rho + slow_attractor.tolerance;
    };
    // Lower bound on the distance to the intersection.
    bl.flow_set.distance = [flow_set, slow_attractor, rho, dec](const State& x) {
        return std::max(flow_set.distance(x), std::max(0.0, slow_attractor.distance(dec.slow(x)) - rho));
    };

    if (variant == LayerVariant::H1) {
        bl.jump_set = make_empty_set();
        bl.jump_map = [](const State& x) { return x; };
        return bl;
    }

    if (!sys.split) {
        throw DimensionError("boundary layer H2: system has no separate fast jump block");
    }
    const auto& fast = sys.split->fast;
    bl.jump_set = fast.set;
    bl.jump_map = [map = fast.map, n1 = dec.n1](const State& x) {
        State post = map(x);
        std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n1), post.begin());
        return post;
    };
    bl.guards = fast.guards;
    bl.jump_tag = sys.jump_tag;
    return bl;
}

namespace {

SetDescriptor lift_set(const SetDescriptor& set, const SteadyStateMap& h, const TimescaleDecomposition& dec) {
    SetDescriptor out;
    out.tolerance = set.tolerance;
    out.membership = [set, h, dec](const State& x1) { return set.membership(h.lift(x1, dec)); };
    out.distance = [set, h, dec](const State& x1) { return set.distance(h.lift(x1, dec)); };
    return out;
}

}  // namespace

HybridSystem make_reduced(const HybridSystem& sys, const TimescaleDecomposition& dec, const SteadyStateMap& h) {
    dec.validate(sys.n);
    if (!h.h1) {
        throw ParamError("reduced system: steady-state selection is missing");
    }

    HybridSystem red;
    red.n = dec.n1;
    red.labels.assign(sys.labels.begin(), sys.labels.begin() + static_cast<std::ptrdiff_t>(std::min(dec.n1, sys.labels.size())));

    red.flow_map = [f = sys.flow_map, h, dec](const State& x1) {
        State full = f(h.lift(x1, dec));
        full.resize(dec.n1);
        return full;
    };
    const JumpMap g = sys.split ? sys.split->slow.map : sys.jump_map;
    red.jump_map = [g, h, dec](const State& x1) {
        State full = g(h.lift(x1, dec));
        full.resize(dec.n1);
        return full;
    };

    red.flow_set = lift_set(sys.flow_set, h, dec);
    red.jump_set = lift_set(sys.split ? sys.split->slow.set : sys.jump_set, h, dec);
    for (const auto& guard : sys.split ? sys.split->slow.guards : sys.guards) {
        red.guards.push_back([guard, h, dec](const State& x1) { return guard(h.lift(x1, dec)); });
    }
    if (sys.jump_tag) {
        red.jump_tag = [tag = sys.jump_tag, h, dec](const State& x1) { return tag(h.lift(x1, dec)); };
    }
    return red;
}

// =============================================================================
// Manifolds
// =============================================================================

ManifoldSet make_m_rho(const TimescaleDecomposition& dec, const SteadyStateMap& h, const SetDescriptor& slow_attractor,
                       double rho, std::optional<SetDescriptor> slow_domain) {
    if (!(rho > 0.0)) {
        throw ParamError("M_rho: rho must be positive");
    }
    ManifoldSet m;
    m.kind = ManifoldKind::MRho;
    m.rho = rho;
    m.dec = dec;
    m.steady_state = h;
    m.slow_attractor = slow_attractor;
    m.slow_domain = slow_domain ? *slow_domain : make_universe();
    return m;
}

ManifoldSet make_m_a(const TimescaleDecomposition& dec, const SteadyStateMap& h, const SetDescriptor& slow_attractor) {
    ManifoldSet m;
    m.kind = ManifoldKind::MA;
    m.dec = dec;
    m.steady_state = h;
    m.slow_attractor = slow_attractor;
    m.slow_domain = make_universe();
    return m;
}

SetDescriptor ManifoldSet::as_set(double tolerance) const {
    SetDescriptor set;
    set.tolerance = tolerance;
    set.distance = [m = *this](const State& x) { return manifold_distance(x, m); };
    set.membership = [dist = set.distance, tolerance](const State& x) { return dist(x) <= tolerance; };
    return set;
}

namespace {

constexpr double kRefineTol = 1e-8;
constexpr std::size_t kMaxCompassEvals = 2'000'000;

}  // namespace

double manifold_distance(const State& x, const ManifoldSet& m) {
    const auto& dec = m.dec;
    if (x.size() != dec.n1 + dec.n2) {
        throw DimensionError("manifold_distance: state dimension mismatch");
    }
    const State x1 = dec.slow(x);
    const State x2 = dec.bounded_fast(x);

    auto feasible = [&](const State& y) {
        if (m.kind == ManifoldKind::MA) {
            return m.slow_attractor.membership(y);
        }
        return m.slow_attractor.distance(y) <= m.rho + m.slow_attractor.tolerance && m.slow_domain.membership(y);
    };
    auto objective = [&](const State& y) {
        const State hy = m.steady_state.h1(y);
        double acc = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double d = x1[i] - y[i];
            acc += d * d;
        }
        for (std::size_t i = 0; i < hy.size(); ++i) {
            const double d = x2[i] - hy[i];
            acc += d * d;
        }
        return acc;
    };

    std::vector<State> starts;
    if (feasible(x1)) {
        const double phi = objective(x1);
        if (phi == 0.0) {
            return 0.0;
        }
        starts.push_back(x1);
    }

    if (m.steady_state.affine) {
        const auto& aff = *m.steady_state.affine;
        const Eigen::Map<const Eigen::VectorXd> v1(x1.data(), static_cast<Eigen::Index>(x1.size()));
        const Eigen::Map<const Eigen::VectorXd> v2(x2.data(), static_cast<Eigen::Index>(x2.size()));
        const Eigen::MatrixXd lhs =
            Eigen::MatrixXd::Identity(aff.M.cols(), aff.M.cols()) + aff.M.transpose() * aff.M;
        const Eigen::VectorXd rhs = v1 + aff.M.transpose() * (v2 - aff.b);
        const Eigen::VectorXd y = lhs.ldlt().solve(rhs);
        State ys(y.data(), y.data() + y.size());
        if (feasible(ys)) {
            return std::sqrt(objective(ys));
        }
        if (m.slow_attractor.projection) {
            State p = m.slow_attractor.projection(ys);
            if (feasible(p)) starts.push_back(std::move(p));
        }
    }
    if (m.slow_attractor.projection) {
        State p = m.slow_attractor.projection(x1);
        if (feasible(p)) starts.push_back(std::move(p));
    }
    if (starts.empty()) {
        throw DomainError("manifold_distance: no feasible slow point to start the projection from");
    }

    State y = starts.front();
    double best = objective(y);
    for (std::size_t k = 1; k < starts.size(); ++k) {
        const double phi = objective(starts[k]);
        if (phi < best) {
            best = phi;
            y = starts[k];
        }
    }

    // Compass search on the feasible slow points.
    double step = std::max(1.0, std::sqrt(best));
    std::size_t evals = 0;
    while (step > kRefineTol && evals < kMaxCompassEvals) {
        bool improved = false;
        for (std::size_t k = 0; k < y.size(); ++k) {
            for (double sign : {1.0, -1.0}) {
                State trial = y;
                trial[k] += sign * step;
                ++evals;
                if (!feasible(trial)) continue;
                const double phi = objective(trial);
                if (phi < best) {
                    best = phi;
                    y = std::move(trial);
                    improved = true;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    return std::sqrt(best);
}

double default_rho(const HybridArc& arc, const TimescaleDecomposition& dec, const SetDescriptor& slow_attractor) {
    double worst = 0.0;
    arc.for_each_sample([&](HybridTime, const State& x) {
        worst = std::max(worst, slow_attractor.distance(dec.slow(x)));
    });
    return std::max(1.1 * worst, 1e-6);
}

// =============================================================================
// Jump regularity
// =============================================================================

bool is_slow_tag(const std::string& tag) {
    return tag == "slow" || tag == "controller";
}

JumpRegularityReport classify_jumps(const HybridArc& arc, double tau, RegularityVariant variant,
                                    const std::function<bool(const std::string&)>& slow_tag) {
    if (!(tau > 0.0)) {
        throw ParamError("classify_jumps: tau must be positive");
    }
    JumpRegularityReport report;
    report.tau = tau;
    report.variant = variant;
    if (arc.empty()) {
        return report;
    }
    if (variant == RegularityVariant::SlowJumpsOnly) {
        for (const auto& jr : arc.jumps) {
            if (!jr.tag) {
                throw MissingTags("classify_jumps: arc has untagged jumps");
            }
        }
    }

    double previous = arc.segments.front().samples.front().t;
    for (const auto& jr : arc.jumps) {
        if (variant == RegularityVariant::SlowJumpsOnly && !slow_tag(*jr.tag)) {
            continue;
        }
        JumpLabel label;
        label.t = jr.t;
        label.j = jr.j + 1;
        label.interval = jr.t - previous;
        label.regular = label.interval + kRegularitySlack >= tau;
        if (!label.regular) {
            ++report.n_irregular;
            report.last_irregular_t = jr.t;
        }
        report.labels.push_back(label);
        previous = jr.t;
    }
    return report;
}

nlohmann::json JumpRegularityReport::to_json() const {
    nlohmann::json labels_json = nlohmann::json::array();
    for (const auto& l : labels) {
        labels_json.push_back({{"t", l.t},
                               {"j", l.j},
                               {"interval", l.interval},
                               {"label", l.regular ? "regular" : "irregular"}});
    }
    return {{"tau", tau},
            {"variant", variant == RegularityVariant::AllJumps ? "AllJumps" : "SlowJumpsOnly"},
            {"n_jumps", labels.size()},
            {"n_irregular", n_irregular},
            {"last_irregular_t", last_irregular_t ? nlohmann::json(*last_irregular_t) : nlohmann::json(nullptr)},
            {"labels", labels_json}};
}

}  // namespace hybridsp
