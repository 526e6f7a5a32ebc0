#include "hybridsp/analysis.hpp"

#include "hybridsp/arc_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace hybridsp {

// =============================================================================
// Lyapunov monitors
// =============================================================================

std::vector<LyapunovSample> lyapunov_along_arc(const HybridArc& arc, const LyapunovSpec& spec) {
    std::vector<LyapunovSample> out;
    out.reserve(arc.sample_count());
    for (const auto& seg : arc.segments) {
        const std::size_t first = out.size();
        for (const auto& sample : seg.samples) {
            out.push_back({HybridTime{sample.t, seg.j}, spec.V(sample.x), std::nullopt, std::nullopt});
        }
        for (std::size_t k = first; k + 1 < out.size(); ++k) {
            const double dt = out[k + 1].time.t - out[k].time.t;
            if (dt > 0.0) {
                out[k].dV_flow = (out[k + 1].V - out[k].V) / dt;
            }
        }
        if (seg.j < arc.jumps.size() && !seg.samples.empty() && !arc.jumps[seg.j].pre.empty()) {
            const auto& jr = arc.jumps[seg.j];
            out.back().dV_jump = spec.V(jr.post) - spec.V(jr.pre);
        }
    }
    return out;
}

std::vector<LyapunovViolation> check_jump_decrease(const HybridArc& arc, const LyapunovSpec& spec) {
    std::vector<LyapunovViolation> out;
    for (const auto& jr : arc.jumps) {
        if (jr.pre.empty() || !spec.active_region(jr.pre)) continue;
        const double d = spec.attractor.distance(jr.pre);
        const double change = spec.V(jr.post) - spec.V(jr.pre);
        const double bound = -spec.jump_threshold(d) + 1e-9;
        if (change > bound) {
            out.push_back({HybridTime{jr.t, jr.j}, d, change, bound});
        }
    }
    return out;
}

std::vector<LyapunovViolation> check_flow_decrease(const HybridArc& arc, const LyapunovSpec& spec, double slack) {
    std::vector<LyapunovViolation> out;
    for (const auto& seg : arc.segments) {
        for (std::size_t k = 0; k + 1 < seg.samples.size(); ++k) {
            const auto& a = seg.samples[k];
            const auto& b = seg.samples[k + 1];
            const double dt = b.t - a.t;
            if (!(dt > 0.0) || !spec.active_region(a.x)) continue;
            const double rate = (spec.V(b.x) - spec.V(a.x)) / dt;
            const double d = spec.attractor.distance(a.x);
            const double bound = -spec.flow_threshold(d) + slack;
            if (rate > bound) {
                out.push_back({HybridTime{a.t, seg.j}, d, rate, bound});
            }
        }
    }
    return out;
}

std::size_t count_bound_violations(const LyapunovSpec& spec, const std::function<State(std::mt19937_64&)>& sampler,
                                   std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const State x = sampler(rng);
        const double v = spec.V(x);
        const double d = spec.attractor.distance(x);
        const bool low_ok = !spec.lower_bound || (*spec.lower_bound)(d) <= v;
        const bool high_ok = !spec.upper_bound || v <= (*spec.upper_bound)(d);
        if (v < 0.0 || !low_ok || !high_ok) {
            ++violations;
        }
    }
    return violations;
}

std::function<double(const State&)> composite_lyapunov(std::function<double(const State&)> v1,
                                                       std::function<double(const State&)> v2, std::size_t n1,
                                                       double epsilon) {
    const double w = std::sqrt(epsilon);
    return [v1 = std::move(v1), v2 = std::move(v2), n1, w](const State& x) {
        const State x1(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n1));
        return v1(x1) + w * v2(x);
    };
}

// =============================================================================
// Sweeps
// =============================================================================

void SGPASProbe::validate() const {
    if (!(Delta > delta && delta > 0.0)) {
        throw ParamError("SGPAS probe: need Delta > delta > 0");
    }
    if (grid.empty()) {
        throw ParamError("SGPAS probe: parameter grid is empty");
    }
    if (n_initial == 0) {
        throw ParamError("SGPAS probe: n_initial must be positive");
    }
    if (!(horizon_t > 0.0)) {
        throw ParamError("SGPAS probe: horizon must be positive");
    }
    if (!(tail_fraction >= 0.01 && tail_fraction <= 0.99)) {
        throw ParamError("SGPAS probe: tail_fraction must lie in [0.01, 0.99]");
    }
}

std::optional<double> entry_time(const std::vector<std::pair<HybridTime, double>>& series, double r) {
    if (series.empty()) return std::nullopt;
    std::optional<double> t_entry;
    for (auto it = series.rbegin(); it != series.rend(); ++it) {
        if (it->second > r) break;
        t_entry = it->first.t;
    }
    return t_entry;
}

DistanceSummary summarize_distances(const std::vector<std::pair<HybridTime, double>>& series, double horizon_t,
                                    double tail_fraction, double r) {
    DistanceSummary s;
    if (series.empty()) return s;
    const double tail_start = (1.0 - tail_fraction) * horizon_t;
    bool any_tail = false;
    for (const auto& [ht, d] : series) {
        s.sup_distance = std::max(s.sup_distance, d);
        if (ht.t >= tail_start) {
            s.tail_radius = std::max(s.tail_radius, d);
            any_tail = true;
        }
    }
    if (!any_tail) {
        s.tail_radius = series.back().second;
    }
    s.entry_time = entry_time(series, r);
    return s;
}

bool refines(const SweepPoint& a, const SweepPoint& b) {
    const bool no_coarser = b.gamma <= a.gamma && b.tau >= a.tau && b.epsilon <= a.epsilon && b.beta <= a.beta;
    const bool differs = b.gamma != a.gamma || b.tau != a.tau || b.epsilon != a.epsilon || b.beta != a.beta;
    return no_coarser && differs;
}

namespace {

struct TrajectoryOutcome {
    bool failed = false;
    DistanceSummary summary;
};

}  // namespace

AttractivityReport estimate_attractivity(const SweepFactory& factory, const SGPASProbe& probe,
                                         const SolverConfig& cfg, unsigned threads, const ArcVisitor& visit) {
    probe.validate();
    SolverConfig run_cfg = cfg;
    run_cfg.max_t = probe.horizon_t;
    run_cfg.validate();

    std::vector<SweepInstance> instances;
    instances.reserve(probe.grid.size());
    for (const auto& point : probe.grid) {
        instances.push_back(factory(point));
    }

    const std::size_t per_point = probe.n_initial;
    const std::size_t total = probe.grid.size() * per_point;
    std::vector<TrajectoryOutcome> outcomes(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (std::size_t task = next++; task < total; task = next++) {
            const std::size_t g = task / per_point;
            const std::size_t k = task % per_point;
            const auto& inst = instances[g];
            std::seed_seq seq{static_cast<std::uint64_t>(probe.seed), static_cast<std::uint64_t>(g),
                              static_cast<std::uint64_t>(k)};
            std::mt19937_64 rng(seq);
            const State x0 = inst.sample_initial(rng, probe.Delta);
            try {
                const HybridArc arc = solve(inst.system, x0, run_cfg);
                const auto series = distance_series(arc, inst.attractor);
                outcomes[task].summary = summarize_distances(series, probe.horizon_t, probe.tail_fraction, probe.delta);
                if (visit) visit(g, k, arc);
            } catch (const NumericFailure&) {
                outcomes[task].failed = true;
            }
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }

    AttractivityReport report;
    for (std::size_t g = 0; g < probe.grid.size(); ++g) {
        AttractivityEntry e;
        e.point = probe.grid[g];
        e.n_trajectories = per_point;
        bool any_ok = false;
        bool all_entered = true;
        double t_hat = 0.0;
        for (std::size_t k = 0; k < per_point; ++k) {
            const auto& o = outcomes[g * per_point + k];
            if (o.failed) {
                ++e.numeric_failures;
                continue;
            }
            any_ok = true;
            e.sup_distance = std::max(e.sup_distance, o.summary.sup_distance);
            e.tail_radius = std::max(e.tail_radius, o.summary.tail_radius);
            if (o.summary.entry_time) {
                t_hat = std::max(t_hat, *o.summary.entry_time);
            } else {
                all_entered = false;
            }
        }
        if (!any_ok) {
            e.sup_distance = std::numeric_limits<double>::quiet_NaN();
            e.tail_radius = std::numeric_limits<double>::quiet_NaN();
            all_entered = false;
        }
        if (all_entered) {
            e.T_hat = t_hat;
        }
        report.entries.push_back(e);
    }

    for (std::size_t a = 0; a < report.entries.size(); ++a) {
        for (std::size_t b = 0; b < report.entries.size(); ++b) {
            const auto& ea = report.entries[a];
            const auto& eb = report.entries[b];
            if (!refines(ea.point, eb.point)) continue;
            if (std::isnan(ea.tail_radius) || std::isnan(eb.tail_radius)) continue;
            if (eb.tail_radius > (1.0 + kMonotonicitySlack) * ea.tail_radius + 1e-12) {
                report.flags.push_back({a, b, ea.tail_radius, eb.tail_radius});
            }
        }
    }
    return report;
}

namespace {

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json AttractivityReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const bool flagged = std::any_of(flags.begin(), flags.end(), [i](const auto& f) { return f.refined == i; });
        arr.push_back({{"gamma", e.point.gamma},
                       {"tau", e.point.tau},
                       {"epsilon", e.point.epsilon},
                       {"beta", e.point.beta},
                       {"sup_distance", number_or_null(e.sup_distance)},
                       {"T_hat", e.T_hat ? nlohmann::json(*e.T_hat) : nlohmann::json(nullptr)},
                       {"tail_radius", number_or_null(e.tail_radius)},
                       {"n_trajectories", e.n_trajectories},
                       {"numeric_failures", e.numeric_failures},
                       {"monotonicity_flag", flagged}});
    }
    return arr;
}

void AttractivityReport::write_csv(std::ostream& os) const {
    os << "gamma,tau,epsilon,beta,sup_distance,T_hat,tail_radius,n_trajectories,numeric_failures\n";
    for (const auto& e : entries) {
        os << format_double(e.point.gamma) << ',' << format_double(e.point.tau) << ','
           << format_double(e.point.epsilon) << ',' << format_double(e.point.beta) << ','
           << format_double(e.sup_distance) << ',' << (e.T_hat ? format_double(*e.T_hat) : std::string("nan")) << ','
           << format_double(e.tail_radius) << ',' << e.n_trajectories << ',' << e.numeric_failures << '\n';
    }
}

}  // namespace hybridsp
