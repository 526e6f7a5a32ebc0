#include "hybridsp/runner.hpp"

#include "hybridsp/arc_io.hpp"
#include "hybridsp/svg.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace hybridsp {

using nlohmann::json;

namespace {

std::shared_ptr<const FullSystemModel> build_fleet(const ScenarioConfig& cfg, const SweepPoint* point) {
    const GameParams g = game_params(cfg);
    NESControllerParams nes = nes_params(cfg);
    double eps = plant_epsilon(cfg);
    if (point) {
        nes.alpha = point->gamma;
        nes.tau0 = point->tau;
        nes.beta = point->beta;
        eps = point->epsilon;
    }
    return std::make_shared<const FullSystemModel>(build_full_system(g, nes, unicycle_params(cfg), eps));
}

double slow_distance(const ScenarioModel& sm, const State& x) {
    return sm.model->slow_attractor.distance(sm.model->dec.slow(x));
}

/// Tau used for the regularity audit of the fleet: the shortest controller
/// period split evenly between the agents.
double fleet_audit_tau(const FullSystemModel& m) {
    double tmin = kInf;
    for (const double t : m.nes.tau) tmin = std::min(tmin, m.nes.tau0 * t);
    return tmin / static_cast<double>(m.layout.N());
}

constexpr std::size_t kMaxReportedLabels = 1000;

/// Regularity export; per-jump labels are dropped for long arcs.
json regularity_json(const JumpRegularityReport& rep) {
    json j = rep.to_json();
    if (rep.labels.size() > kMaxReportedLabels) {
        j.erase("labels");
        j["labels_omitted"] = true;
    }
    return j;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p.string());
    os << text;
}

svg::Plot phase_plot(const ScenarioModel& sm, const HybridArc& arc) {
    svg::Plot plot;
    if (sm.fleet) {
        const auto& m = *sm.fleet;
        const auto& L = m.layout;
        plot.title = "Unicycle positions";
        plot.xlabel = "x [m]";
        plot.ylabel = "y [m]";
        plot.equal_aspect = true;
        for (std::size_t i = 0; i < L.N(); ++i) {
            svg::Series s;
            s.name = "agent " + std::to_string(i + 1);
            s.color = svg::palette(i);
            arc.for_each_sample([&](HybridTime, const State& x) {
                s.x.push_back(x[L.plant(i) + uni::kX]);
                s.y.push_back(x[L.plant(i) + uni::kY]);
            });
            plot.series.push_back(std::move(s));
            plot.markers.push_back({m.game.sources[i][0], m.game.sources[i][1], svg::MarkerShape::Circle, svg::palette(i)});
            plot.markers.push_back({m.nash.u[2 * i], m.nash.u[2 * i + 1], svg::MarkerShape::Cross, svg::palette(i)});
        }
        return plot;
    }
    plot.title = "Phase portrait";
    plot.xlabel = "u";
    plot.ylabel = "x";
    svg::Series s;
    s.name = "(u, x)";
    arc.for_each_sample([&](HybridTime, const State& x) {
        s.x.push_back(x[0]);
        s.y.push_back(x[2]);
    });
    plot.series.push_back(std::move(s));
    plot.markers.push_back({arc.initial_state()[0], arc.initial_state()[2], svg::MarkerShape::Circle, "black"});
    plot.markers.push_back({0.0, 0.0, svg::MarkerShape::Cross, "black"});
    return plot;
}

svg::Plot timeseries_plot(const ScenarioModel& sm, const HybridArc& arc) {
    svg::Plot plot;
    plot.xlabel = "t [s]";
    std::vector<double> t;
    arc.for_each_sample([&](HybridTime ht, const State&) { t.push_back(ht.t); });
    auto column = [&](std::size_t idx) {
        std::vector<double> out;
        out.reserve(t.size());
        arc.for_each_sample([&](HybridTime, const State& x) { out.push_back(x[idx]); });
        return out;
    };
    if (sm.fleet) {
        const auto& m = *sm.fleet;
        const auto& L = m.layout;
        plot.title = "Unicycle position coordinates";
        plot.ylabel = "position [m]";
        for (std::size_t i = 0; i < L.N(); ++i) {
            for (std::size_t d = 0; d < 2; ++d) {
                const std::size_t c = 2 * i + d;
                plot.series.push_back({(d == 0 ? "x" : "y") + std::to_string(i + 1), t, column(L.plant(i) + d), svg::palette(c)});
                plot.ref_lines.push_back({true, m.nash.u[c], svg::palette(c)});
            }
        }
        return plot;
    }
    plot.title = "States";
    plot.ylabel = "value";
    const auto& labels = sm.system().labels;
    for (std::size_t k = 0; k < sm.system().n; ++k) {
        plot.series.push_back({labels[k], t, column(k), svg::palette(k)});
    }
    plot.ref_lines.push_back({true, 0.0, "gray"});
    return plot;
}

/// Uniform point of the ball of `radius` in dimension `dim`.
std::vector<double> ball_sample(std::mt19937_64& rng, std::size_t dim, double radius) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> v(dim);
    double n = 0.0;
    for (auto& e : v) {
        e = gauss(rng);
        n += e * e;
    }
    n = std::sqrt(n);
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
    for (auto& e : v) e *= n > 0.0 ? r / n : 0.0;
    return v;
}

}  // namespace

ScenarioModel build_scenario(const ScenarioConfig& cfg) {
    ScenarioModel sm;
    sm.kind = cfg.kind;
    switch (cfg.kind) {
        case ScenarioKind::Example1: {
            const auto p = example1_params(cfg);
            sm.model = std::make_shared<const TwoTimescaleModel>(build_example1(p));
            sm.x0 = p.x0;
            break;
        }
        case ScenarioKind::Example2: {
            const auto p = example2_params(cfg);
            sm.model = std::make_shared<const TwoTimescaleModel>(build_example2(p));
            sm.x0 = p.x0;
            break;
        }
        case ScenarioKind::UnicycleNes: {
            sm.fleet = build_fleet(cfg, nullptr);
            sm.model = sm.fleet;
            sm.x0 = full_initial_state(*sm.fleet, initial_actions(cfg), plant_timers(cfg));
            break;
        }
    }
    return sm;
}

LyapunovSpec report_lyapunov(const ScenarioModel& sm, double inner_radius) {
    LyapunovSpec spec;
    spec.attractor = sm.model->attractor;
    const auto& dec = sm.model->dec;
    if (sm.fleet) {
        const auto fleet = sm.fleet;
        auto v1 = [fleet](const State& chi) {
            double s = 0.0;
            for (std::size_t i = 0; i < 2 * fleet->layout.N(); ++i) {
                const double d = chi[fleet->layout.ctrl.u(0) + i] - fleet->nash.u[i];
                s += d * d;
            }
            return s;
        };
        auto v2 = [fleet](const State& x) {
            const auto& L = fleet->layout;
            double s = 0.0;
            for (std::size_t i = 0; i < L.N(); ++i) {
                const Point2 ref{x[L.ctrl.u(i)], x[L.ctrl.u(i) + 1]};
                s += unicycle_lyapunov(fleet->unicycles[i], ref, std::span<const double>(x.data() + L.plant(i), uni::kSize));
            }
            return s;
        };
        spec.V = composite_lyapunov(v1, v2, dec.n1, dec.epsilon);
    } else {
        spec.V = composite_lyapunov(example_v1, example_v2, dec.n1, dec.epsilon);
    }
    spec.active_region = [att = sm.model->attractor, inner_radius](const State& x) {
        return att.distance(x) >= inner_radius;
    };
    return spec;
}

json make_report(const ScenarioConfig& cfg, const ScenarioModel& sm, const HybridArc& arc) {
    json r;
    r["scenario"] = scenario_name(cfg.kind);
    r["seed"] = cfg.seed();
    r["config"] = cfg.doc;
    r["termination"] = to_string(arc.termination);
    r["final_time"] = arc.final_time();
    r["n_samples"] = arc.sample_count();
    r["n_jumps"] = arc.jumps.size();

    const auto& model = *sm.model;
    const State& xf = arc.final_state();
    const ManifoldSet ma = make_m_a(model.dec, model.steady_state, model.slow_attractor);
    r["final_distance_to_attractor"] = model.attractor.distance(xf);
    r["final_slow_distance"] = slow_distance(sm, xf);
    r["final_distance_to_manifold"] = manifold_distance(xf, ma);

    const double inner = sweep_probe(cfg).delta;
    const LyapunovSpec spec = report_lyapunov(sm, inner);
    const auto flow_v = check_flow_decrease(arc, spec, 10.0 * solver_config(cfg).step);
    const auto jump_v = check_jump_decrease(arc, spec);
    std::size_t jumps_checked = 0;
    for (const auto& jr : arc.jumps) jumps_checked += jr.pre.empty() ? 0 : 1;
    r["lyapunov"] = {
        {"function", "V1 + sqrt(epsilon) V2"},
        {"active_radius", inner},
        {"V_initial", spec.V(arc.initial_state())},
        {"V_final", spec.V(xf)},
        {"flow_violations", flow_v.size()},
        {"jump_violations", jump_v.size()},
        {"jumps_checked", jumps_checked},
    };

    if (sm.fleet) {
        const auto& m = *sm.fleet;
        const auto& L = m.layout;
        const State& x0 = arc.initial_state();
        json init = json::array();
        json fin = json::array();
        double worst = 0.0;
        for (std::size_t i = 0; i < L.N(); ++i) {
            auto dist = [&](const State& x) {
                return std::hypot(x[L.plant(i) + uni::kX] - m.nash.u[2 * i], x[L.plant(i) + uni::kY] - m.nash.u[2 * i + 1]);
            };
            init.push_back(dist(x0));
            fin.push_back(dist(xf));
            worst = std::max(worst, dist(xf));
        }
        r["nash"] = m.nash.u;
        r["nash_residual"] = m.nash.residual;
        r["frequencies"] = m.nes.frequencies;
        r["initial_agent_distance_to_nash"] = init;
        r["final_agent_distance_to_nash"] = fin;
        r["final_distance_to_nash"] = worst;
        r["regularity"] = regularity_json(classify_jumps(arc, fleet_audit_tau(m), RegularityVariant::SlowJumpsOnly));
    } else {
        const double tau = cfg.doc.at("example").at("tau").get<double>();
        r["regularity"] = regularity_json(classify_jumps(arc, tau, RegularityVariant::AllJumps));
    }
    return r;
}

json run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    const SolverConfig scfg = solver_config(cfg);
    const ScenarioModel sm = build_scenario(cfg);
    const HybridArc arc = solve(sm.system(), sm.x0, scfg);
    const json report = make_report(cfg, sm, arc);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream os(out_dir / "trajectory.csv", std::ios::binary);
        write_trajectory_csv(os, arc, sm.system().labels);
    }
    {
        std::ofstream os(out_dir / "jumps.csv", std::ios::binary);
        write_jumps_csv(os, arc, sm.system().labels);
    }
    write_text(out_dir / "report.json", report.dump(2) + "\n");
    write_text(out_dir / "phase.svg", svg::render(phase_plot(sm, arc)));
    write_text(out_dir / "timeseries.svg", svg::render(timeseries_plot(sm, arc)));
    return report;
}

SweepFactory sweep_factory(const ScenarioConfig& cfg) {
    switch (cfg.kind) {
        case ScenarioKind::Example1: {
            const Example1Params base = example1_params(cfg);
            return [base](const SweepPoint& pt) {
                Example1Params p = base;
                p.gamma = pt.gamma;
                p.tau = pt.tau;
                p.epsilon = pt.epsilon;
                const auto m = build_example1(p);
                const double R = p.R;
                auto sampler = [R](std::mt19937_64& rng, double Delta) {
                    std::uniform_real_distribution<double> unit(0.0, 1.0);
                    const double u = std::min(Delta, R) * unit(rng);
                    const double v = unit(rng);
                    const double x = R * unit(rng);
                    return State{u, v, x};
                };
                return SweepInstance{m.system, sampler, m.attractor};
            };
        }
        case ScenarioKind::Example2: {
            const Example2Params base = example2_params(cfg);
            return [base](const SweepPoint& pt) {
                Example2Params p = base;
                p.gamma = pt.gamma;
                p.tau = pt.tau;
                p.epsilon = pt.epsilon;
                const auto m = build_example2(p);
                auto sampler = [](std::mt19937_64& rng, double Delta) {
                    const auto ux = ball_sample(rng, 2, Delta);
                    std::uniform_real_distribution<double> unit(0.0, 1.0);
                    return State{ux[0], unit(rng), ux[1]};
                };
                return SweepInstance{m.system, sampler, m.attractor};
            };
        }
        case ScenarioKind::UnicycleNes: {
            const ScenarioConfig copy = cfg;
            const std::vector<double> timers = plant_timers(cfg);
            return [copy, timers](const SweepPoint& pt) {
                const auto m = build_fleet(copy, &pt);
                auto sampler = [m, timers](std::mt19937_64& rng, double Delta) {
                    const auto offset = ball_sample(rng, m->nash.u.size(), Delta);
                    State u0 = m->nash.u;
                    for (std::size_t k = 0; k < u0.size(); ++k) u0[k] += offset[k];
                    return full_initial_state(*m, u0, timers);
                };
                return SweepInstance{m->system, sampler, m->attractor};
            };
        }
    }
    throw ConfigError("unknown scenario");
}

AttractivityReport run_sweep(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    const SolverConfig scfg = solver_config(cfg);
    const SGPASProbe probe = sweep_probe(cfg);
    const AttractivityReport report = estimate_attractivity(sweep_factory(cfg), probe, scfg, sweep_threads(cfg));

    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "attractivity.json", report.to_json().dump(2) + "\n");
    std::ofstream os(out_dir / "attractivity.csv", std::ios::binary);
    report.write_csv(os);
    return report;
}

}  // namespace hybridsp
