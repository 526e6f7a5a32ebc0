#include "hybridsp/analysis.hpp"
#include "hybridsp/examples.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace hybridsp;
using Catch::Approx;

namespace {

HybridArc constant_arc(const State& x, int n) {
    HybridArc arc;
    Segment seg;
    for (int k = 0; k < n; ++k) seg.samples.push_back({0.1 * k, x});
    arc.segments.push_back(seg);
    return arc;
}

/// Scalar x' = x on the real line, no jumps.
HybridSystem growth_system() {
    HybridSystem sys;
    sys.n = 1;
    sys.labels = default_labels(1);
    sys.flow_map = [](const State& x) { return State{x[0]}; };
    sys.jump_map = [](const State& x) { return x; };
    sys.flow_set = make_universe();
    sys.jump_set = make_empty_set();
    return sys;
}

LyapunovSpec reduced_example1_spec(const Example1Params& p, const SetDescriptor& slow_attractor) {
    LyapunovSpec s;
    s.V = example_v1;
    s.attractor = slow_attractor;
    s.jump_threshold = [](double d) { return d * d / 2.0; };
    s.flow_threshold = [p](double d) { return d * d / p.tau - 4.0 * p.gamma * p.R; };
    return s;
}

std::vector<std::pair<HybridTime, double>> series_of(std::vector<double> d) {
    std::vector<std::pair<HybridTime, double>> s;
    for (std::size_t k = 0; k < d.size(); ++k) s.push_back({HybridTime{static_cast<double>(k), 0}, d[k]});
    return s;
}

}  // namespace

TEST_CASE("lyapunov_along_arc on a constant arc", "[analysis]") {
    LyapunovSpec spec;
    spec.V = [](const State& x) { return x[0] * x[0]; };
    spec.attractor = make_box({0.0}, {0.0});
    const auto samples = lyapunov_along_arc(constant_arc({3.0}, 5), spec);
    REQUIRE(samples.size() == 5);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(samples[k].V == 9.0);
        REQUIRE(samples[k].dV_flow);
        CHECK(*samples[k].dV_flow == 0.0);
        CHECK_FALSE(samples[k].dV_jump);
    }
    CHECK_FALSE(samples.back().dV_flow);
}

TEST_CASE("Example 1 jump identity for V1", "[analysis]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng);
        CHECK(std::abs(example_v1({x / 2.0, 0.0}) - example_v1({x, 1.0}) + x * x / 2.0) <= 1e-12);
    }
    CHECK(example_v2({1.0, 0.3, 4.0}) == 4.5);
}

TEST_CASE("jump change on the reduced Example 1", "[analysis]") {
    Example1Params p;
    p.gamma = 0.0;
    const auto m = build_example1(p);
    const auto red = make_reduced(m.system, m.dec, m.steady_state);
    SolverConfig cfg;
    cfg.max_t = 1.5;
    const auto arc = solve(red, {2.0, 0.0}, cfg);
    REQUIRE(arc.jumps.size() == 1);

    const auto spec = reduced_example1_spec(p, m.slow_attractor);
    const auto samples = lyapunov_along_arc(arc, spec);
    std::vector<double> jumps;
    for (const auto& s : samples) {
        if (s.dV_jump) jumps.push_back(*s.dV_jump);
    }
    REQUIRE(jumps.size() == 1);
    CHECK(jumps[0] == Approx(-2.0).epsilon(1e-9));

    CHECK(check_jump_decrease(arc, spec).empty());
    CHECK(check_flow_decrease(arc, spec).empty());
    LyapunovSpec zero = spec;
    zero.jump_threshold = [](double) { return 0.0; };
    CHECK(check_jump_decrease(arc, zero).empty());
}

TEST_CASE("reduced Example 1 satisfies the flow bound with gamma > 0", "[analysis]") {
    Example1Params p;
    p.gamma = 0.5;
    const auto m = build_example1(p);
    const auto red = make_reduced(m.system, m.dec, m.steady_state);
    SolverConfig cfg;
    cfg.max_t = 20.0;
    const auto arc = solve(red, {8.0, 0.0}, cfg);
    const auto spec = reduced_example1_spec(p, m.slow_attractor);
    CHECK(check_flow_decrease(arc, spec).empty());
    CHECK(check_jump_decrease(arc, spec).empty());
}

TEST_CASE("boundary layer derivative of V2", "[analysis]") {
    const auto m = build_example1({});
    const auto bl = make_boundary_layer(m.system, m.dec, m.slow_attractor, 5.0, LayerVariant::H1);
    SolverConfig cfg;
    cfg.step = 1e-5;
    cfg.max_t = 1e-3;
    const auto arc = solve(bl, {0.0, 0.5, 1.0}, cfg);
    LyapunovSpec spec;
    spec.V = example_v2;
    spec.attractor = m.attractor;
    const auto samples = lyapunov_along_arc(arc, spec);
    REQUIRE(samples.front().dV_flow);
    // d/dt (x - u)^2 / 2 = -(x - u)^2 = -1 at x - u = 1.
    CHECK(*samples.front().dV_flow == Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("expanding jumps and diverging flows are flagged", "[analysis]") {
    HybridArc arc;
    arc.segments.push_back({0, {{0.0, {1.0, 0.0}}, {1.0, {1.0, 1.0}}}});
    arc.segments.push_back({1, {{1.0, {2.0, 0.0}}}});
    JumpRecord jr;
    jr.t = 1.0;
    jr.j = 0;
    jr.pre = {1.0, 1.0};
    jr.post = {2.0, 0.0};
    arc.jumps.push_back(jr);

    LyapunovSpec spec;
    spec.V = example_v1;
    spec.attractor = make_box({0.0, 0.0}, {0.0, 1.0});
    const auto v = check_jump_decrease(arc, spec);
    REQUIRE(v.size() == 1);
    CHECK(v[0].change == Approx(7.0));
    CHECK(v[0].distance == 1.0);
    CHECK(v[0].time.j == 0);

    spec.active_region = [](const State& x) { return std::abs(x[0]) > 5.0; };
    CHECK(check_jump_decrease(arc, spec).empty());

    SolverConfig cfg;
    cfg.max_t = 1.0;
    const auto grow = solve(growth_system(), {1.0}, cfg);
    LyapunovSpec quad;
    quad.V = [](const State& x) { return x[0] * x[0]; };
    quad.attractor = make_box({0.0}, {0.0});
    CHECK(check_flow_decrease(grow, quad).size() == grow.sample_count() - 1);
    CHECK(check_flow_decrease(constant_arc({0.0}, 10), quad).empty());
}

TEST_CASE("bound violations are counted on sampled states", "[analysis]") {
    LyapunovSpec spec;
    spec.V = [](const State& x) { return 0.5 * x[0] * x[0]; };
    spec.attractor = make_box({0.0}, {0.0});
    spec.lower_bound = [](double d) { return 0.25 * d * d; };
    spec.upper_bound = [](double d) { return d * d; };
    const auto sampler = [](std::mt19937_64& rng) { return State{std::uniform_real_distribution<double>(-2.0, 2.0)(rng)}; };
    CHECK(count_bound_violations(spec, sampler, 1000, 1) == 0);
    spec.upper_bound = [](double d) { return 0.4 * d * d; };
    CHECK(count_bound_violations(spec, sampler, 1000, 1) == 1000);
}

TEST_CASE("composite Lyapunov function", "[analysis]") {
    const auto V = composite_lyapunov(example_v1, example_v2, 2, 0.04);
    // V1(1, 0.5) = 1.5, V2 = (3 - 1)^2 / 2 = 2, sqrt(0.04) = 0.2.
    CHECK(V({1.0, 0.5, 3.0}) == Approx(1.5 + 0.2 * 2.0).epsilon(1e-15));
}

TEST_CASE("entry time and distance summaries", "[analysis]") {
    const auto s = series_of({3.0, 2.0, 0.5, 1.5, 0.4, 0.2, 0.1});
    CHECK(entry_time(s, 1.0) == 4.0);
    CHECK(entry_time(s, 2.0) == 1.0);
    CHECK(entry_time(s, 0.05) == std::nullopt);
    CHECK(entry_time({}, 1.0) == std::nullopt);
    double prev = kInf;
    for (const double r : {0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const double t = *entry_time(s, r);
        CHECK(t <= prev);
        prev = t;
    }
    const auto sum = summarize_distances(s, 6.0, 0.5, 1.0);
    CHECK(sum.sup_distance == 3.0);
    CHECK(sum.tail_radius == 1.5);
    CHECK(sum.entry_time == 4.0);
    CHECK(summarize_distances(series_of({4.0, 2.0}), 100.0, 0.2, 1.0).tail_radius == 2.0);
}

TEST_CASE("refinement order on sweep points", "[analysis]") {
    const SweepPoint a{0.1, 1.0, 1e-2, 0.0};
    const SweepPoint b{0.05, 2.0, 5e-3, 0.0};
    CHECK(refines(a, b));
    CHECK_FALSE(refines(b, a));
    CHECK_FALSE(refines(a, a));
    CHECK_FALSE(refines(a, SweepPoint{0.05, 0.5, 5e-3, 0.0}));
}

TEST_CASE("probe validation", "[analysis]") {
    SGPASProbe p;
    p.grid = {SweepPoint{}};
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.delta = 2.0;
    CHECK_THROWS_AS(bad.validate(), ParamError);
    bad = p;
    bad.grid.clear();
    CHECK_THROWS_AS(bad.validate(), ParamError);
    bad = p;
    bad.n_initial = 0;
    CHECK_THROWS_AS(bad.validate(), ParamError);
    bad = p;
    bad.tail_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), ParamError);
}

namespace {

SweepFactory example2_factory(double scale_x0) {
    return [scale_x0](const SweepPoint& pt) {
        Example2Params p;
        p.gamma = pt.gamma;
        p.tau = pt.tau;
        p.epsilon = pt.epsilon;
        const auto m = build_example2(p);
        SweepInstance inst;
        inst.system = m.system;
        inst.attractor = m.attractor;
        inst.sample_initial = [scale_x0](std::mt19937_64& rng, double Delta) {
            std::uniform_real_distribution<double> c(-Delta, Delta);
            std::uniform_real_distribution<double> v(0.0, 1.0);
            return State{c(rng) / 2.0, v(rng), scale_x0 * c(rng) / 2.0};
        };
        return inst;
    };
}

}  // namespace

TEST_CASE("Example 2 sweep tightens under refinement", "[analysis][sweep]") {
    SGPASProbe probe;
    probe.Delta = 2.0;
    probe.delta = 0.5;
    probe.n_initial = 4;
    probe.horizon_t = 40.0;
    probe.grid = {{0.1, 1.0, 1e-2, 0.0}, {0.05, 2.0, 5e-3, 0.0}, {0.025, 4.0, 2.5e-3, 0.0}};
    SolverConfig cfg;
    const auto rep = estimate_attractivity(example2_factory(1.0), probe, cfg, 2);
    REQUIRE(rep.entries.size() == 3);
    CHECK(rep.flags.empty());
    for (const auto& e : rep.entries) {
        CHECK(e.numeric_failures == 0);
        CHECK(e.n_trajectories == 4);
        CHECK(e.T_hat);
        CHECK(e.sup_distance >= e.tail_radius);
    }
    // gamma * tau is 0.1 at every point, so the jump cycle keeps x near 4 gamma tau.
    CHECK(rep.entries[2].tail_radius <= 1.1 * rep.entries[0].tail_radius);
    CHECK(rep.entries[0].tail_radius == Approx(0.4).margin(0.05));

    const auto again = estimate_attractivity(example2_factory(1.0), probe, cfg, 1);
    CHECK(again.to_json() == rep.to_json());

    std::ostringstream csv;
    rep.write_csv(csv);
    const std::string text = csv.str();
    CHECK(text.rfind("gamma,tau,epsilon,beta,sup_distance,T_hat,tail_radius,n_trajectories,numeric_failures\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("Example 2 with gamma = 0 converges to the attractor", "[analysis][sweep]") {
    SGPASProbe probe;
    probe.Delta = 2.0;
    probe.delta = 0.1;
    probe.n_initial = 3;
    probe.horizon_t = 60.0;
    probe.grid = {{0.0, 1.0, 1e-2, 0.0}};
    const auto rep = estimate_attractivity(example2_factory(1.0), probe, SolverConfig{}, 1);
    CHECK(rep.entries[0].tail_radius < 1e-6);
}

TEST_CASE("failing trajectories are counted, not thrown", "[analysis][sweep]") {
    SGPASProbe probe;
    probe.Delta = 2.0;
    probe.delta = 0.5;
    probe.n_initial = 2;
    probe.horizon_t = 5.0;
    probe.grid = {{0.0, 1.0, 1e-2, 0.0}};
    const SweepFactory factory = [](const SweepPoint&) {
        SweepInstance inst;
        inst.system = growth_system();
        inst.system.flow_map = [](const State& x) { return State{x[0] * x[0] * 100.0}; };
        inst.attractor = make_box({0.0}, {0.0});
        inst.sample_initial = [](std::mt19937_64&, double) { return State{1.0}; };
        return inst;
    };
    const auto rep = estimate_attractivity(factory, probe, SolverConfig{}, 1);
    CHECK(rep.entries[0].numeric_failures == 2);
    CHECK(std::isnan(rep.entries[0].tail_radius));
    CHECK_FALSE(rep.entries[0].T_hat);
    CHECK(rep.to_json()[0]["tail_radius"].is_null());
}

TEST_CASE("Example 1 leaves a neighbourhood of the attractor", "[analysis]") {
    const auto m = build_example1({});
    SolverConfig cfg;
    cfg.max_t = 3.0;
    const State x0{0.0, 1.0, 10.0};
    CHECK(m.attractor.distance(x0) == 0.0);
    const auto arc = solve(m.system, x0, cfg);
    double sup = 0.0;
    for (const auto& [t, d] : distance_series(arc, m.attractor)) sup = std::max(sup, d);
    // The first jump sends u to R/2; afterwards u grows by at most gamma t.
    CHECK(sup >= 5.0);
    CHECK(sup <= 5.0 + 0.01 * 3.0);
}

TEST_CASE("checks leave the arc untouched", "[analysis]") {
    const auto m = build_example2({});
    SolverConfig cfg;
    cfg.max_t = 3.0;
    const auto arc = solve(m.system, {1.0, 0.0, 1.0}, cfg);
    const HybridArc copy = arc;
    LyapunovSpec spec;
    spec.V = composite_lyapunov(example_v1, example_v2, 2, 1e-2);
    spec.attractor = m.attractor;
    const auto a = check_flow_decrease(arc, spec);
    const auto b = check_flow_decrease(arc, spec);
    CHECK(a.size() == b.size());
    CHECK(check_jump_decrease(arc, spec).size() == check_jump_decrease(arc, spec).size());
    CHECK(arc.sample_count() == copy.sample_count());
    CHECK(arc.jumps.size() == copy.jumps.size());
    CHECK(arc.segments.back().samples.back().x == copy.segments.back().samples.back().x);
}
