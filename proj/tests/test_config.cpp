#include "hybridsp/scenario_config.hpp"
#include "hybridsp/toml_config.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace hybridsp;
using nlohmann::json;

TEST_CASE("TOML scalars, tables and arrays", "[config][toml]") {
    const auto doc = toml::parse(R"(
# comment
seed = 7
name = "a \"b\"\t\u00e9"
lit = 'C:\path'
flag = true
x = -1_000.5e-1  # trailing comment
big = +1_000

[solver]
step = 1e-3
nested = [[1, 2.5], [3,
  4,],  # inside
]
"quoted key" = 1
a.b = 2

[game.inner]
w = inf
n = -nan
)");
    CHECK(doc["seed"] == 7);
    CHECK(doc["seed"].is_number_integer());
    CHECK(doc["name"] == "a \"b\"\t\xc3\xa9");
    CHECK(doc["lit"] == "C:\\path");
    CHECK(doc["flag"] == true);
    CHECK(doc["x"].get<double>() == -100.05);
    CHECK(doc["big"] == 1000);
    CHECK(doc["solver"]["step"].get<double>() == 1e-3);
    CHECK(doc["solver"]["nested"] == json::parse("[[1, 2.5], [3, 4]]"));
    CHECK(doc["solver"]["quoted key"] == 1);
    CHECK(doc["solver"]["a"]["b"] == 2);
    CHECK(std::isinf(doc["game"]["inner"]["w"].get<double>()));
    CHECK(std::isnan(doc["game"]["inner"]["n"].get<double>()));
}

TEST_CASE("TOML errors carry a line number", "[config][toml]") {
    const char* bad[] = {
        "a = 1\na = 2",          // duplicate key
        "[t]\n[t]",              // duplicate table
        "a = {b = 1}",           // inline table
        "a = \"\"\"x\"\"\"",     // multi-line string
        "a = 01",                // leading zero
        "a = 1__0",              // double underscore
        "a = [1, 2",             // unterminated array
        "a = \"open",            // unterminated string
        "[[arr]]",               // array of tables
        "a = 1 b",               // trailing garbage
        "= 1",                   // missing key
        "a = tru",               // bad literal
    };
    for (const char* text : bad) {
        INFO(text);
        try {
            toml::parse(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("toml line") != std::string::npos);
        }
    }
    CHECK_THROWS_WITH(toml::parse("a = 1\n\nb = ?"), Catch::Matchers::ContainsSubstring("line 3"));
}

TEST_CASE("TOML emit round trip", "[config][toml]") {
    const json doc = json::parse(R"({
        "seed": 3, "name": "x\ny", "flag": false,
        "solver": {"step": 0.1, "max_t": 100.0, "grid": [[0.01, 1.0], [2.0, 3.0]], "empty": []},
        "game": {"c": 0.25, "sub": {"deep": -1.5e-300}}
    })");
    const std::string text = toml::emit(doc);
    CHECK(toml::parse(text) == doc);
    // Scalars of a table precede its sub-tables.
    CHECK(text.find("seed = 3") < text.find("[game]"));
    CHECK(text.find("[game.sub]") != std::string::npos);
    CHECK(text.find("max_t = 100.0") != std::string::npos);

    json special = {{"a", std::numeric_limits<double>::infinity()}, {"b", 1.0 / 3.0}};
    const auto back = toml::parse(toml::emit(special));
    CHECK(std::isinf(back["a"].get<double>()));
    CHECK(back["b"].get<double>() == 1.0 / 3.0);

    CHECK_THROWS_AS(toml::emit(json{{"a", nullptr}}), ConfigError);
    CHECK_THROWS_AS(toml::emit(json{{"a", json::array({json::object({{"b", 1}})})}}), ConfigError);
}

TEST_CASE("scenario names", "[config]") {
    CHECK(all_scenarios().size() == 3);
    for (const auto k : all_scenarios()) CHECK(parse_scenario(scenario_name(k)) == k);
    CHECK(std::string(scenario_name(ScenarioKind::UnicycleNes)) == "unicycle_nes");
    CHECK_THROWS_AS(parse_scenario("example3"), ConfigError);
}

TEST_CASE("defaults produce the documented parameters", "[config]") {
    const auto c1 = load_config(ScenarioKind::Example1);
    const auto p1 = example1_params(c1);
    CHECK(p1.gamma == 0.01);
    CHECK(p1.tau == 1.0);
    CHECK(p1.epsilon == 1e-3);
    CHECK(p1.R == 10.0);
    CHECK(p1.x0 == State{5.0, 0.0, 5.0});
    CHECK(c1.seed() == 0);
    CHECK(solver_config(c1).step == 1e-3);
    CHECK(solver_config(c1).max_t == 100.0);

    const auto c2 = load_config(ScenarioKind::Example2);
    CHECK(example2_params(c2).epsilon == 1e-2);
    const auto probe = sweep_probe(c2);
    REQUIRE(probe.grid.size() == 3);
    CHECK(probe.grid[2].tau == 4.0);
    CHECK(probe.grid[2].epsilon == 2.5e-3);

    const auto cn = load_config(ScenarioKind::UnicycleNes);
    const auto g = game_params(cn);
    CHECK(g.c == 0.25);
    CHECK(g.sources.size() == 4);
    const auto nes = nes_params(cn);
    CHECK(nes.frequencies == generate_frequencies(8, 0));
    CHECK(nes.alpha == 0.05);
    CHECK(nes.beta == 0.003);
    const auto uni = unicycle_params(cn);
    REQUIRE(uni.size() == 4);
    CHECK(uni[1].sigma == 3e-3);
    CHECK(uni[1].c2 == 3e-3);
    CHECK(initial_actions(cn) == State{-4.0, -8.0, -12.0, -3.0, 1.0, 7.0, 16.0, 8.0});
    CHECK(plant_timers(cn) == std::vector<double>(4, 0.0));
    CHECK(plant_epsilon(cn) > 0.0);
    CHECK_THROWS_AS(example1_params(cn), ConfigError);
    CHECK_THROWS_AS(game_params(c1), ConfigError);
}

TEST_CASE("config keys are the sorted leaves", "[config]") {
    const auto keys = config_keys(ScenarioKind::Example1);
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(std::find(keys.begin(), keys.end(), "example.gamma") != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), "solver.step") != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), "seed") != keys.end());
    const auto nk = config_keys(ScenarioKind::UnicycleNes);
    CHECK(std::find(nk.begin(), nk.end(), "unicycle.3.sigma") != nk.end());
}

TEST_CASE("load_config merges and validates", "[config]") {
    const auto cfg = load_config(ScenarioKind::Example1, "seed = 4\n[example]\ngamma = 1\nx0 = [1, 0, 2]\n");
    CHECK(cfg.seed() == 4);
    const auto p = example1_params(cfg);
    CHECK(p.gamma == 1.0);
    CHECK(cfg.doc["example"]["gamma"].is_number_float());
    CHECK(p.x0 == State{1.0, 0.0, 2.0});
    CHECK(p.tau == 1.0);

    CHECK_THROWS_WITH(load_config(ScenarioKind::Example1, "[example]\ngama = 1"),
                      Catch::Matchers::ContainsSubstring("example.gama"));
    CHECK_THROWS_AS(load_config(ScenarioKind::Example1, "[example]\ngamma = \"big\""), ConfigError);
    CHECK_THROWS_AS(load_config(ScenarioKind::Example1, "[example]\nx0 = [1, \"a\", 2]"), ConfigError);
    CHECK_THROWS_AS(load_config(ScenarioKind::Example1, "seed = -1"), ConfigError);
    CHECK_THROWS_AS(load_config(ScenarioKind::Example1, "seed = 1.5"), ConfigError);
    CHECK_THROWS_AS(load_config(ScenarioKind::Example1, "example = 3"), ConfigError);
    CHECK_THROWS_AS(solver_config(load_config(ScenarioKind::Example1, "[solver]\npriority = \"sideways\"")),
                    ConfigError);
    CHECK_THROWS_AS(solver_config(load_config(ScenarioKind::Example1, "[solver]\nstep = -1.0")), ConfigError);
    CHECK_THROWS_AS(example1_params(load_config(ScenarioKind::Example1, "[example]\ngamma = -1.0")), ConfigError);
}

TEST_CASE("extra unicycle tables extend the fleet", "[config]") {
    const char* text = R"(
[game]
sources = [[0, 0], [1, 1], [2, 2], [3, 3], [4, 4]]
[controller]
amplitudes = [0.1, 0.1, 0.1, 0.1, 0.1]
tau = [0.01, 0.015, 0.02, 0.01, 0.012]
t0 = [0.0, 0.002, 0.004, 0.006, 0.008]
[unicycle.5]
sigma = 0.005
)";
    const auto cfg = load_config(ScenarioKind::UnicycleNes, text);
    const auto uni = unicycle_params(cfg);
    REQUIRE(uni.size() == 5);
    CHECK(uni[4].sigma == 0.005);
    CHECK(uni[4].c1 == uni[0].c1);
    CHECK(nes_params(cfg).frequencies.size() == 10);
}

TEST_CASE("round trip through to_toml", "[config]") {
    for (const auto k : all_scenarios()) {
        auto cfg = load_config(k);
        cfg.doc["seed"] = 12;
        const auto again = load_config(k, cfg.to_toml());
        CHECK(again.doc == cfg.doc);
    }
}

TEST_CASE("override splitting", "[config][overrides]") {
    const auto parts = split_overrides("a=1, b=[1,2,[3,4]], c=\"x,y\",d.e=2");
    REQUIRE(parts.size() == 4);
    CHECK(parts[0] == std::pair<std::string, std::string>{"a", "1"});
    CHECK(parts[1].second == "[1,2,[3,4]]");
    CHECK(parts[2].second == "\"x,y\"");
    CHECK(parts[3].first == "d.e");
    CHECK(split_overrides("").empty());
    CHECK_THROWS_AS(split_overrides("a=[1,2"), ConfigError);
    CHECK_THROWS_AS(split_overrides("a=\"x"), ConfigError);
}

TEST_CASE("overrides address unique leaves", "[config][overrides]") {
    auto cfg = load_config(ScenarioKind::Example1);
    apply_overrides(cfg, "gamma=0.5,solver.max_t=2,x0=[1,0,1],priority=flow_first");
    CHECK(example1_params(cfg).gamma == 0.5);
    CHECK(solver_config(cfg).max_t == 2.0);
    CHECK(cfg.doc["solver"]["max_t"].is_number_float());
    CHECK(example1_params(cfg).x0 == State{1.0, 0.0, 1.0});
    CHECK(solver_config(cfg).priority == Priority::FlowFirst);

    CHECK_THROWS_WITH(apply_overrides(cfg, "nope=1"), Catch::Matchers::ContainsSubstring("unknown"));
    CHECK_THROWS_AS(apply_overrides(cfg, "solver=1"), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, "gamma"), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, "gamma=abc"), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, "seed=-3"), ConfigError);

    auto nes = load_config(ScenarioKind::UnicycleNes);
    CHECK_THROWS_WITH(apply_overrides(nes, "sigma=0.1"), Catch::Matchers::ContainsSubstring("ambiguous"));
    apply_overrides(nes, "unicycle.2.sigma=0.004,alpha=0.1");
    CHECK(unicycle_params(nes)[1].sigma == 0.004);
    CHECK(nes_params(nes).alpha == 0.1);
}

TEST_CASE("seed selects the frequencies", "[config]") {
    auto a = load_config(ScenarioKind::UnicycleNes);
    auto b = load_config(ScenarioKind::UnicycleNes, "seed = 9");
    CHECK(nes_params(a).frequencies != nes_params(b).frequencies);
    CHECK(nes_params(b).frequencies == generate_frequencies(8, 9));
    apply_overrides(a, "frequencies=[1.1,2.2,3.3,4.4,5.5,6.6,7.7,8.8]");
    CHECK(nes_params(a).frequencies[7] == 8.8);
}
