#include "hybridsp/scenario_config.hpp"

#include "hybridsp/toml_config.hpp"

#include <algorithm>
#include <cctype>
#include <initializer_list>

namespace hybridsp {

using nlohmann::json;

namespace {

json floats(std::initializer_list<double> xs) {
    json a = json::array();
    for (const double x : xs) a.push_back(x);
    return a;
}

json solver_defaults(ScenarioKind kind) {
    const bool fleet = kind == ScenarioKind::UnicycleNes;
    return {
        {"step", fleet ? 1e-5 : 1e-3},
        {"max_t", fleet ? 10.0 : 100.0},
        {"max_j", fleet ? std::int64_t{100'000'000} : std::int64_t{1'000'000}},
        {"priority", "jump_first"},
        {"guard_tol", 1e-9},
        {"bisection_iters", std::int64_t{60}},
        {"record_stride", std::int64_t{1}},
        {"sample_interval", fleet ? 1e-3 : 0.0},
    };
}

json sweep_table(double Delta, double delta, std::int64_t n_initial, double horizon, json grid) {
    return {
        {"Delta", Delta},
        {"delta", delta},
        {"n_initial", n_initial},
        {"horizon", horizon},
        {"tail_fraction", 0.2},
        {"grid", std::move(grid)},
        {"threads", std::int64_t{0}},
    };
}

json agent_table(double sigma) {
    return {{"sigma", sigma}, {"c1", 1.0 / 3.0}, {"c2", sigma}, {"c3", 1.5}, {"timer0", 0.0}};
}

bool is_agent_index(const std::string& k) {
    return !k.empty() && k[0] != '0' && std::all_of(k.begin(), k.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

json to_float_array(const json& v, const std::string& path) {
    json out = json::array();
    for (const auto& e : v) {
        if (e.is_number()) {
            out.push_back(e.get<double>());
        } else if (e.is_array()) {
            out.push_back(to_float_array(e, path));
        } else {
            throw ConfigError("config: '" + path + "' must contain only numbers");
        }
    }
    return out;
}

/// Converts `v` to the type of the default `def`.
json coerce(const json& def, const json& v, const std::string& path) {
    switch (def.type()) {
        case json::value_t::number_float:
            if (v.is_number()) return v.get<double>();
            throw ConfigError("config: '" + path + "' must be a number");
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
            if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::int64_t>();
            throw ConfigError("config: '" + path + "' must be a nonnegative integer");
        case json::value_t::boolean:
            if (v.is_boolean()) return v;
            throw ConfigError("config: '" + path + "' must be a boolean");
        case json::value_t::string:
            if (v.is_string()) return v;
            throw ConfigError("config: '" + path + "' must be a string");
        case json::value_t::array:
            if (v.is_array()) return to_float_array(v, path);
            throw ConfigError("config: '" + path + "' must be an array");
        default:
            throw ConfigError("config: '" + path + "' has no value type");
    }
}

void merge_into(json& target, const json& user, const std::string& path) {
    for (const auto& [k, v] : user.items()) {
        const std::string full = path.empty() ? k : path + "." + k;
        if (!target.contains(k)) {
            if (path == "unicycle" && is_agent_index(k) && target.contains("1")) {
                target[k] = target["1"];
            } else {
                throw ConfigError("config: unknown key '" + full + "'");
            }
        }
        json& d = target[k];
        if (d.is_object()) {
            if (!v.is_object()) throw ConfigError("config: '" + full + "' must be a table");
            merge_into(d, v, full);
        } else {
            if (v.is_object()) throw ConfigError("config: '" + full + "' is not a table");
            d = coerce(d, v, full);
        }
    }
}

void collect_leaves(const json& t, const std::string& path, std::vector<std::string>& out) {
    for (const auto& [k, v] : t.items()) {
        const std::string full = path.empty() ? k : path + "." + k;
        if (v.is_object()) {
            collect_leaves(v, full, out);
        } else {
            out.push_back(full);
        }
    }
}

std::vector<std::string> split_dotted(const std::string& key) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        parts.push_back(key.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return parts;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

const json& at(const ScenarioConfig& cfg, std::initializer_list<const char*> path) {
    const json* node = &cfg.doc;
    for (const char* k : path) {
        if (!node->is_object() || !node->contains(k)) {
            throw ConfigError(std::string("config: missing key '") + k + "'");
        }
        node = &(*node)[k];
    }
    return *node;
}

double num(const ScenarioConfig& cfg, std::initializer_list<const char*> path) { return at(cfg, path).get<double>(); }

std::vector<double> vec(const ScenarioConfig& cfg, std::initializer_list<const char*> path) {
    const json& a = at(cfg, path);
    std::vector<double> out;
    for (const auto& e : a) {
        if (!e.is_number()) throw ConfigError("config: expected a flat list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void require_kind(const ScenarioConfig& cfg, ScenarioKind kind) {
    if (cfg.kind != kind) {
        throw ConfigError(std::string("config: scenario ") + scenario_name(cfg.kind) + " has no " +
                          scenario_name(kind) + " parameters");
    }
}

}  // namespace

const char* scenario_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Example1: return "example1";
        case ScenarioKind::Example2: return "example2";
        case ScenarioKind::UnicycleNes: return "unicycle_nes";
    }
    return "unknown";
}

const char* scenario_description(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Example1: return "timer-driven slow state with a fast filter; attractive, not stable";
        case ScenarioKind::Example2: return "timer-driven slow state whose jumps keep M_A invariant";
        case ScenarioKind::UnicycleNes: return "four unicycles seeking the Nash equilibrium of a quadratic game";
    }
    return "";
}

ScenarioKind parse_scenario(std::string_view name) {
    for (const auto k : all_scenarios()) {
        if (name == scenario_name(k)) return k;
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "' (expected example1, example2 or unicycle_nes)");
}

std::vector<ScenarioKind> all_scenarios() {
    return {ScenarioKind::Example1, ScenarioKind::Example2, ScenarioKind::UnicycleNes};
}

json default_document(ScenarioKind kind) {
    json doc = json::object();
    doc["seed"] = std::int64_t{0};
    doc["solver"] = solver_defaults(kind);
    switch (kind) {
        case ScenarioKind::Example1:
            doc["example"] = {{"gamma", 0.01}, {"tau", 1.0}, {"epsilon", 1e-3}, {"R", 10.0}, {"x0", floats({5.0, 0.0, 5.0})}};
            doc["sweep"] = sweep_table(10.0, 1.0, 20, 100.0, json::array({floats({0.01, 1.0, 1e-3, 0.0})}));
            break;
        case ScenarioKind::Example2:
            doc["example"] = {{"gamma", 0.1}, {"tau", 1.0}, {"epsilon", 1e-2}, {"x0", floats({2.0, 0.0, 2.0})}};
            doc["sweep"] = sweep_table(5.0, 0.5, 10, 100.0,
                                       json::array({floats({0.1, 1.0, 1e-2, 0.0}), floats({0.05, 2.0, 5e-3, 0.0}),
                                                    floats({0.025, 4.0, 2.5e-3, 0.0})}));
            break;
        case ScenarioKind::UnicycleNes: {
            const GameParams g;
            json sources = json::array();
            for (const auto& s : g.sources) sources.push_back(floats({s[0], s[1]}));
            doc["game"] = {{"c", g.c}, {"sources", sources}};
            doc["controller"] = {
                {"alpha", 0.05},
                {"beta", 0.003},
                {"amplitudes", floats({0.1, 0.1, 0.1, 0.1})},
                {"frequencies", json::array()},
                {"tau", floats({1e-2, 1.5e-2, 2e-2, 1e-2})},
                {"tau0", 0.02},
                {"t0", floats({0.0, 0.002, 0.004, 0.006})},
                {"filter_bound", 1e4},
                {"dither_in_measurement", true},
                {"u0", json::array()},
            };
            doc["unicycle"] = {{"omega_r", 2.0 / 9.0}, {"epsilon", 0.02}, {"wire_gains", false}};
            const double sigmas[] = {2e-3, 3e-3, 4e-3, 2e-3};
            for (std::size_t i = 0; i < 4; ++i) {
                doc["unicycle"][std::to_string(i + 1)] = agent_table(sigmas[i]);
            }
            doc["sweep"] = sweep_table(2.0, 0.5, 2, 10.0, json::array({floats({0.05, 0.02, 0.02, 0.003})}));
            break;
        }
    }
    return doc;
}

std::vector<std::string> config_keys(ScenarioKind kind) {
    std::vector<std::string> keys;
    collect_leaves(default_document(kind), "", keys);
    return keys;
}

std::uint64_t ScenarioConfig::seed() const { return doc.at("seed").get<std::uint64_t>(); }

std::string ScenarioConfig::to_toml() const { return toml::emit(doc); }

ScenarioConfig load_config(ScenarioKind kind, std::string_view toml_text) {
    ScenarioConfig cfg{kind, default_document(kind)};
    if (!toml_text.empty()) {
        merge_into(cfg.doc, toml::parse(toml_text), "");
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> split_overrides(std::string_view text) {
    std::vector<std::string> items;
    std::string cur;
    int depth = 0;
    char quote = 0;
    for (const char c : text) {
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '[') {
            ++depth;
        } else if (c == ']') {
            --depth;
        } else if (c == ',' && depth == 0) {
            items.push_back(cur);
            cur.clear();
            continue;
        }
        cur += c;
    }
    if (quote || depth != 0) throw ConfigError("overrides: unbalanced brackets or quotes");
    items.push_back(cur);

    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : items) {
        if (trim(item).empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("overrides: expected key=value, got '" + item + "'");
        std::string key = trim(std::string_view(item).substr(0, eq));
        std::string value = trim(std::string_view(item).substr(eq + 1));
        if (key.empty()) throw ConfigError("overrides: empty key in '" + item + "'");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

void apply_overrides(ScenarioConfig& cfg, std::string_view text) {
    std::vector<std::string> leaves;
    collect_leaves(cfg.doc, "", leaves);
    for (const auto& [key, raw] : split_overrides(text)) {
        std::string path = key;
        if (key.find('.') == std::string::npos) {
            std::vector<std::string> hits;
            for (const auto& leaf : leaves) {
                const auto dot = leaf.rfind('.');
                if ((dot == std::string::npos ? leaf : leaf.substr(dot + 1)) == key) hits.push_back(leaf);
            }
            if (hits.empty()) throw ConfigError("overrides: unknown key '" + key + "'");
            if (hits.size() > 1) {
                std::string list;
                for (const auto& h : hits) list += (list.empty() ? "" : ", ") + h;
                throw ConfigError("overrides: key '" + key + "' is ambiguous (" + list + ")");
            }
            path = hits.front();
        }
        json* node = &cfg.doc;
        for (const auto& part : split_dotted(path)) {
            if (!node->is_object() || !node->contains(part)) throw ConfigError("overrides: unknown key '" + key + "'");
            node = &(*node)[part];
        }
        if (node->is_object()) throw ConfigError("overrides: '" + key + "' is a table");
        json value;
        try {
            value = toml::parse_value(raw);
        } catch (const ConfigError&) {
            if (!node->is_string()) throw ConfigError("overrides: cannot parse value '" + raw + "' for '" + key + "'");
            value = raw;
        }
        *node = coerce(*node, value, path);
    }
}

SolverConfig solver_config(const ScenarioConfig& cfg) {
    SolverConfig s;
    s.step = num(cfg, {"solver", "step"});
    s.max_t = num(cfg, {"solver", "max_t"});
    s.max_j = at(cfg, {"solver", "max_j"}).get<std::size_t>();
    const auto priority = at(cfg, {"solver", "priority"}).get<std::string>();
    if (priority == "jump_first") {
        s.priority = Priority::JumpFirst;
    } else if (priority == "flow_first") {
        s.priority = Priority::FlowFirst;
    } else {
        throw ConfigError("config: solver.priority must be jump_first or flow_first");
    }
    s.guard_tol = num(cfg, {"solver", "guard_tol"});
    s.bisection_iters = at(cfg, {"solver", "bisection_iters"}).get<int>();
    s.record_stride = at(cfg, {"solver", "record_stride"}).get<std::size_t>();
    s.sample_interval = num(cfg, {"solver", "sample_interval"});
    try {
        s.validate();
    } catch (const ParamError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return s;
}

namespace {

template <typename P>
P validated(P p) {
    try {
        p.validate();
    } catch (const ParamError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return p;
}

}  // namespace

Example1Params example1_params(const ScenarioConfig& cfg) {
    require_kind(cfg, ScenarioKind::Example1);
    Example1Params p;
    p.gamma = num(cfg, {"example", "gamma"});
    p.tau = num(cfg, {"example", "tau"});
    p.epsilon = num(cfg, {"example", "epsilon"});
    p.R = num(cfg, {"example", "R"});
    p.x0 = vec(cfg, {"example", "x0"});
    return validated(p);
}

Example2Params example2_params(const ScenarioConfig& cfg) {
    require_kind(cfg, ScenarioKind::Example2);
    Example2Params p;
    p.gamma = num(cfg, {"example", "gamma"});
    p.tau = num(cfg, {"example", "tau"});
    p.epsilon = num(cfg, {"example", "epsilon"});
    p.x0 = vec(cfg, {"example", "x0"});
    return validated(p);
}

GameParams game_params(const ScenarioConfig& cfg) {
    require_kind(cfg, ScenarioKind::UnicycleNes);
    GameParams g;
    g.c = num(cfg, {"game", "c"});
    g.sources.clear();
    for (const auto& s : at(cfg, {"game", "sources"})) {
        if (!s.is_array() || s.size() != 2) throw ConfigError("config: game.sources must be a list of [x, y] pairs");
        g.sources.push_back({s[0].get<double>(), s[1].get<double>()});
    }
    return g;
}

NESControllerParams nes_params(const ScenarioConfig& cfg) {
    require_kind(cfg, ScenarioKind::UnicycleNes);
    NESControllerParams p;
    p.alpha = num(cfg, {"controller", "alpha"});
    p.beta = num(cfg, {"controller", "beta"});
    p.amplitudes = vec(cfg, {"controller", "amplitudes"});
    p.frequencies = vec(cfg, {"controller", "frequencies"});
    p.tau = vec(cfg, {"controller", "tau"});
    p.tau0 = num(cfg, {"controller", "tau0"});
    p.t0 = vec(cfg, {"controller", "t0"});
    p.filter_bound = num(cfg, {"controller", "filter_bound"});
    p.dither_in_measurement = at(cfg, {"controller", "dither_in_measurement"}).get<bool>();
    if (p.frequencies.empty()) {
        p.frequencies = generate_frequencies(2 * game_params(cfg).agents(), cfg.seed());
    }
    return p;
}

std::vector<UnicycleParams> unicycle_params(const ScenarioConfig& cfg) {
    require_kind(cfg, ScenarioKind::UnicycleNes);
    const std::size_t N = game_params(cfg).agents();
    const double omega_r = num(cfg, {"unicycle", "omega_r"});
    const bool wire = at(cfg, {"unicycle", "wire_gains"}).get<bool>();
    const json& tables = at(cfg, {"unicycle"});
    std::vector<UnicycleParams> out;
    for (std::size_t i = 0; i < N; ++i) {
        const std::string k = std::to_string(i + 1);
        if (!tables.contains(k)) throw ConfigError("config: missing table [unicycle." + k + "]");
        const json& t = tables[k];
        const double sigma = t.at("sigma").get<double>();
        if (wire) {
            out.push_back(UnicycleParams::wired(sigma, omega_r));
        } else {
            UnicycleParams p;
            p.sigma = sigma;
            p.omega_r = omega_r;
            p.c1 = t.at("c1").get<double>();
            p.c2 = t.at("c2").get<double>();
            p.c3 = t.at("c3").get<double>();
            out.push_back(p);
        }
    }
    return out;
}

double plant_epsilon(const ScenarioConfig& cfg) {
    require_kind(cfg, ScenarioKind::UnicycleNes);
    return num(cfg, {"unicycle", "epsilon"});
}

std::vector<double> plant_timers(const ScenarioConfig& cfg) {
    require_kind(cfg, ScenarioKind::UnicycleNes);
    const std::size_t N = game_params(cfg).agents();
    std::vector<double> out;
    for (std::size_t i = 0; i < N; ++i) {
        const std::string k = std::to_string(i + 1);
        out.push_back(at(cfg, {"unicycle"})[k].at("timer0").get<double>());
    }
    return out;
}

State initial_actions(const ScenarioConfig& cfg) {
    State u0 = vec(cfg, {"controller", "u0"});
    if (!u0.empty()) return u0;
    for (const auto& s : game_params(cfg).sources) {
        u0.push_back(s[0]);
        u0.push_back(s[1]);
    }
    return u0;
}

SGPASProbe sweep_probe(const ScenarioConfig& cfg) {
    SGPASProbe p;
    p.Delta = num(cfg, {"sweep", "Delta"});
    p.delta = num(cfg, {"sweep", "delta"});
    p.n_initial = at(cfg, {"sweep", "n_initial"}).get<std::size_t>();
    p.horizon_t = num(cfg, {"sweep", "horizon"});
    p.tail_fraction = num(cfg, {"sweep", "tail_fraction"});
    p.seed = cfg.seed();
    for (const auto& row : at(cfg, {"sweep", "grid"})) {
        if (!row.is_array() || row.size() != 4) {
            throw ConfigError("config: sweep.grid rows must be [gamma, tau, epsilon, beta]");
        }
        p.grid.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>()});
    }
    try {
        p.validate();
    } catch (const ParamError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return p;
}

unsigned sweep_threads(const ScenarioConfig& cfg) { return at(cfg, {"sweep", "threads"}).get<unsigned>(); }

}  // namespace hybridsp
