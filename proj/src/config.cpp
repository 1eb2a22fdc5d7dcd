#include "dlms/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "dlms/errors.hpp"

namespace dlms {

using nlohmann::json;

namespace {

void expect_keys(const json& j, const std::string& context,
                 std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known)
            throw ConfigError("unknown key '" + it.key() + "' in " + context);
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::pair<double, double> get_range(const json& j, const char* key,
                                    std::pair<double, double> fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(std::string("'") + key + "' must be a [lo, hi] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

Strategy parse_strategy(const std::string& s) {
    if (s == "atc") return Strategy::Atc;
    if (s == "cta") return Strategy::Cta;
    throw ConfigError("unknown strategy '" + s + "' (expected atc or cta)");
}

Attractor parse_attractor(const std::string& s) {
    if (s == "none") return Attractor::None;
    if (s == "za") return Attractor::Za;
    if (s == "rza") return Attractor::Rza;
    throw ConfigError("unknown attractor '" + s + "' (expected none, za or rza)");
}

AlgorithmVariant to_variant(const RunConfig::VariantCfg& vc) {
    AlgorithmVariant v;
    v.strategy = parse_strategy(vc.strategy);
    v.attractor = parse_attractor(vc.attractor);
    v.params.step_size = vc.mu;
    v.params.leak = vc.gamma;
    v.params.attractor_strength = vc.rho;
    v.params.reweight_scale = vc.epsilon;
    v.name = vc.name;
    return v;
}

std::vector<AlgorithmVariant> to_variants(const std::vector<RunConfig::VariantCfg>& list) {
    if (list.empty()) throw ConfigError("at least one variant is required");
    std::vector<AlgorithmVariant> out;
    out.reserve(list.size());
    for (const auto& vc : list) out.push_back(to_variant(vc));
    return out;
}

} // namespace

RunConfig config_from_json(const json& j) {
    expect_keys(j, "config",
                {"scenario", "topology", "combiner", "signal", "taps", "system",
                 "variants", "iterations", "trials", "seed", "tail_fraction"});
    RunConfig c;
    c.scenario = get_or<std::string>(j, "scenario", "");

    if (j.contains("topology")) {
        const json& t = j.at("topology");
        expect_keys(t, "topology", {"type", "nodes", "radius", "seed", "edges", "path"});
        c.topology.type = get_or<std::string>(t, "type", c.topology.type);
        c.topology.nodes = get_or<int>(t, "nodes", c.topology.nodes);
        c.topology.radius = get_or<double>(t, "radius", c.topology.radius);
        c.topology.seed = get_or<std::uint64_t>(t, "seed", c.topology.seed);
        c.topology.path = get_or<std::string>(t, "path", "");
        if (t.contains("edges")) {
            for (const auto& e : t.at("edges")) {
                if (!e.is_array() || e.size() != 2)
                    throw ConfigError("each edge must be a [l, k] pair");
                c.topology.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            }
        }
    }

    c.combiner = get_or<std::string>(j, "combiner", c.combiner);

    if (j.contains("signal")) {
        const json& s = j.at("signal");
        expect_keys(s, "signal",
                    {"input_variances", "noise_variances", "input_range", "noise_range",
                     "seed", "coloring", "ar_pole"});
        c.signal.input_variances =
            get_or<std::vector<double>>(s, "input_variances", {});
        c.signal.noise_variances =
            get_or<std::vector<double>>(s, "noise_variances", {});
        c.signal.input_range = get_range(s, "input_range", c.signal.input_range);
        c.signal.noise_range = get_range(s, "noise_range", c.signal.noise_range);
        c.signal.seed = get_or<std::uint64_t>(s, "seed", 0);
        c.signal.coloring = get_or<std::string>(s, "coloring", c.signal.coloring);
        c.signal.ar_pole = get_or<double>(s, "ar_pole", c.signal.ar_pole);
    }

    c.taps = get_or<int>(j, "taps", c.taps);

    if (j.contains("system")) {
        const json& sys = j.at("system");
        expect_keys(sys, "system", {"type", "values", "stages", "nested", "seed"});
        c.system.type = get_or<std::string>(sys, "type", c.system.type);
        c.system.values = get_or<std::vector<double>>(sys, "values", {});
        c.system.nested = get_or<bool>(sys, "nested", true);
        c.system.seed = get_or<std::uint64_t>(sys, "seed", 0);
        if (sys.contains("stages")) {
            for (const auto& st : sys.at("stages")) {
                if (c.system.type == "sparsity") {
                    expect_keys(st, "sparsity stage", {"start", "active"});
                    c.system.sparsity_stages.push_back(
                        {st.at("start").get<long>(), st.at("active").get<int>()});
                } else {
                    expect_keys(st, "stage", {"start", "values"});
                    c.system.stages.emplace_back(
                        st.at("start").get<long>(),
                        st.at("values").get<std::vector<double>>());
                }
            }
        }
    }

    if (j.contains("variants")) {
        c.present.variants = true;
        for (const auto& v : j.at("variants")) {
            expect_keys(v, "variant",
                        {"strategy", "attractor", "mu", "gamma", "rho", "epsilon", "name"});
            RunConfig::VariantCfg vc;
            vc.strategy = get_or<std::string>(v, "strategy", vc.strategy);
            vc.attractor = get_or<std::string>(v, "attractor", vc.attractor);
            vc.mu = get_or<double>(v, "mu", vc.mu);
            vc.gamma = get_or<double>(v, "gamma", vc.gamma);
            vc.rho = get_or<double>(v, "rho", vc.rho);
            vc.epsilon = get_or<double>(v, "epsilon", vc.epsilon);
            vc.name = get_or<std::string>(v, "name", "");
            c.variants.push_back(std::move(vc));
        }
    }

    if (j.contains("iterations")) c.present.iterations = true;
    if (j.contains("trials")) c.present.trials = true;
    if (j.contains("tail_fraction")) c.present.tail_fraction = true;
    c.iterations = get_or<long>(j, "iterations", c.iterations);
    c.trials = get_or<int>(j, "trials", c.trials);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.tail_fraction = get_or<double>(j, "tail_fraction", c.tail_fraction);
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    if (!c.scenario.empty()) j["scenario"] = c.scenario;

    json t;
    t["type"] = c.topology.type;
    if (c.topology.type == "file") {
        t["path"] = c.topology.path;
    } else {
        t["nodes"] = c.topology.nodes;
    }
    if (c.topology.type == "geometric") {
        t["radius"] = c.topology.radius;
        t["seed"] = c.topology.seed;
    }
    if (c.topology.type == "edges") {
        json edges = json::array();
        for (const auto& [l, k] : c.topology.edges) edges.push_back({l, k});
        t["edges"] = std::move(edges);
    }
    j["topology"] = std::move(t);

    j["combiner"] = c.combiner;

    json s;
    if (!c.signal.input_variances.empty()) {
        s["input_variances"] = c.signal.input_variances;
        s["noise_variances"] = c.signal.noise_variances;
    } else {
        s["input_range"] = {c.signal.input_range.first, c.signal.input_range.second};
        s["noise_range"] = {c.signal.noise_range.first, c.signal.noise_range.second};
        if (c.signal.seed != 0) s["seed"] = c.signal.seed;
    }
    s["coloring"] = c.signal.coloring;
    if (c.signal.coloring == "ar1") s["ar_pole"] = c.signal.ar_pole;
    j["signal"] = std::move(s);

    j["taps"] = c.taps;

    json sys;
    sys["type"] = c.system.type;
    if (c.system.type == "vector") {
        sys["values"] = c.system.values;
    } else if (c.system.type == "stages") {
        json stages = json::array();
        for (const auto& [start, values] : c.system.stages)
            stages.push_back({{"start", start}, {"values", values}});
        sys["stages"] = std::move(stages);
    } else if (c.system.type == "sparsity") {
        json stages = json::array();
        for (const auto& st : c.system.sparsity_stages)
            stages.push_back({{"start", st.start}, {"active", st.active}});
        sys["stages"] = std::move(stages);
        sys["nested"] = c.system.nested;
        if (c.system.seed != 0) sys["seed"] = c.system.seed;
    }
    j["system"] = std::move(sys);

    json variants = json::array();
    for (const auto& v : c.variants) {
        json vj;
        vj["strategy"] = v.strategy;
        vj["attractor"] = v.attractor;
        vj["mu"] = v.mu;
        vj["gamma"] = v.gamma;
        vj["rho"] = v.rho;
        vj["epsilon"] = v.epsilon;
        if (!v.name.empty()) vj["name"] = v.name;
        variants.push_back(std::move(vj));
    }
    j["variants"] = std::move(variants);

    j["iterations"] = c.iterations;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["tail_fraction"] = c.tail_fraction;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);  // allow // comments
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

std::vector<std::string> preset_names() {
    return {"4.1",         "4.1-colored",  "4.2",          "4.3",
            "4.3-lza-mu",  "4.3-lza-gamma", "4.3-lza-rho",
            "4.3-lrza-mu", "4.3-lrza-gamma", "4.3-lrza-rho"};
}

ExperimentSpec preset_spec(const std::string& name, std::uint64_t seed) {
    if (name == "4.1") return scenario_41(seed, Coloring::White);
    if (name == "4.1-colored") return scenario_41(seed, Coloring::Ar1);
    if (name == "4.2") return scenario_42(seed);
    if (name == "4.3") return scenario_43(seed);
    const std::string prefix = "4.3-";
    if (name.rfind(prefix, 0) == 0) {
        ExperimentSpec s = scenario_43(seed);
        s.variants = scenario_43_sweep(name.substr(prefix.size()));
        s.name = name;
        return s;
    }
    std::ostringstream msg;
    msg << "unknown scenario '" << name << "'; available:";
    for (const auto& p : preset_names()) msg << " " << p;
    throw ConfigError(msg.str());
}

ExperimentSpec build_spec(const RunConfig& c) {
    if (!c.scenario.empty()) {
        ExperimentSpec s = preset_spec(c.scenario, c.seed);
        if (c.present.iterations) s.iterations = c.iterations;
        if (c.present.trials) s.trials = c.trials;
        if (c.present.tail_fraction) s.tail_fraction = c.tail_fraction;
        if (c.present.variants) s.variants = to_variants(c.variants);
        s.validate();
        return s;
    }

    ExperimentSpec s;
    s.name = "custom";
    s.master_seed = c.seed;

    if (c.topology.type == "geometric") {
        s.topology = random_geometric_topology(c.topology.nodes, c.topology.radius,
                                               c.topology.seed);
    } else if (c.topology.type == "full") {
        s.topology = fully_connected(c.topology.nodes);
    } else if (c.topology.type == "ring") {
        s.topology = ring(c.topology.nodes);
    } else if (c.topology.type == "edges") {
        std::vector<std::vector<std::uint8_t>> adj(
            c.topology.nodes, std::vector<std::uint8_t>(c.topology.nodes, 0));
        for (const auto& [l, k] : c.topology.edges) {
            if (l < 1 || l > c.topology.nodes || k < 1 || k > c.topology.nodes)
                throw ConfigError("edge endpoint out of range");
            adj[l - 1][k - 1] = adj[k - 1][l - 1] = 1;
        }
        s.topology = Topology::from_adjacency(std::move(adj));
    } else if (c.topology.type == "file") {
        s.topology = load_edge_list(c.topology.path);
    } else {
        throw ConfigError("unknown topology type '" + c.topology.type + "'");
    }

    if (c.combiner == "uniform") {
        s.combiner = build_uniform_combiner(s.topology);
    } else if (c.combiner == "metropolis") {
        s.combiner = build_metropolis_combiner(s.topology);
    } else {
        throw ConfigError("unknown combiner '" + c.combiner + "'");
    }
    s.combiner_rule = c.combiner;

    const int n = s.topology.node_count;
    if (!c.signal.input_variances.empty() || !c.signal.noise_variances.empty()) {
        if (static_cast<int>(c.signal.input_variances.size()) != n ||
            static_cast<int>(c.signal.noise_variances.size()) != n)
            throw ConfigError("explicit variance lists must have one entry per node");
        s.profile.input_variances =
            Eigen::Map<const Eigen::VectorXd>(c.signal.input_variances.data(), n);
        s.profile.noise_variances =
            Eigen::Map<const Eigen::VectorXd>(c.signal.noise_variances.data(), n);
    } else {
        const std::uint64_t sig_seed =
            c.signal.seed != 0 ? c.signal.seed : rng::derive_key(c.seed, {0x516});
        s.profile = sample_profile(n, c.signal.input_range, c.signal.noise_range, sig_seed);
    }
    if (c.signal.coloring == "ar1") {
        s.profile.coloring = Coloring::Ar1;
        s.profile.ar_pole = c.signal.ar_pole;
    } else if (c.signal.coloring != "white") {
        throw ConfigError("unknown coloring '" + c.signal.coloring + "'");
    }

    s.taps = c.taps;

    if (c.system.type == "vector") {
        if (static_cast<int>(c.system.values.size()) != c.taps)
            throw ConfigError("system values must have one entry per tap");
        s.schedule.stages.emplace_back(
            0, Eigen::Map<const Eigen::VectorXd>(c.system.values.data(), c.taps));
    } else if (c.system.type == "stages") {
        for (const auto& [start, values] : c.system.stages) {
            if (static_cast<int>(values.size()) != c.taps)
                throw ConfigError("stage values must have one entry per tap");
            s.schedule.stages.emplace_back(
                start, Eigen::Map<const Eigen::VectorXd>(values.data(), c.taps));
        }
    } else if (c.system.type == "sparsity") {
        SparsityScenario sparsity;
        sparsity.stages = c.system.sparsity_stages;
        sparsity.nested = c.system.nested;
        sparsity.seed =
            c.system.seed != 0 ? c.system.seed : rng::derive_key(c.seed, {0x5c4});
        s.schedule = sparsity.build(c.taps);
    } else {
        throw ConfigError("unknown system type '" + c.system.type + "'");
    }

    s.variants = to_variants(c.variants);
    s.iterations = c.iterations;
    s.trials = c.trials;
    s.tail_fraction = c.tail_fraction;
    s.validate();
    return s;
}

RunConfig config_from_spec(const ExperimentSpec& s) {
    RunConfig c;
    c.topology.type = "edges";
    c.topology.nodes = s.topology.node_count;
    for (int l = 0; l < s.topology.node_count; ++l)
        for (int k = l + 1; k < s.topology.node_count; ++k)
            if (s.topology.adjacent(l, k)) c.topology.edges.emplace_back(l + 1, k + 1);

    c.combiner = s.combiner_rule;

    c.signal.input_variances.assign(s.profile.input_variances.data(),
                                    s.profile.input_variances.data() + s.profile.nodes());
    c.signal.noise_variances.assign(s.profile.noise_variances.data(),
                                    s.profile.noise_variances.data() + s.profile.nodes());
    c.signal.coloring = s.profile.coloring == Coloring::Ar1 ? "ar1" : "white";
    c.signal.ar_pole = s.profile.ar_pole;

    c.taps = s.taps;

    c.system.type = "stages";
    for (const auto& [start, values] : s.schedule.stages)
        c.system.stages.emplace_back(
            start, std::vector<double>(values.data(), values.data() + values.size()));

    for (const auto& v : s.variants) {
        RunConfig::VariantCfg vc;
        vc.strategy = to_string(v.strategy);
        vc.attractor = to_string(v.attractor);
        vc.mu = v.params.step_size;
        vc.gamma = v.params.leak;
        vc.rho = v.params.attractor_strength;
        vc.epsilon = v.params.reweight_scale;
        vc.name = v.label();
        c.variants.push_back(std::move(vc));
    }

    c.iterations = s.iterations;
    c.trials = s.trials;
    c.seed = s.master_seed;
    c.tail_fraction = s.tail_fraction;
    c.present = {true, true, true, true};
    return c;
}

} // namespace dlms
