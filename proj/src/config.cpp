#include "cogarq/config.hpp"

#include <cmath>

namespace cogarq {

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

Json default_model()
{
    return Json{{"preset", "erasure"},
                {"P_EE", 0.99},
                {"P_NE", 0.01},
                {"r_p", 1.0},
                {"gamma", {0.2, 0.01, 0.95, 0.3}},
                {"transitions", nullptr},
                {"silent_ack", nullptr},
                {"transmit_ack", nullptr}};
}

std::vector<double> linspace(double lo, double hi, int steps)
{
    std::vector<double> out;
    for (int i = 0; i <= steps; ++i)
        out.push_back(std::round((lo + (hi - lo) * i / steps) * 1e12) / 1e12);
    return out;
}

double number(const Json& v, const std::string& path)
{
    if (!v.is_number())
        throw ConfigError(path, "expected a number, got " + v.dump());
    return v.get<double>();
}

double probability(const Json& v, const std::string& path)
{
    const double x = number(v, path);
    if (!(x >= 0.0 && x <= 1.0))
        throw ConfigError(path, "must lie in [0, 1]");
    return x;
}

std::uint64_t count(const Json& v, const std::string& path)
{
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(path, "expected a non-negative integer, got " + v.dump());
    return v.get<std::uint64_t>();
}

std::vector<double> number_list(const Json& v, const std::string& path)
{
    if (!v.is_array())
        throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace

Json default_config()
{
    Json training{{"length", 1000},
                  {"transmit_length", 1000},
                  {"lengths", {30, 100, 300, 1000, 3000, 10000}},
                  {"seeds", 32},
                  {"starts", 4},
                  {"tolerance", 1e-8},
                  {"max_iterations", 500},
                  {"trace_path", nullptr},
                  {"transmit_trace_path", nullptr},
                  {"evaluation", "analytic"}};
    Json m_list = Json::array();
    for (int m : {0, 1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 25, 30, 40, 50, 70, 100, 150, 200, 300, 500, 1000})
        m_list.push_back(m);
    return Json{{"seed", 1},
                {"w", 0.6},
                {"r_s", 1.0},
                {"model", default_model()},
                {"models", nullptr},
                {"solver", {{"alpha", 0.999}, {"grid_resolution", 0}, {"tolerance", 1e-10}, {"max_iterations", 1000000}}},
                {"sim",
                 {{"horizon", 1000000},
                  {"replications", 16},
                  {"burn_in", nullptr},
                  {"random_init", false},
                  {"threads", 0},
                  {"trace_path", nullptr}}},
                {"policy", {{"kind", "dp"}, {"M", nullptr}, {"file", nullptr}}},
                {"policies", {"dp", "greedy", "genie"}},
                {"w_grid", linspace(0.0, 1.0, 20)},
                {"training", training},
                {"m_list", m_list},
                {"output", {{"dir", "out"}}}};
}

Json merge_config(const Json& base, const Json& user, const std::string& path)
{
    if (!user.is_object())
        throw ConfigError(path, "expected an object");
    Json out = base;
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string p = join(path, it.key());
        if (!base.contains(it.key()))
            throw ConfigError(p, "unknown key");
        const Json& def = base[it.key()];
        if (def.is_object() && !def.empty()) {
            out[it.key()] = merge_config(def, it.value(), p);
        } else if (p == "models" && it.value().is_array()) {
            Json list = Json::array();
            for (std::size_t i = 0; i < it.value().size(); ++i)
                list.push_back(merge_config(default_model(), it.value()[i], p + "[" + std::to_string(i) + "]"));
            out[it.key()] = list;
        } else {
            out[it.key()] = it.value();
        }
    }
    return out;
}

void apply_set(Json& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("", "--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;

    Json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t pos; (pos = rest.find('.')) != std::string::npos;) {
        parts.push_back(rest.substr(0, pos));
        rest = rest.substr(pos + 1);
    }
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it)
        patch = Json{{*it, patch}};
    config = merge_config(config, patch);
}

Json resolve_config(const Json& user, const std::vector<std::string>& sets)
{
    Json cfg = merge_config(default_config(), user.is_null() ? Json::object() : user);
    for (const auto& s : sets)
        apply_set(cfg, s);
    validate_config(cfg);
    return cfg;
}

ChannelModel model_from_config(const Json& m, const std::string& path)
{
    if (!m["preset"].is_string())
        throw ConfigError(join(path, "preset"), "expected a string");
    const std::string preset = m["preset"].get<std::string>();
    const double r_p = number(m["r_p"], join(path, "r_p"));
    if (!(r_p >= 0.0))
        throw ConfigError(join(path, "r_p"), "must be non-negative");
    auto matrix = [&]() {
        const Json& t = m["transitions"];
        const std::string p = join(path, "transitions");
        if (!t.is_array())
            throw ConfigError(p, "expected a square array of rows");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < t.size(); ++i)
            rows.push_back(number_list(t[i], p + "[" + std::to_string(i) + "]"));
        try {
            return TransitionMatrix(rows);
        } catch (const Error& e) {
            throw ConfigError(p, e.what());
        }
    };
    try {
        if (preset == "erasure")
            return ChannelModel::erasure(probability(m["P_EE"], join(path, "P_EE")),
                                         probability(m["P_NE"], join(path, "P_NE")), r_p);
        if (preset == "gilbert_elliot") {
            const auto g = number_list(m["gamma"], join(path, "gamma"));
            if (g.size() != 4)
                throw ConfigError(join(path, "gamma"), "expected four entries");
            return ChannelModel::gilbert_elliot(probability(m["P_EE"], join(path, "P_EE")),
                                                probability(m["P_NE"], join(path, "P_NE")), g[0], g[1], g[2], g[3],
                                                r_p);
        }
        if (preset == "three_state") {
            if (m["transitions"].is_null())
                return ChannelModel::three_state(
                    TransitionMatrix({{0.9, 0.005, 0.095}, {0.005, 0.9, 0.095}, {0.095, 0.005, 0.9}}), r_p);
            return ChannelModel::three_state(matrix(), r_p);
        }
        if (preset == "general") {
            SuccessProfile prof{number_list(m["silent_ack"], join(path, "silent_ack")),
                                number_list(m["transmit_ack"], join(path, "transmit_ack"))};
            return ChannelModel(matrix(), prof, r_p);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join(path, "preset"),
                      "unknown preset '" + preset + "' (expected erasure, gilbert_elliot, three_state, general)");
}

std::vector<ChannelModel> models_from_config(const Json& cfg)
{
    if (!cfg["models"].is_null()) {
        const Json& list = cfg["models"];
        if (!list.is_array() || list.size() != 2)
            throw ConfigError("models", "expected exactly two channel models");
        return {model_from_config(list[0], "models[0]"), model_from_config(list[1], "models[1]")};
    }
    return {model_from_config(cfg["model"], "model")};
}

SolverParams solver_from_config(const Json& cfg)
{
    const Json& s = cfg["solver"];
    SolverParams p;
    p.alpha = number(s["alpha"], "solver.alpha");
    p.w = probability(cfg["w"], "w");
    p.r_s = number(cfg["r_s"], "r_s");
    p.grid_resolution = count(s["grid_resolution"], "solver.grid_resolution");
    p.tolerance = number(s["tolerance"], "solver.tolerance");
    p.max_iterations = count(s["max_iterations"], "solver.max_iterations");
    try {
        p.validate();
    } catch (const Error& e) {
        throw ConfigError("solver", e.what());
    }
    return p;
}

SimConfig sim_from_config(const Json& cfg)
{
    const Json& s = cfg["sim"];
    SimConfig c;
    c.models = models_from_config(cfg);
    c.w = probability(cfg["w"], "w");
    c.r_s = number(cfg["r_s"], "r_s");
    c.horizon = count(s["horizon"], "sim.horizon");
    if (!s["burn_in"].is_null())
        c.burn_in = count(s["burn_in"], "sim.burn_in");
    c.replications = count(s["replications"], "sim.replications");
    c.seed = count(cfg["seed"], "seed");
    if (!s["random_init"].is_boolean())
        throw ConfigError("sim.random_init", "expected a boolean");
    c.random_init = s["random_init"].get<bool>();
    c.threads = count(s["threads"], "sim.threads");
    try {
        c.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("sim", e.what());
    }
    return c;
}

EmOptions em_from_config(const Json& cfg)
{
    const Json& t = cfg["training"];
    EmOptions o;
    o.tolerance = number(t["tolerance"], "training.tolerance");
    o.max_iterations = count(t["max_iterations"], "training.max_iterations");
    if (!(o.tolerance > 0.0) || o.max_iterations == 0)
        throw ConfigError("training", "tolerance and max_iterations must be positive");
    return o;
}

std::vector<double> w_grid_from_config(const Json& cfg)
{
    auto g = number_list(cfg["w_grid"], "w_grid");
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!(g[i] >= 0.0 && g[i] <= 1.0))
            throw ConfigError("w_grid[" + std::to_string(i) + "]", "must lie in [0, 1]");
    return g;
}

void validate_config(const Json& cfg)
{
    count(cfg["seed"], "seed");
    probability(cfg["w"], "w");
    if (!(number(cfg["r_s"], "r_s") >= 0.0))
        throw ConfigError("r_s", "must be non-negative");
    models_from_config(cfg);
    solver_from_config(cfg);
    sim_from_config(cfg);
    em_from_config(cfg);
    w_grid_from_config(cfg);

    const Json& pol = cfg["policy"];
    if (!pol["kind"].is_string())
        throw ConfigError("policy.kind", "expected a string");
    try {
        parse_policy_kind(pol["kind"].get<std::string>());
    } catch (const Error& e) {
        throw ConfigError("policy.kind", e.what());
    }
    if (!pol["M"].is_null() && !(pol["M"].is_string() && pol["M"] == "inf"))
        count(pol["M"], "policy.M");
    if (!pol["file"].is_null() && !pol["file"].is_string())
        throw ConfigError("policy.file", "expected a path string");
    if (!cfg["policies"].is_array())
        throw ConfigError("policies", "expected an array of policy names");
    for (std::size_t i = 0; i < cfg["policies"].size(); ++i) {
        const Json& p = cfg["policies"][i];
        const std::string path = "policies[" + std::to_string(i) + "]";
        if (!p.is_string())
            throw ConfigError(path, "expected a string");
        try {
            parse_policy_kind(p.get<std::string>());
        } catch (const Error& e) {
            throw ConfigError(path, e.what());
        }
    }
    const Json& t = cfg["training"];
    count(t["length"], "training.length");
    count(t["transmit_length"], "training.transmit_length");
    count(t["seeds"], "training.seeds");
    count(t["starts"], "training.starts");
    if (!t["lengths"].is_array())
        throw ConfigError("training.lengths", "expected an array of integers");
    for (std::size_t i = 0; i < t["lengths"].size(); ++i)
        count(t["lengths"][i], "training.lengths[" + std::to_string(i) + "]");
    if (!(t["evaluation"] == "analytic" || t["evaluation"] == "simulated"))
        throw ConfigError("training.evaluation", "expected 'analytic' or 'simulated'");
    for (const char* k : {"trace_path", "transmit_trace_path"})
        if (!t[k].is_null() && !t[k].is_string())
            throw ConfigError(std::string("training.") + k, "expected a path string");
    if (!cfg["sim"]["trace_path"].is_null() && !cfg["sim"]["trace_path"].is_string())
        throw ConfigError("sim.trace_path", "expected a path string");
    if (!cfg["m_list"].is_array())
        throw ConfigError("m_list", "expected an array of integers");
    for (std::size_t i = 0; i < cfg["m_list"].size(); ++i)
        count(cfg["m_list"][i], "m_list[" + std::to_string(i) + "]");
    if (!cfg["output"]["dir"].is_string())
        throw ConfigError("output.dir", "expected a path string");
}

} // namespace cogarq
