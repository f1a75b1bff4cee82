// Command-line front end: solve, simulate, figure, learn, optimal-m, rate-region.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cogarq/closedform.hpp"
#include "cogarq/config.hpp"
#include "cogarq/dp.hpp"
#include "cogarq/errors.hpp"
#include "cogarq/hmm.hpp"
#include "cogarq/io.hpp"
#include "cogarq/parallel.hpp"
#include "cogarq/sim.hpp"

namespace fs = std::filesystem;
using namespace cogarq;

namespace {

constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

/// A usage problem that is not tied to a config field (missing files and the like).
class UsageError : public Error {
public:
    using Error::Error;
};

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> sets;
};

Json load_user_config(const std::string& path)
{
    if (path.empty())
        return Json::object();
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read config file " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError("malformed JSON in " + path + ": " + e.what());
    }
}

/// Defaults, then `overlay` (figure presets), then the user file, --set, --seed and --out.
Json resolve(const Common& c, const Json& overlay = Json::object())
{
    Json cfg = merge_config(default_config(), overlay);
    cfg = merge_config(cfg, load_user_config(c.config_path));
    for (const auto& s : c.sets)
        apply_set(cfg, s);
    if (c.seed)
        cfg["seed"] = *c.seed;
    if (!c.out_dir.empty())
        cfg["output"]["dir"] = c.out_dir;
    validate_config(cfg);
    return cfg;
}

Json provenance(const std::string& command, const Json& cfg)
{
    return Json{{"command", command}, {"version", version_string()}, {"config", cfg}};
}

fs::path out_dir(const Json& cfg) { return fs::path(cfg["output"]["dir"].get<std::string>()); }

MPolicyParams m_params(const Json& cfg)
{
    const auto models = models_from_config(cfg);
    const ChannelModel& m = models.front();
    if (models.size() != 1 || !m.is_erasure())
        throw ConfigError("model.preset", "burst-length policies need a single erasure channel");
    MPolicyParams p{m.transitions()(0, 0), m.transitions()(1, 0), cfg["w"].get<double>(), m.primary_reward(),
                    cfg["r_s"].get<double>()};
    try {
        p.validate();
    } catch (const Error& e) {
        throw ConfigError("model", e.what());
    }
    return p;
}

void print_threshold(const ThresholdReport& rep)
{
    if (rep.p_th)
        std::cout << "threshold: transmit when P(E) >= " << format_number(*rep.p_th) << " (bounds ["
                  << format_number(rep.lower_bound) << ", " << format_number(rep.upper_bound) << "])\n";
    else
        std::cout << "threshold: always " << (*rep.uniform_action == Action::Transmit ? "transmit" : "listen")
                  << '\n';
}

int cmd_solve(const Common& c)
{
    const Json cfg = resolve(c);
    const auto models = models_from_config(cfg);
    const SolverParams sp = solver_from_config(cfg);
    const ValueGrid grid = solve_problem(models, sp);
    const fs::path path = out_dir(cfg) / "policy.json";
    Json doc = value_grid_to_json(grid, provenance("solve", cfg));
    if (grid.grid.domain() == Domain::Interval) {
        const ThresholdReport rep = extract_threshold(grid, sp, models.front());
        doc["threshold"] = threshold_to_json(rep);
        print_threshold(rep);
    }
    write_json_file(path, doc);
    std::cout << "wrote " << path.string() << " (" << grid.diagnostics.iterations << " iterations)\n";
    return 0;
}

PolicySpec policy_spec(const Json& cfg, const std::string& policy_file)
{
    const SimConfig sim = sim_from_config(cfg);
    std::string file = policy_file;
    if (file.empty() && cfg["policy"]["file"].is_string())
        file = cfg["policy"]["file"].get<std::string>();
    if (!file.empty()) {
        if (!fs::exists(file))
            throw UsageError("policy file " + file + " does not exist");
        auto grid = std::make_shared<const ValueGrid>(value_grid_from_json(read_json_file(file)));
        if (grid->problem != classify(sim.models))
            throw UsageError("policy file " + file + " solves a " + std::string(to_string(grid->problem)) +
                             " problem, config describes " + std::string(to_string(classify(sim.models))));
        return PolicySpec{PolicyKind::DP, BurstLength::finite(0), grid};
    }
    const PolicyKind kind = parse_policy_kind(cfg["policy"]["kind"].get<std::string>());
    PolicySpec spec{kind, BurstLength::finite(0), nullptr};
    if (kind == PolicyKind::DP)
        spec.grid = std::make_shared<const ValueGrid>(solve_problem(sim.models, solver_from_config(cfg)));
    if (kind == PolicyKind::MPolicy) {
        const Json& m = cfg["policy"]["M"];
        if (m.is_null())
            spec.m = optimal_m(m_params(cfg));
        else if (m.is_string())
            spec.m = BurstLength::infinite();
        else
            spec.m = BurstLength::finite(m.get<std::uint64_t>());
    }
    return spec;
}

int cmd_simulate(const Common& c, const std::string& policy_file)
{
    const Json cfg = resolve(c);
    SimConfig sim = sim_from_config(cfg);
    const PolicySpec spec = policy_spec(cfg, policy_file);
    std::ofstream trace;
    if (cfg["sim"]["trace_path"].is_string()) {
        const fs::path tp = cfg["sim"]["trace_path"].get<std::string>();
        if (tp.has_parent_path())
            fs::create_directories(tp.parent_path());
        trace.open(tp);
        if (!trace)
            throw UsageError("cannot open trace file " + tp.string());
        sim.trace = &trace;
    }
    const RunStats stats = simulate(sim, spec);
    std::vector<SweepRow> rows{SweepRow{sim.w, spec.kind, std::nullopt, stats}};
    if (spec.kind == PolicyKind::MPolicy)
        rows.front().m = spec.m;
    const fs::path path = out_dir(cfg) / "simulate.csv";
    write_csv_file(path, sim_sweep_table(rows, sim.horizon, sim.replications, sim.seed), provenance("simulate", cfg));
    std::cout << "R_p=" << format_number(stats.rate_p) << " R_s=" << format_number(stats.rate_s)
              << " R=" << format_number(stats.rate) << " stderr=" << format_number(stats.stderr_r) << '\n'
              << "wrote " << path.string() << '\n';
    return 0;
}

std::vector<PolicyKind> policy_list(const Json& cfg)
{
    std::vector<PolicyKind> out;
    for (const auto& p : cfg["policies"])
        out.push_back(parse_policy_kind(p.get<std::string>()));
    return out;
}

std::vector<std::size_t> length_list(const Json& cfg)
{
    return cfg["training"]["lengths"].get<std::vector<std::size_t>>();
}

DegradationOptions degradation_options(const Json& cfg)
{
    DegradationOptions o;
    o.seed = cfg["seed"].get<std::uint64_t>();
    o.starts = cfg["training"]["starts"].get<std::size_t>();
    o.em = em_from_config(cfg);
    o.evaluation = cfg["training"]["evaluation"] == "simulated" ? DegradationEvaluation::Simulated
                                                                 : DegradationEvaluation::Analytic;
    o.sim_horizon = cfg["sim"]["horizon"].get<std::size_t>();
    return o;
}

const std::map<std::string, Json>& figure_overlays()
{
    static const std::map<std::string, Json> overlays = {
        {"fig4", Json{{"policies", {"dp", "greedy", "genie"}}}},
        {"fig5", Json::object()},
        {"fig6", Json::object()},
        {"fig7", Json{{"model", {{"preset", "three_state"}}}, {"policies", {"dp", "greedy", "genie"}}}},
        {"fig8",
         Json{{"models", Json::array({Json{{"preset", "erasure"}}, Json{{"preset", "erasure"}}})},
              {"policies", {"dp", "greedy", "genie"}}}},
        {"fig9",
         Json{{"model", {{"preset", "gilbert_elliot"}, {"P_EE", 0.8}, {"P_NE", 0.1}}},
              {"policies", {"dp", "greedy", "genie"}}}},
        {"fig10", Json::object()},
        {"fig11", Json{{"training", {{"lengths", {30, 100}}}}}},
        {"fig12", Json::object()},
        {"fig13", Json{{"model", {{"preset", "gilbert_elliot"}, {"P_EE", 0.8}, {"P_NE", 0.1}}}}},
    };
    return overlays;
}

std::string figure_names()
{
    std::string s;
    for (int i = 4; i <= 13; ++i)
        s += (i > 4 ? ", fig" : "fig") + std::to_string(i);
    return s;
}

int cmd_figure(const Common& c, const std::string& name, bool empirical)
{
    const auto it = figure_overlays().find(name);
    if (it == figure_overlays().end())
        throw UsageError("unknown figure '" + name + "'; valid names: " + figure_names());
    const Json cfg = resolve(c, it->second);
    const Json prov = provenance("figure " + name, cfg);
    const fs::path path = out_dir(cfg) / (name + ".csv");
    const auto w_grid = w_grid_from_config(cfg);
    const auto models = models_from_config(cfg);
    const std::size_t seeds = cfg["training"]["seeds"].get<std::size_t>();
    const std::size_t threads = cfg["sim"]["threads"].get<std::size_t>();

    if (name == "fig4" || name == "fig7" || name == "fig8" || name == "fig9") {
        const SimConfig sim = sim_from_config(cfg);
        const auto rows = sweep_weights(sim, w_grid, policy_list(cfg), solver_from_config(cfg));
        write_csv_file(path, sim_sweep_table(rows, sim.horizon, sim.replications, sim.seed), prov);
    } else if (name == "fig5") {
        write_csv_file(path, closed_form_table(m_params(cfg), w_grid), prov);
    } else if (name == "fig6") {
        const auto ms = cfg["m_list"].get<std::vector<std::uint64_t>>();
        write_csv_file(path, rate_region_table(rate_region(m_params(cfg), ms)), prov);
        if (empirical) {
            const auto pts = empirical_rate_region(sim_from_config(cfg), w_grid, solver_from_config(cfg));
            const fs::path emp = out_dir(cfg) / "fig6_empirical.csv";
            write_csv_file(emp, empirical_region_table(pts), prov);
            std::cout << "wrote " << emp.string() << '\n';
        }
    } else if (name == "fig10" || name == "fig13") {
        std::vector<EstimationSummary> rows;
        for (std::size_t len : length_list(cfg))
            rows.push_back(estimation_study(models.front(), len, seeds, cfg["seed"].get<std::uint64_t>(),
                                            cfg["training"]["starts"].get<std::size_t>(), em_from_config(cfg), 0,
                                            threads));
        write_csv_file(path, estimation_table(std::string(to_string(models.front().preset())), rows), prov);
    } else if (name == "fig11" || name == "fig12") {
        std::vector<DegradationSummary> rows;
        const std::vector<double> ws = name == "fig11" ? w_grid : std::vector<double>{cfg["w"].get<double>()};
        for (std::size_t len : length_list(cfg)) {
            const auto part = degradation_study(models.front(), len, ws, seeds, cfg["r_s"].get<double>(),
                                                degradation_options(cfg), threads);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        write_csv_file(path, degradation_table(rows), prov);
    }
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

ObservationSequence load_trace(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read trace file " + path);
    try {
        return read_trace(in);
    } catch (const PreconditionError& e) {
        throw UsageError("bad trace file " + path + ": " + e.what());
    }
}

int cmd_learn(const Common& c)
{
    const Json cfg = resolve(c);
    const Json& t = cfg["training"];
    const ChannelModel model = models_from_config(cfg).front();
    const HmmSpec spec = HmmSpec::from_model(model);
    const EmOptions em = em_from_config(cfg);
    const std::uint64_t seed = cfg["seed"].get<std::uint64_t>();
    const std::size_t starts = t["starts"].get<std::size_t>();
    const bool two_phase = model.preset() == Preset::ThreeState;
    const Matrix truth = model.transitions().rows();

    Json runs = Json::array();
    if (t["trace_path"].is_string()) {
        const ObservationSequence silent = load_trace(t["trace_path"].get<std::string>());
        HmmFit fit;
        if (two_phase) {
            if (!t["transmit_trace_path"].is_string())
                throw ConfigError("training.transmit_trace_path", "three-state training needs a transmit trace");
            fit = train_three_state_two_phase(silent, load_trace(t["transmit_trace_path"].get<std::string>()), spec,
                                              seed, starts, em);
        } else {
            fit = fit_transitions(silent, spec, seed, starts, em);
        }
        Json j = fit_to_json(fit);
        j["source"] = t["trace_path"];
        j["length"] = silent.size();
        runs.push_back(j);
    } else {
        const std::size_t seeds = t["seeds"].get<std::size_t>();
        const std::size_t len = t["length"].get<std::size_t>();
        const std::size_t tx_len = t["transmit_length"].get<std::size_t>();
        std::vector<Json> fits(seeds);
        parallel_for(seeds, cfg["sim"]["threads"].get<std::size_t>(), [&](std::size_t k) {
            RandomStream rng = RandomStream::derive(seed, 2 * k);
            const ObservationSequence silent = generate_observations(model, Regime::Silent, len, rng);
            const std::uint64_t fit_seed = RandomStream::derive(seed, 2 * k + 1)();
            HmmFit fit;
            if (two_phase) {
                RandomStream tx_rng = RandomStream::derive(seed ^ 0x7472616e736d6974ULL, k);
                fit = train_three_state_two_phase(
                    silent, generate_observations(model, Regime::Transmitting, tx_len, tx_rng), spec, fit_seed,
                    starts, em);
            } else {
                fit = fit_transitions(silent, spec, fit_seed, starts, em);
            }
            Json j = fit_to_json(fit);
            j["seed_index"] = k;
            j["length"] = len;
            j["error"] = aligned_error(fit.transitions, truth, spec);
            fits[k] = std::move(j);
        });
        for (auto& j : fits)
            runs.push_back(std::move(j));
    }
    const fs::path path = out_dir(cfg) / "fit.json";
    write_json_file(path, Json{{"provenance", provenance("learn", cfg)}, {"truth", truth}, {"fits", runs}});
    std::cout << "wrote " << path.string() << " (" << runs.size() << " fits)\n";
    return 0;
}

int cmd_optimal_m(const Common& c)
{
    const Json cfg = resolve(c);
    const MPolicyParams p = m_params(cfg);
    const BurstLength m = optimal_m(p);
    Json report{{"w", p.w}, {"M_star", m.to_string()}, {"R", weighted_rate(m, p)}};
    try {
        const RootSolution root = root_equation_m1(p);
        report["root"] = {{"M1", root.m1}, {"M_continuous", root.m_continuous}, {"M_integer", root.m_integer}};
    } catch (const PreconditionError& e) {
        report["root"] = e.what();
    }
    std::cout << report.dump() << '\n';
    const fs::path path = out_dir(cfg) / "optimal_m.csv";
    write_csv_file(path, closed_form_table(p, w_grid_from_config(cfg)), provenance("optimal-m", cfg));
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_rate_region(const Common& c)
{
    const Json cfg = resolve(c);
    const RateRegion region = rate_region(m_params(cfg), cfg["m_list"].get<std::vector<std::uint64_t>>());
    const fs::path path = out_dir(cfg) / "rate_region.csv";
    write_csv_file(path, rate_region_table(region), provenance("rate-region", cfg));
    std::cout << "wrote " << path.string() << " (" << region.frontier.size() << " frontier points)\n";
    return 0;
}

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config_path, "JSON experiment config");
    sub->add_option("--seed", c.seed, "Master seed (overrides config)");
    sub->add_option("--out", c.out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--set", c.sets, "Override a config field, e.g. --set solver.alpha=0.99")
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Secondary-user transmit/listen policies for ARQ-observed primary channels"};
    app.set_version_flag("--version", std::string(version_string()));
    app.require_subcommand(1);

    Common common;
    std::string policy_file, figure;
    bool empirical = false;
    auto* solve = app.add_subcommand("solve", "Solve the belief MDP and write the value grid");
    auto* sim = app.add_subcommand("simulate", "Simulate one policy and write its throughput");
    auto* fig = app.add_subcommand("figure", "Write the data series of one figure (" + figure_names() + ")");
    auto* learn = app.add_subcommand("learn", "Estimate transition probabilities from ACK/NACK traces");
    auto* optm = app.add_subcommand("optimal-m", "Optimal burst length for the erasure channel");
    auto* region = app.add_subcommand("rate-region", "Achievable (R_p, R_s) pairs of burst-length policies");
    for (auto* s : {solve, sim, fig, learn, optm, region})
        add_common(s, common);
    sim->add_option("--policy", policy_file, "Value grid written by 'solve'");
    fig->add_option("name", figure, "Figure name")->required();
    fig->add_flag("--empirical", empirical, "fig6: also simulate the DP policy across w_grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*solve)
            return cmd_solve(common);
        if (*sim)
            return cmd_simulate(common, policy_file);
        if (*fig)
            return cmd_figure(common, figure, empirical);
        if (*learn)
            return cmd_learn(common);
        if (*optm)
            return cmd_optimal_m(common);
        if (*region)
            return cmd_rate_region(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return kNumericalError;
    } catch (const DegenerateObservationError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
