#include "cogarq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "cogarq/errors.hpp"

namespace cogarq {

std::string_view version_string() { return COGARQ_VERSION; }

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> row)
{
    if (row.size() != columns.size())
        throw PreconditionError("CSV row has " + std::to_string(row.size()) + " fields, expected " +
                                std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const CsvTable& table, const Json& config)
{
    out << "# schema: " << table.schema << '\n';
    out << "# config: " << config.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table, const Json& config)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    write_csv(out, table, config);
}

std::vector<std::string> sim_sweep_columns()
{
    return {"w", "policy", "R_p", "R_s", "R", "stderr_R", "horizon", "replications", "seed"};
}

std::vector<std::string> closed_form_columns() { return {"w", "M_star", "R_p", "R_s", "R"}; }

std::vector<std::string> rate_region_columns() { return {"M", "R_p", "R_s", "on_frontier"}; }

std::vector<std::string> empirical_region_columns()
{
    return {"w", "R_p", "R_s", "stderr_p", "stderr_s", "dominated"};
}

std::vector<std::string> estimation_columns()
{
    return {"model", "L", "seeds", "median_error", "mean_error", "q25_error", "q75_error"};
}

std::vector<std::string> degradation_columns()
{
    return {"L", "w", "seeds", "mean_degradation", "stderr_degradation", "mean_R_true", "mean_R_estimated"};
}

CsvTable sim_sweep_table(const std::vector<SweepRow>& rows, std::size_t horizon, std::size_t replications,
                         std::uint64_t seed)
{
    CsvTable t{schema::kSimSweep, sim_sweep_columns(), {}};
    for (const auto& r : rows)
        t.add_row({format_number(r.w), std::string(to_string(r.policy)), format_number(r.stats.rate_p),
                   format_number(r.stats.rate_s), format_number(r.stats.rate), format_number(r.stats.stderr_r),
                   std::to_string(horizon), std::to_string(replications), std::to_string(seed)});
    return t;
}

CsvTable closed_form_table(const MPolicyParams& base, const std::vector<double>& w_grid)
{
    CsvTable t{schema::kClosedForm, closed_form_columns(), {}};
    for (double w : w_grid) {
        MPolicyParams p = base;
        p.w = w;
        const BurstLength m = optimal_m(p);
        double rp = 0.0, rs = p.r_s, r = (1.0 - w) * p.r_s;
        if (!m.is_infinite()) {
            const MPolicyEval e = evaluate_m_policy(m.value(), p);
            rp = e.rate_p;
            rs = e.rate_s;
            r = e.rate;
        }
        t.add_row({format_number(w), m.to_string(), format_number(rp), format_number(rs), format_number(r)});
    }
    return t;
}

CsvTable rate_region_table(const RateRegion& region)
{
    CsvTable t{schema::kRateRegion, rate_region_columns(), {}};
    std::vector<bool> on(region.points.size(), false);
    for (std::size_t i : region.frontier)
        on[i] = true;
    for (std::size_t i = 0; i < region.points.size(); ++i) {
        const auto& p = region.points[i];
        t.add_row({std::to_string(p.m), format_number(p.rate_p), format_number(p.rate_s), on[i] ? "1" : "0"});
    }
    return t;
}

CsvTable empirical_region_table(const std::vector<RegionPoint>& points)
{
    CsvTable t{schema::kEmpiricalRegion, empirical_region_columns(), {}};
    for (const auto& p : points)
        t.add_row({format_number(p.w), format_number(p.rate_p), format_number(p.rate_s), format_number(p.stderr_p),
                   format_number(p.stderr_s), p.dominated ? "1" : "0"});
    return t;
}

CsvTable estimation_table(const std::string& model, const std::vector<EstimationSummary>& rows)
{
    CsvTable t{schema::kEstimation, estimation_columns(), {}};
    for (const auto& r : rows)
        t.add_row({model, std::to_string(r.length), std::to_string(r.errors.size()), format_number(r.median),
                   format_number(r.mean), format_number(r.q25), format_number(r.q75)});
    return t;
}

CsvTable degradation_table(const std::vector<DegradationSummary>& rows)
{
    CsvTable t{schema::kDegradation, degradation_columns(), {}};
    for (const auto& r : rows)
        t.add_row({std::to_string(r.length), format_number(r.w), std::to_string(r.seeds),
                   format_number(r.mean_degradation), format_number(r.stderr_degradation),
                   format_number(r.mean_rate_true), format_number(r.mean_rate_estimated)});
    return t;
}

Json value_grid_to_json(const ValueGrid& grid, const Json& config)
{
    Json actions = Json::array();
    for (auto a : grid.actions)
        actions.push_back(static_cast<int>(a));
    return Json{{"format", schema::kValueGrid},
                {"version", schema::kValueGridVersion},
                {"problem", to_string(grid.problem)},
                {"domain", to_string(grid.grid.domain())},
                {"resolution", grid.grid.resolution()},
                {"alpha", grid.alpha},
                {"diagnostics",
                 {{"iterations", grid.diagnostics.iterations},
                  {"bound_width", grid.diagnostics.bound_width},
                  {"bellman_residual", grid.diagnostics.bellman_residual}}},
                {"values", grid.values},
                {"actions", actions},
                {"config", config}};
}

namespace {

ProblemKind parse_problem(const std::string& s)
{
    for (ProblemKind k : {ProblemKind::TwoState, ProblemKind::GilbertElliot, ProblemKind::ThreeState,
                          ProblemKind::TwoChannel})
        if (to_string(k) == s)
            return k;
    throw PreconditionError("unknown problem kind '" + s + "' in value grid");
}

Domain parse_domain(const std::string& s)
{
    for (Domain d : {Domain::Interval, Domain::Simplex, Domain::Square})
        if (to_string(d) == s)
            return d;
    throw PreconditionError("unknown domain '" + s + "' in value grid");
}

} // namespace

ValueGrid value_grid_from_json(const Json& doc)
{
    try {
        if (doc.at("format").get<std::string>() != schema::kValueGrid)
            throw PreconditionError("not a value grid document");
        if (doc.at("version").get<int>() != schema::kValueGridVersion)
            throw PreconditionError("unsupported value grid version " + doc.at("version").dump());
        ValueGrid g;
        g.problem = parse_problem(doc.at("problem").get<std::string>());
        g.grid = BeliefGrid(parse_domain(doc.at("domain").get<std::string>()), doc.at("resolution").get<std::size_t>());
        g.alpha = doc.value("alpha", 0.999);
        g.values = doc.at("values").get<std::vector<double>>();
        for (int a : doc.at("actions").get<std::vector<int>>())
            g.actions.push_back(static_cast<std::uint8_t>(a));
        if (g.values.size() != g.grid.size() || g.actions.size() != g.grid.size())
            throw PreconditionError("value grid arrays do not match the grid size");
        if (doc.contains("diagnostics")) {
            const auto& d = doc["diagnostics"];
            g.diagnostics.iterations = d.value("iterations", std::size_t{0});
            g.diagnostics.bound_width = d.value("bound_width", 0.0);
            g.diagnostics.bellman_residual = d.value("bellman_residual", 0.0);
            g.diagnostics.converged = true;
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("malformed value grid: ") + e.what());
    }
}

Json fit_to_json(const HmmFit& fit)
{
    return Json{{"transitions", fit.transitions},
                {"log_likelihood", fit.log_likelihood},
                {"iterations", fit.iterations},
                {"converged", fit.converged}};
}

Json threshold_to_json(const ThresholdReport& r)
{
    Json j{{"lower_bound", r.lower_bound},
           {"upper_bound", r.upper_bound},
           {"finite_m_lower", r.finite_m_lower},
           {"finite_m_upper", r.finite_m_upper}};
    if (r.p_th)
        j["p_th"] = *r.p_th;
    else
        j["p_th"] = nullptr;
    if (r.uniform_action)
        j["uniform_action"] = to_string(*r.uniform_action);
    return j;
}

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read " + path.string());
    return Json::parse(in);
}

void write_json_file(const std::filesystem::path& path, const Json& doc)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
}

} // namespace cogarq
