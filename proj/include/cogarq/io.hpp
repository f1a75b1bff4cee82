#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cogarq/closedform.hpp"
#include "cogarq/dp.hpp"
#include "cogarq/hmm.hpp"
#include "cogarq/sim.hpp"

namespace cogarq {

using Json = nlohmann::json;

/// Library version, with the git description of the source tree when it was available at build time.
std::string_view version_string();

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// A CSV document: two comment lines (`# schema: ...`, `# config: ...`), a header row, rows.
struct CsvTable {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

void write_csv(std::ostream& out, const CsvTable& table, const Json& config);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table, const Json& config);

namespace schema {
inline constexpr const char* kSimSweep = "cogarq.sim_sweep/1";
inline constexpr const char* kClosedForm = "cogarq.closed_form/1";
inline constexpr const char* kRateRegion = "cogarq.rate_region/1";
inline constexpr const char* kEmpiricalRegion = "cogarq.empirical_region/1";
inline constexpr const char* kEstimation = "cogarq.estimation/1";
inline constexpr const char* kDegradation = "cogarq.degradation/1";
inline constexpr const char* kValueGrid = "cogarq.value_grid";
inline constexpr int kValueGridVersion = 1;
} // namespace schema

std::vector<std::string> sim_sweep_columns();
std::vector<std::string> closed_form_columns();
std::vector<std::string> rate_region_columns();
std::vector<std::string> empirical_region_columns();
std::vector<std::string> estimation_columns();
std::vector<std::string> degradation_columns();

/// Rows with columns w, policy, R_p, R_s, R, stderr_R, horizon, replications, seed.
CsvTable sim_sweep_table(const std::vector<SweepRow>& rows, std::size_t horizon, std::size_t replications,
                         std::uint64_t seed);

/// Rows with columns w, M_star, R_p, R_s, R; "inf" marks the always-transmit regime.
CsvTable closed_form_table(const MPolicyParams& base, const std::vector<double>& w_grid);

CsvTable rate_region_table(const RateRegion& region);
CsvTable empirical_region_table(const std::vector<RegionPoint>& points);
/// One row per training length; `model` names the channel family.
CsvTable estimation_table(const std::string& model, const std::vector<EstimationSummary>& rows);
CsvTable degradation_table(const std::vector<DegradationSummary>& rows);

Json value_grid_to_json(const ValueGrid& grid, const Json& config);
ValueGrid value_grid_from_json(const Json& doc);

Json fit_to_json(const HmmFit& fit);
Json threshold_to_json(const ThresholdReport& report);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

} // namespace cogarq
