#pragma once

#include "epimod/modulation.hpp"
#include "epimod/scoring.hpp"
#include "epimod/series.hpp"

#include <map>
#include <string>
#include <vector>

namespace epimod::io {

/// Non-fatal observations made while ingesting (gap fills, quantile sorting).
struct IngestReport {
    std::size_t interpolated_points = 0;
    std::size_t quantile_repairs = 0;
    std::vector<std::string> warnings;
};

/// Reads `date,location,value` rows into one gapless series per location.
/// Interior gaps are filled by linear interpolation (logged in the report);
/// cadence is inferred per location (all gaps divisible by 7 days => weekly).
/// Throws Error(ParseError) on malformed rows or duplicate (date, location)
/// and Error(NonMonotoneDates) when a location's dates go backward.
std::map<std::string, EpidemicSeries> ingest_truth_csv(const std::string& path,
                                                       IngestReport* report = nullptr);

void write_truth_csv(const std::string& path,
                     const std::map<std::string, EpidemicSeries>& by_location);

/// Hub-format forecast file contents: grouped sets plus the target metadata
/// needed to write rows back in the same dialect.
struct HubFile {
    std::vector<ForecastSet> forecasts; // sorted by (location, origin_date)
    Cadence cadence = Cadence::daily;
    std::string target_suffix = "inc hosp"; // text after "<n> <unit> ahead "
};

/// Reads `forecast_date,target,target_end_date,location,type,quantile,value`.
/// Horizons come from the target string ("<n> day ahead ..."/"<n> wk ahead ...").
/// When expected_suffix is empty the first row fixes the target suffix; any
/// deviation raises Error(UnparseableTarget). Quantile crossings are repaired
/// by per-horizon sorting and counted in the report. Missing point rows are
/// synthesized from the median. Horizon gaps raise Error(InconsistentHorizons).
HubFile ingest_hub_forecasts(const std::string& path, const std::string& expected_suffix = "",
                             IngestReport* report = nullptr);

/// Writes hub-format rows with fixed 6-decimal values, sorted by
/// (location, forecast_date, horizon) with the point row before quantile rows.
void write_hub_csv(const std::string& path, const HubFile& file);

void write_score_csv(const std::string& path, const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> read_score_csv(const std::string& path);

struct ThetaTraceRow {
    Date forecast_date;
    std::string location;
    ThetaEstimate estimate;
};

/// Columns: forecast_date,location,theta,theta_scaled,objective_zero,
/// objective_opt,origins_used. theta is the effective rate (1/count units);
/// theta_scaled is the normalized searched value.
void write_theta_trace_csv(const std::string& path, const std::vector<ThetaTraceRow>& rows);

/// Columns: window,model,base_mae,model_mae,abs_reduction,pct_improvement,n_records.
void write_aggregate_csv(const std::string& path, const std::string& model_name,
                         const std::vector<AggregateRow>& rows);

/// Fixed 6-decimal rendering used for every emitted forecast/score value.
std::string format_value(double v);

} // namespace epimod::io
