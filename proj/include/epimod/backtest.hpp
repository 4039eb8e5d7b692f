#pragma once

#include "epimod/config.hpp"
#include "epimod/csv_io.hpp"
#include "epimod/forecasters.hpp"
#include "epimod/modulation.hpp"
#include "epimod/scoring.hpp"
#include "epimod/series.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epimod {

/// Rolling-origin experiment description. Truth comes either from a CSV file
/// or from a named simulation scenario (with optional seeded observation
/// noise). Origins run from max(min_train, kind minimum) to the last truth
/// index in steps of origin_stride.
struct BacktestPlan {
    std::string truth_path; // exactly one of truth_path / scenario
    std::string scenario;
    std::size_t scenario_periods = 0; // 0 = scenario default
    double noise_sigma = 0.0;

    std::vector<ForecasterSpec> specs;
    std::vector<bool> modulate_spec; // parallel to specs

    std::size_t k = 28;
    std::size_t origin_stride = 7;
    std::size_t min_train = 42;
    ModulationMode mode;
    WisConvention wis_convention = WisConvention::standard_half_alpha;
    unsigned long long seed = 42;
    std::string out_dir; // empty = keep results in memory only

    static BacktestPlan from_config(const Config& config);
};

struct BacktestResult {
    /// Score records per arm, keyed "<model>_base" / "<model>_epimod".
    std::map<std::string, std::vector<ScoreRecord>> scores;
    /// Emitted forecasts per arm, same keys.
    std::map<std::string, std::vector<ForecastSet>> forecasts;
    /// Theta trace per model name.
    std::map<std::string, std::vector<io::ThetaTraceRow>> theta_traces;
    std::vector<std::string> files_written;
    std::size_t cells_failed = 0;
    std::size_t unscored_horizons = 0; // forecast horizons beyond truth end
    std::vector<std::string> log;
    Cadence cadence = Cadence::daily;
};

/// Runs the full grid of (location, origin, spec) cells: fit on truth up to
/// the origin, forecast k ahead, and (when enabled) estimate theta from the
/// history up to that origin and emit the modulated arm alongside the base.
/// A failing cell is logged and skipped, never aborts the run. Deterministic
/// for a fixed plan and seed, including byte-identical artifacts.
BacktestResult run_backtest(const BacktestPlan& plan);

struct ModulateFileOptions {
    std::optional<double> fixed_theta; // effective rate; skips estimation
    ModulationMode mode;
};

struct ModulateFileResult {
    io::HubFile modulated;
    std::vector<io::ThetaTraceRow> trace;
};

/// Epimodulates every forecast in a hub-format file. Per (location,
/// forecast_date), theta is estimated from the file's own forecasts issued at
/// or before that date whose horizons have fully realized truth, or taken
/// from options.fixed_theta. Output schema matches the input.
ModulateFileResult modulate_file(const std::string& forecasts_path, const std::string& truth_path,
                                 const ModulateFileOptions& options);

/// Scores one forecast set against truth: absolute error per horizon with
/// realized truth, plus WIS and per-interval scores when quantiles exist.
std::vector<ScoreRecord> score_forecast(const EpidemicSeries& truth, const ForecastSet& fs,
                                        WisConvention convention);

} // namespace epimod
