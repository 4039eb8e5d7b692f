#include "epimod/backtest.hpp"
#include "epimod/errors.hpp"
#include "epimod/sir.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

using namespace epimod;

ModulationMode parse_mode(const std::string& window, bool include_history) {
    ModulationMode mode;
    if (window == "cumulative") mode.window = ModulationMode::Window::cumulative_window;
    else if (window == "total") mode.window = ModulationMode::Window::total_window;
    else throw_error(Errc::InvalidArgument, "--mode must be cumulative or total");
    mode.include_history = include_history;
    return mode;
}

// "label=2022-01-01:2022-03-01" or "2022-01-01:2022-03-01".
AggregationWindow parse_window(const std::string& text) {
    AggregationWindow window;
    std::string range = text;
    const auto eq = text.find('=');
    if (eq != std::string::npos) {
        window.label = text.substr(0, eq);
        range = text.substr(eq + 1);
    } else {
        window.label = text;
    }
    const auto colon = range.find(':');
    if (colon == std::string::npos) {
        throw_error(Errc::InvalidArgument, "window '" + text + "' is not START:END");
    }
    window.start = Date::parse(range.substr(0, colon));
    window.end = Date::parse(range.substr(colon + 1));
    return window;
}

int cmd_simulate(const std::string& scenario, const std::string& out, std::size_t periods,
                 double noise_sigma, unsigned long long seed, const std::string& location,
                 const std::string& start_date) {
    sir::Scenario sc = sir::scenario_by_name(scenario);
    if (periods > 0) sc.n_periods = periods;
    EpidemicSeries series = sir::simulate_incidence(sc.params, sc.schedule, sc.n_periods, location,
                                                    Date::parse(start_date));
    if (noise_sigma > 0.0) series = sir::add_observation_noise(series, noise_sigma, seed);
    io::write_truth_csv(out, {{series.location, series}});
    std::cout << "wrote " << series.size() << " periods of scenario '" << scenario << "' to "
              << out << "\n";
    return 0;
}

int cmd_backtest(const std::string& config_path) {
    const BacktestPlan plan = BacktestPlan::from_config(Config::parse_file(config_path));
    const BacktestResult result = run_backtest(plan);
    for (const auto& line : result.log) std::cerr << "note: " << line << "\n";
    for (const auto& path : result.files_written) std::cout << "wrote " << path << "\n";
    std::cout << "arms: " << result.scores.size() << ", failed cells: " << result.cells_failed
              << ", horizons beyond truth: " << result.unscored_horizons << "\n";
    return 0;
}

int cmd_modulate(const std::string& forecasts, const std::string& truth, const std::string& out,
                 const std::string& mode, bool include_history, double fixed_theta,
                 bool has_fixed_theta, const std::string& trace_path) {
    ModulateFileOptions options;
    options.mode = parse_mode(mode, include_history);
    if (has_fixed_theta) options.fixed_theta = fixed_theta;
    const ModulateFileResult result = modulate_file(forecasts, truth, options);
    io::write_hub_csv(out, result.modulated);
    if (!trace_path.empty()) io::write_theta_trace_csv(trace_path, result.trace);
    std::cout << "modulated " << result.modulated.forecasts.size() << " forecast sets to " << out
              << "\n";
    return 0;
}

int cmd_score(const std::string& base_path, const std::string& model_path,
              const std::vector<std::string>& window_texts, const std::string& out,
              const std::string& model_name) {
    const auto base = io::read_score_csv(base_path);
    const auto model = io::read_score_csv(model_path);

    std::vector<AggregationWindow> windows;
    windows.push_back({"overall", {}, {}, {}, {}});
    for (const auto& text : window_texts) windows.push_back(parse_window(text));

    const AggregateResult result = aggregate(base, model, windows);
    if (result.base_only_keys + result.model_only_keys > 0) {
        std::cerr << "note: unmatched keys: " << result.base_only_keys << " base-only, "
                  << result.model_only_keys << " model-only\n";
    }
    for (const auto& row : result.rows) {
        std::cout << row.window << ": base " << io::format_value(row.base_mean) << ", model "
                  << io::format_value(row.model_mean) << ", improvement "
                  << io::format_value(row.pct_improvement) << "% over " << row.n_records
                  << " records\n";
    }
    if (!out.empty()) io::write_aggregate_csv(out, model_name, result.rows);
    return 0;
}

int cmd_report(const std::string& base_path, const std::string& model_path, const std::string& by,
               const std::string& out) {
    const auto base = io::read_score_csv(base_path);
    const auto model = io::read_score_csv(model_path);

    std::map<std::tuple<std::int64_t, std::string, int>, double> base_by_key;
    for (const auto& rec : base) {
        base_by_key[{rec.origin_date.serial(), rec.location, rec.horizon}] = rec.absolute_error;
    }

    // key label -> (base error sum, model error sum, n)
    std::map<std::string, std::tuple<double, double, std::size_t>> groups;
    for (const auto& rec : model) {
        const auto it = base_by_key.find({rec.origin_date.serial(), rec.location, rec.horizon});
        if (it == base_by_key.end()) continue;
        std::string label;
        if (by == "date") label = rec.origin_date.to_string();
        else if (by == "horizon") label = std::to_string(rec.horizon);
        else if (by == "location") label = rec.location;
        else throw_error(Errc::InvalidArgument, "--by must be date, horizon, or location");
        auto& [base_sum, model_sum, n] = groups[label];
        base_sum += it->second;
        model_sum += rec.absolute_error;
        ++n;
    }
    if (groups.empty()) throw_error(Errc::NoOverlap, "no matching records between the two runs");

    std::ofstream file(out, std::ios::binary);
    if (!file) throw_error(Errc::ParseError, "cannot write '" + out + "'");
    file << by << ",base_mae,model_mae,mae_reduction,n_records\n";
    for (const auto& [label, sums] : groups) {
        const auto& [base_sum, model_sum, n] = sums;
        const double base_mae = base_sum / static_cast<double>(n);
        const double model_mae = model_sum / static_cast<double>(n);
        file << label << ',' << io::format_value(base_mae) << ',' << io::format_value(model_mae)
             << ',' << io::format_value(base_mae - model_mae) << ',' << n << '\n';
    }
    std::cout << "wrote " << groups.size() << " rows to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"epimod: susceptible-depletion post-processing for epidemic forecasts"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "write a simulated truth CSV");
    std::string sim_scenario = "two-wave", sim_out, sim_location = "sim",
                sim_start = "2021-01-01";
    std::size_t sim_periods = 0;
    double sim_noise = 0.0;
    unsigned long long sim_seed = 42;
    simulate->add_option("--scenario", sim_scenario, "one-wave or two-wave");
    simulate->add_option("--out", sim_out, "output truth CSV path")->required();
    simulate->add_option("--periods", sim_periods, "override scenario length");
    simulate->add_option("--noise-sigma", sim_noise, "lognormal observation noise sigma");
    simulate->add_option("--seed", sim_seed, "noise seed");
    simulate->add_option("--location", sim_location, "location code for the series");
    simulate->add_option("--start-date", sim_start, "series start date (YYYY-MM-DD)");

    // backtest
    auto* backtest = app.add_subcommand("backtest", "run a rolling-origin backtest from a config");
    std::string bt_config;
    backtest->add_option("--config", bt_config, "key = value plan file")->required();

    // modulate
    auto* modulate = app.add_subcommand("modulate", "epimodulate a hub-format forecast file");
    std::string mod_forecasts, mod_truth, mod_out, mod_mode = "cumulative", mod_trace;
    double mod_theta = 0.0;
    bool mod_history = false;
    modulate->add_option("--forecasts", mod_forecasts, "hub-format forecast CSV")->required();
    modulate->add_option("--truth", mod_truth, "truth CSV")->required();
    modulate->add_option("--out", mod_out, "output forecast CSV")->required();
    auto* theta_opt = modulate->add_option("--fixed-theta", mod_theta,
                                           "fixed effective theta (skips estimation)");
    modulate->add_option("--mode", mod_mode, "cumulative or total exponent window");
    modulate->add_flag("--include-history", mod_history, "add observed pre-origin burden");
    modulate->add_option("--theta-trace", mod_trace, "optional theta trace CSV path");

    // score
    auto* score = app.add_subcommand("score", "aggregate a model run against a base run");
    std::string sc_base, sc_model, sc_out, sc_name = "model";
    std::vector<std::string> sc_windows;
    score->add_option("--base", sc_base, "base run score CSV")->required();
    score->add_option("--model", sc_model, "model run score CSV")->required();
    score->add_option("--window", sc_windows, "window [label=]START:END (repeatable)");
    score->add_option("--out", sc_out, "output aggregate CSV");
    score->add_option("--name", sc_name, "model name written to the table");

    // report
    auto* report = app.add_subcommand("report", "plot-ready per-date/horizon/location reductions");
    std::string rp_base, rp_model, rp_by = "date", rp_out;
    report->add_option("--base", rp_base, "base run score CSV")->required();
    report->add_option("--model", rp_model, "model run score CSV")->required();
    report->add_option("--by", rp_by, "date, horizon, or location");
    report->add_option("--out", rp_out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(sim_scenario, sim_out, sim_periods, sim_noise, sim_seed,
                                sim_location, sim_start);
        }
        if (backtest->parsed()) return cmd_backtest(bt_config);
        if (modulate->parsed()) {
            return cmd_modulate(mod_forecasts, mod_truth, mod_out, mod_mode, mod_history,
                                mod_theta, theta_opt->count() > 0, mod_trace);
        }
        if (score->parsed()) return cmd_score(sc_base, sc_model, sc_windows, sc_out, sc_name);
        if (report->parsed()) return cmd_report(rp_base, rp_model, rp_by, rp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
