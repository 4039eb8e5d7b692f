#include "epimod/backtest.hpp"

#include "epimod/errors.hpp"
#include "epimod/sir.hpp"
#include "epimod/threading.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <set>

namespace epimod {

std::size_t worker_count() {
    if (const char* env = std::getenv("EPIMOD_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

BacktestPlan BacktestPlan::from_config(const Config& config) {
    BacktestPlan plan;
    plan.truth_path = config.get("truth", "");
    plan.scenario = config.get("scenario", "");
    if (plan.truth_path.empty() == plan.scenario.empty()) {
        throw_error(Errc::ParseError, "config needs exactly one of 'truth' or 'scenario'");
    }
    plan.scenario_periods = static_cast<std::size_t>(config.get_int("periods", 0));
    plan.noise_sigma = config.get_double("noise_sigma", 0.0);

    const auto models = config.get_list("models");
    if (models.empty()) throw_error(Errc::ParseError, "config key 'models' must list forecasters");
    const bool modulate_default = config.get_bool("modulate", true);
    std::vector<double> levels;
    for (const std::string& text : config.get_list("quantiles")) {
        if (text == "hub23") {
            levels = hub_quantile_levels();
            break;
        }
        levels.push_back(std::stod(text));
    }
    for (const std::string& name : models) {
        ForecasterSpec spec = ForecasterSpec::of(kind_by_name(name));
        spec.quantile_levels = levels;
        plan.specs.push_back(spec);
        plan.modulate_spec.push_back(config.get_bool("modulate." + name, modulate_default));
    }

    plan.k = static_cast<std::size_t>(config.get_int("horizons", 28));
    plan.origin_stride = static_cast<std::size_t>(config.get_int("origin_stride", 7));
    plan.min_train = static_cast<std::size_t>(config.get_int("min_train", 42));
    plan.seed = static_cast<unsigned long long>(config.get_int("seed", 42));
    plan.out_dir = config.get("out", "");

    const std::string mode = config.get("mode", "cumulative");
    if (mode == "cumulative") plan.mode.window = ModulationMode::Window::cumulative_window;
    else if (mode == "total") plan.mode.window = ModulationMode::Window::total_window;
    else throw_error(Errc::ParseError, "config key 'mode' must be cumulative or total");
    plan.mode.include_history = config.get_bool("include_history", false);

    const std::string wis = config.get("wis", "standard");
    if (wis == "standard") plan.wis_convention = WisConvention::standard_half_alpha;
    else if (wis == "paper") plan.wis_convention = WisConvention::paper_literal;
    else throw_error(Errc::ParseError, "config key 'wis' must be standard or paper");

    if (plan.k < 1) throw_error(Errc::ParseError, "config key 'horizons' must be >= 1");
    if (plan.origin_stride < 1) {
        throw_error(Errc::ParseError, "config key 'origin_stride' must be >= 1");
    }
    return plan;
}

std::vector<ScoreRecord> score_forecast(const EpidemicSeries& truth, const ForecastSet& fs,
                                        WisConvention convention) {
    const auto pairs = align(truth, fs);
    std::vector<ScoreRecord> records;
    records.reserve(pairs.size());

    std::optional<WisConfig> cfg;
    if (fs.has_quantiles()) {
        std::vector<double> levels;
        for (const auto& track : fs.quantiles) levels.push_back(track.level);
        cfg = WisConfig::from_levels(levels, convention);
    }

    for (std::size_t h = 0; h < pairs.size(); ++h) {
        ScoreRecord rec = make_score_record(fs.origin_date, fs.location, static_cast<int>(h + 1),
                                            pairs[h].first, pairs[h].second);
        if (cfg) {
            rec.wis = wis(pairs[h].first, fs, h + 1, *cfg);
            for (int i = 0; i < cfg->K; ++i) {
                const double alpha = 2.0 * fs.quantiles[i].level;
                IntervalSpec spec{alpha, fs.quantiles[i].values[h],
                                  fs.quantiles[fs.quantiles.size() - 1 - i].values[h]};
                rec.interval_scores.emplace_back(alpha, interval_score(pairs[h].first, spec));
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

EpidemicSeries truncated(const EpidemicSeries& series, std::size_t n) {
    EpidemicSeries prefix = series;
    prefix.values.assign(series.values.begin(), series.values.begin() + n);
    return prefix;
}

double burden_before(const EpidemicSeries& series, std::size_t origin) {
    return std::accumulate(series.values.begin(), series.values.begin() + origin, 0.0);
}

std::map<std::string, EpidemicSeries> load_truth(const BacktestPlan& plan,
                                                 std::vector<std::string>* log) {
    std::map<std::string, EpidemicSeries> truth;
    if (!plan.scenario.empty()) {
        sir::Scenario sc = sir::scenario_by_name(plan.scenario);
        if (plan.scenario_periods > 0) sc.n_periods = plan.scenario_periods;
        EpidemicSeries series =
            sir::simulate_incidence(sc.params, sc.schedule, sc.n_periods, plan.scenario);
        if (plan.noise_sigma > 0.0) {
            series = sir::add_observation_noise(series, plan.noise_sigma, plan.seed);
        }
        truth.emplace(series.location, std::move(series));
    } else {
        io::IngestReport report;
        truth = io::ingest_truth_csv(plan.truth_path, &report);
        if (log) {
            for (const auto& warning : report.warnings) log->push_back(warning);
        }
    }
    return truth;
}

std::vector<std::string> arm_names(const std::vector<ForecasterSpec>& specs) {
    std::vector<std::string> names;
    std::map<std::string, int> used;
    for (const auto& spec : specs) {
        std::string name = kind_name(spec.kind);
        const int count = ++used[name];
        if (count > 1) name += "_" + std::to_string(count);
        names.push_back(name);
    }
    return names;
}

} // namespace

BacktestResult run_backtest(const BacktestPlan& plan) {
    if (plan.specs.empty()) throw_error(Errc::InvalidArgument, "plan has no forecaster specs");
    if (plan.specs.size() != plan.modulate_spec.size()) {
        throw_error(Errc::InvalidArgument, "modulate flags do not match specs");
    }
    if (plan.k < 1 || plan.origin_stride < 1) {
        throw_error(Errc::InvalidArgument, "plan needs k >= 1 and origin_stride >= 1");
    }

    BacktestResult result;
    const auto truth = load_truth(plan, &result.log);
    if (truth.empty()) throw_error(Errc::EmptySeries, "no truth series loaded");
    result.cadence = truth.begin()->second.cadence;

    const std::vector<std::string> names = arm_names(plan.specs);
    const std::size_t threads = worker_count();

    for (const auto& [location, series] : truth) {
        const std::size_t total = series.size();
        for (std::size_t si = 0; si < plan.specs.size(); ++si) {
            const ForecasterSpec& spec = plan.specs[si];
            const bool with_theta = plan.modulate_spec[si];
            const std::size_t kind_min = min_history(spec.kind);
            const std::size_t first_origin = std::max(plan.min_train, kind_min);

            std::vector<std::size_t> origins;
            for (std::size_t t = first_origin; t + 1 <= total; t += plan.origin_stride) {
                origins.push_back(t);
            }
            if (origins.empty()) {
                result.log.push_back("skipping " + names[si] + " @ " + location +
                                     ": series too short for any origin");
                continue;
            }

            // Pre-fit every needed history prefix in parallel: the scheduled
            // origins plus all retrospective sub-origins theta estimation visits.
            std::set<std::size_t> needed(origins.begin(), origins.end());
            if (with_theta) {
                const std::size_t last_origin = origins.back();
                for (std::size_t t = kind_min; t + plan.k <= last_origin; ++t) needed.insert(t);
            }
            const std::vector<std::size_t> to_fit(needed.begin(), needed.end());
            std::vector<std::optional<FittedModel>> fits(to_fit.size());
            std::vector<std::string> fit_errors(to_fit.size());
            parallel_for(
                to_fit.size(),
                [&](std::size_t i) {
                    try {
                        fits[i] = fit(spec, truncated(series, to_fit[i]));
                    } catch (const std::exception& e) {
                        fit_errors[i] = e.what();
                    }
                },
                threads);

            ForecastCache cache;
            for (std::size_t i = 0; i < to_fit.size(); ++i) {
                if (fits[i]) cache.put(to_fit[i], std::move(*fits[i]));
            }

            const std::string base_arm = names[si] + "_base";
            const std::string mod_arm = names[si] + "_epimod";
            for (const std::size_t origin : origins) {
                try {
                    const FittedModel* model = cache.find(origin);
                    if (!model) {
                        throw Error(Errc::InsufficientHistory,
                                    "fit failed at origin " + std::to_string(origin));
                    }
                    ForecastSet base_fs = forecast(*model, plan.k);

                    auto base_scores = score_forecast(series, base_fs, plan.wis_convention);
                    result.unscored_horizons += plan.k - base_scores.size();
                    auto& base_out = result.scores[base_arm];
                    base_out.insert(base_out.end(), base_scores.begin(), base_scores.end());

                    if (with_theta) {
                        ThetaEstimate est;
                        if (origin >= kind_min + plan.k) {
                            EstimateOptions opts;
                            opts.cache = &cache;
                            est = estimate_theta(truncated(series, origin), spec, plan.k,
                                                 plan.mode, opts);
                        }
                        // Too little history leaves theta at zero: the
                        // modulated arm degrades to the base forecast.
                        result.theta_traces[names[si]].push_back(
                            {base_fs.origin_date, location, est});

                        const double burden = plan.mode.include_history
                                                  ? burden_before(series, origin)
                                                  : 0.0;
                        ForecastSet mod_fs;
                        if (base_fs.has_quantiles()) {
                            mod_fs = modulate_quantiles(base_fs, est.theta, plan.mode, burden);
                        } else {
                            mod_fs = base_fs;
                            mod_fs.point = modulate(base_fs.point, est.theta, plan.mode, burden);
                        }
                        auto mod_scores = score_forecast(series, mod_fs, plan.wis_convention);
                        auto& mod_out = result.scores[mod_arm];
                        mod_out.insert(mod_out.end(), mod_scores.begin(), mod_scores.end());
                        result.forecasts[mod_arm].push_back(std::move(mod_fs));
                    }
                    result.forecasts[base_arm].push_back(std::move(base_fs));
                } catch (const std::exception& e) {
                    ++result.cells_failed;
                    result.log.push_back("cell (" + location + ", " + std::to_string(origin) +
                                         ", " + names[si] + ") failed: " + e.what());
                }
            }
        }
    }

    if (!plan.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(plan.out_dir);
        const std::string suffix = "inc hosp";
        for (const auto& [arm, sets] : result.forecasts) {
            const std::string path = plan.out_dir + "/forecasts_" + arm + ".csv";
            io::write_hub_csv(path, io::HubFile{sets, result.cadence, suffix});
            result.files_written.push_back(path);
        }
        for (const auto& [arm, records] : result.scores) {
            const std::string path = plan.out_dir + "/scores_" + arm + ".csv";
            io::write_score_csv(path, records);
            result.files_written.push_back(path);
        }
        for (const auto& [model, rows] : result.theta_traces) {
            const std::string path = plan.out_dir + "/theta_" + model + ".csv";
            io::write_theta_trace_csv(path, rows);
            result.files_written.push_back(path);
        }
    }
    return result;
}

ModulateFileResult modulate_file(const std::string& forecasts_path, const std::string& truth_path,
                                 const ModulateFileOptions& options) {
    io::IngestReport report;
    io::HubFile hub = io::ingest_hub_forecasts(forecasts_path, "", &report);
    const auto truth = io::ingest_truth_csv(truth_path);

    // Locate each set against its location's truth grid.
    std::vector<ForecastSet> located;
    located.reserve(hub.forecasts.size());
    for (const ForecastSet& fs : hub.forecasts) {
        const auto it = truth.find(fs.location);
        if (it == truth.end()) {
            throw_error(Errc::NoRetrospectiveOrigins,
                        "truth file has no series for location '" + fs.location + "'");
        }
        located.push_back(locate_origin(it->second, fs));
    }

    ModulateFileResult result;
    result.modulated.cadence = hub.cadence;
    result.modulated.target_suffix = hub.target_suffix;

    for (const ForecastSet& fs : located) {
        const EpidemicSeries& series = truth.at(fs.location);

        ThetaEstimate est;
        if (options.fixed_theta) {
            EstimateOptions opts;
            opts.fixed_theta = Theta{*options.fixed_theta, 1.0};
            std::vector<ForecastSet> none;
            est = estimate_theta_from_forecasts(series, none, options.mode, opts);
        } else {
            // Retrospective pool: this location's forecasts issued at or
            // before this date whose horizons have fully realized truth.
            std::vector<ForecastSet> pool;
            std::size_t prefix_n = 0;
            for (const ForecastSet& other : located) {
                if (other.location != fs.location || fs.origin_date < other.origin_date) continue;
                if (other.origin_index + other.horizons() <= series.size()) {
                    pool.push_back(other);
                    prefix_n = std::max(prefix_n, other.origin_index + other.horizons());
                }
            }
            if (pool.empty()) {
                throw_error(Errc::NoRetrospectiveOrigins,
                            "no realized retrospective forecast for '" + fs.location + "' at " +
                                fs.origin_date.to_string());
            }
            est = estimate_theta_from_forecasts(truncated(series, prefix_n), pool, options.mode);
        }

        const double burden = options.mode.include_history
                                  ? burden_before(series, std::min(fs.origin_index, series.size()))
                                  : 0.0;
        ForecastSet mod;
        if (fs.has_quantiles()) {
            mod = modulate_quantiles(fs, est.theta, options.mode, burden);
        } else {
            mod = fs;
            mod.point = modulate(fs.point, est.theta, options.mode, burden);
        }
        result.trace.push_back({fs.origin_date, fs.location, est});
        result.modulated.forecasts.push_back(std::move(mod));
    }
    return result;
}

} // namespace epimod
