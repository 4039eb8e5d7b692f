#include "epimod/modulation.hpp"

#include "epimod/errors.hpp"
#include "epimod/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epimod {

std::vector<double> modulate(const std::vector<double>& point, const Theta& theta,
                             const ModulationMode& mode, double history_burden) {
    if (!(theta.value >= 0.0) || !std::isfinite(theta.value) || !(theta.scale > 0.0)) {
        throw_error(Errc::InvalidArgument, "theta must be finite, >= 0, with positive scale");
    }
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (!std::isfinite(point[i]) || point[i] < 0.0) {
            throw_error(Errc::NegativeForecastInput, "horizon " + std::to_string(i + 1));
        }
    }
    const double rate = theta.effective();
    const double base_burden = mode.include_history ? history_burden : 0.0;

    std::vector<double> out(point.size());
    if (mode.window == ModulationMode::Window::total_window) {
        double total = base_burden;
        for (double v : point) total += v;
        const double factor = std::exp(-rate * total);
        for (std::size_t i = 0; i < point.size(); ++i) out[i] = point[i] * factor;
    } else {
        double running = base_burden;
        for (std::size_t i = 0; i < point.size(); ++i) {
            running += point[i];
            out[i] = point[i] * std::exp(-rate * running);
        }
    }
    return out;
}

ForecastSet modulate_quantiles(const ForecastSet& fs, const Theta& theta,
                               const ModulationMode& mode, double history_burden) {
    if (!fs.has_quantiles()) {
        throw_error(Errc::NoQuantiles, "forecast set for '" + fs.location + "' has no quantiles");
    }
    ForecastSet out = fs;
    out.point = modulate(fs.point, theta, mode, history_burden);
    for (auto& track : out.quantiles) {
        track.values = modulate(track.values, theta, mode, history_burden);
    }
    // Per-quantile exponents can cross trajectories; re-sort values across
    // levels at each horizon (monotone rearrangement).
    std::vector<double> column(out.quantiles.size());
    for (std::size_t h = 0; h < out.horizons(); ++h) {
        for (std::size_t q = 0; q < out.quantiles.size(); ++q) {
            column[q] = out.quantiles[q].values[h];
        }
        std::sort(column.begin(), column.end());
        for (std::size_t q = 0; q < out.quantiles.size(); ++q) {
            out.quantiles[q].values[h] = column[q];
        }
    }
    return out;
}

namespace {

double history_burden_before(const EpidemicSeries& truth, std::size_t origin) {
    double sum = 0.0;
    for (std::size_t i = 0; i < origin && i < truth.size(); ++i) sum += truth.values[i];
    return sum;
}

} // namespace

double prediction_error(const EpidemicSeries& truth, const std::vector<ForecastSet>& forecasts,
                        const Theta& theta, const ModulationMode& mode) {
    double total = 0.0;
    for (const ForecastSet& fs : forecasts) {
        if (fs.origin_index + fs.horizons() > truth.size()) {
            throw_error(Errc::OriginBeyondTruth,
                        "origin " + std::to_string(fs.origin_index) + " + " +
                            std::to_string(fs.horizons()) + " horizons exceeds truth length " +
                            std::to_string(truth.size()));
        }
        const double burden =
            mode.include_history ? history_burden_before(truth, fs.origin_index) : 0.0;
        const std::vector<double> adjusted = modulate(fs.point, theta, mode, burden);
        for (std::size_t h = 0; h < adjusted.size(); ++h) {
            const double err = adjusted[h] - truth.values[fs.origin_index + h];
            total += err * err;
        }
    }
    return total;
}

const FittedModel* ForecastCache::find(std::size_t origin) const {
    const auto it = by_origin_.find(origin);
    return it == by_origin_.end() ? nullptr : &it->second;
}

const FittedModel& ForecastCache::put(std::size_t origin, FittedModel model) {
    return by_origin_.insert_or_assign(origin, std::move(model)).first->second;
}

namespace {

// Golden-section pass over [0, hi], then three refinements: split the current
// bracket in thirds, search each, and keep the third holding the best point.
double minimize_rate(const std::function<double(double)>& objective, double hi) {
    double lo = 0.0;
    GoldenSectionResult best = golden_section(objective, lo, hi);
    for (int restart = 0; restart < 3; ++restart) {
        const double width = (hi - lo) / 3.0;
        if (width <= 0.0) break;
        GoldenSectionResult round_best = best;
        double round_lo = lo, round_hi = hi;
        for (int piece = 0; piece < 3; ++piece) {
            const double a = lo + piece * width;
            const double b = piece == 2 ? hi : a + width;
            const GoldenSectionResult r = golden_section(objective, a, b);
            if (r.value < round_best.value) {
                round_best = r;
                round_lo = a;
                round_hi = b;
            }
        }
        if (round_best.value < best.value) best = round_best;
        // Narrow to the third containing the incumbent.
        if (best.x >= round_lo && best.x <= round_hi && round_hi - round_lo < hi - lo) {
            lo = round_lo;
            hi = round_hi;
        } else {
            const double w = (hi - lo) / 3.0;
            lo = std::max(lo, best.x - 0.5 * w);
            hi = std::min(hi, best.x + 0.5 * w);
        }
    }
    return best.x;
}

ThetaEstimate optimize_theta(const EpidemicSeries& truth, const std::vector<ForecastSet>& forecasts,
                             const ModulationMode& mode, const EstimateOptions& options) {
    ThetaEstimate est;
    est.origins_used = forecasts.size();

    double max_truth = 0.0;
    for (double v : truth.values) max_truth = std::max(max_truth, v);
    const double scale = max_truth > 0.0 ? max_truth : 1.0;

    const Theta zero{0.0, scale};
    est.objective_at_zero = prediction_error(truth, forecasts, zero, mode);

    if (options.fixed_theta) {
        est.theta = *options.fixed_theta;
        est.objective_at_optimum = prediction_error(truth, forecasts, est.theta, mode);
        return est;
    }

    const double hi = max_truth > 0.0 ? 10.0 / max_truth : 0.0;
    est.bracket = {0.0, hi};
    if (hi <= 0.0) {
        est.theta = zero;
        est.objective_at_optimum = est.objective_at_zero;
        return est;
    }

    auto objective = [&](double rate) {
        return prediction_error(truth, forecasts, Theta{rate * scale, scale}, mode);
    };
    const double rate_hat = minimize_rate(objective, hi);
    const double obj_hat = objective(rate_hat);

    // Conservative tie rule: keep the identity unless the optimum is a real
    // improvement.
    if (!(est.objective_at_zero - obj_hat > 1e-10 * est.objective_at_zero)) {
        est.theta = zero;
        est.objective_at_optimum = est.objective_at_zero;
    } else {
        est.theta = Theta{rate_hat * scale, scale};
        est.objective_at_optimum = obj_hat;
    }
    return est;
}

} // namespace

ThetaEstimate estimate_theta(const EpidemicSeries& truth, const ForecasterSpec& spec,
                             std::size_t k, const ModulationMode& mode,
                             const EstimateOptions& options) {
    validate_series(truth);
    if (k < 1) throw_error(Errc::InvalidArgument, "k must be >= 1");

    const std::size_t first_origin = min_history(spec.kind);
    if (truth.size() < first_origin + k) {
        throw_error(Errc::InsufficientHistory,
                    "need at least " + std::to_string(first_origin + k) +
                        " points for one retrospective origin, got " +
                        std::to_string(truth.size()));
    }

    ForecastCache local_cache;
    ForecastCache& cache = options.cache ? *options.cache : local_cache;

    std::vector<ForecastSet> forecasts;
    forecasts.reserve(truth.size() - k - first_origin + 1);
    for (std::size_t origin = first_origin; origin + k <= truth.size(); ++origin) {
        const FittedModel* model = cache.find(origin);
        if (!model) {
            EpidemicSeries prefix = truth;
            prefix.values.assign(truth.values.begin(), truth.values.begin() + origin);
            model = &cache.put(origin, fit(spec, prefix));
        }
        forecasts.push_back(forecast(*model, k));
    }
    return optimize_theta(truth, forecasts, mode, options);
}

ThetaEstimate estimate_theta_from_forecasts(const EpidemicSeries& truth,
                                            const std::vector<ForecastSet>& forecasts,
                                            const ModulationMode& mode,
                                            const EstimateOptions& options) {
    validate_series(truth);
    std::vector<ForecastSet> usable;
    for (const ForecastSet& fs : forecasts) {
        if (fs.horizons() >= 1 && fs.origin_index + fs.horizons() <= truth.size()) {
            usable.push_back(fs);
        }
    }
    if (usable.empty() && !options.fixed_theta) {
        throw_error(Errc::NoRetrospectiveOrigins,
                    "no forecast has fully realized truth for location '" + truth.location + "'");
    }
    return optimize_theta(truth, usable, mode, options);
}

} // namespace epimod
