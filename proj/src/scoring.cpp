#include "epimod/scoring.hpp"

#include "epimod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace epimod {

double mae(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) throw_error(Errc::EmptyInput, "mae over an empty pair list");
    double total = 0.0;
    for (const auto& [observed, predicted] : pairs) {
        if (!std::isfinite(observed) || !std::isfinite(predicted)) {
            throw_error(Errc::NonFiniteValue, "mae input");
        }
        total += std::abs(predicted - observed);
    }
    return total / static_cast<double>(pairs.size());
}

double interval_score(double y, const IntervalSpec& spec) {
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0) || spec.lower > spec.upper) {
        throw_error(Errc::InvalidArgument, "interval spec requires alpha in (0,1), lower <= upper");
    }
    double score = spec.upper - spec.lower;
    if (y < spec.lower) {
        score += (2.0 / spec.alpha) * (spec.lower - y);
    } else if (y > spec.upper) {
        score += (2.0 / spec.alpha) * (y - spec.upper);
    }
    return score;
}

WisConfig WisConfig::from_levels(const std::vector<double>& levels, WisConvention convention) {
    WisConfig cfg;
    cfg.convention = convention;
    cfg.includes_median = false;
    std::vector<double> sorted = levels;
    std::sort(sorted.begin(), sorted.end());
    std::size_t lo = 0, hi = sorted.size();
    while (lo < hi) {
        if (hi - lo == 1) {
            if (std::abs(sorted[lo] - 0.5) > 1e-9) {
                throw_error(Errc::AsymmetricQuantiles,
                            "unpaired level " + std::to_string(sorted[lo]));
            }
            cfg.includes_median = true;
            break;
        }
        if (std::abs(sorted[lo] + sorted[hi - 1] - 1.0) > 1e-9) {
            throw_error(Errc::AsymmetricQuantiles,
                        "levels " + std::to_string(sorted[lo]) + " and " +
                            std::to_string(sorted[hi - 1]) + " are not a central pair");
        }
        ++cfg.K;
        ++lo;
        --hi;
    }
    return cfg;
}

double wis(double y, const std::vector<std::pair<double, double>>& quantiles,
           const WisConfig& cfg) {
    std::vector<std::pair<double, double>> sorted = quantiles;
    std::sort(sorted.begin(), sorted.end());

    // Re-derive the structure and require it to match cfg.
    const WisConfig observed = [&] {
        std::vector<double> levels;
        levels.reserve(sorted.size());
        for (const auto& [level, value] : sorted) levels.push_back(level);
        WisConfig c = WisConfig::from_levels(levels, cfg.convention);
        return c;
    }();
    if (observed.K != cfg.K || observed.includes_median != cfg.includes_median) {
        throw_error(Errc::AsymmetricQuantiles,
                    "quantile structure does not match the configured K/median layout");
    }

    double median_term = 0.0;
    if (cfg.includes_median) {
        const double median = sorted[cfg.K].second;
        median_term = std::abs(y - median);
    }

    double interval_sum = 0.0; // sum of weight_k * IntervalScore_k
    const std::size_t n = sorted.size();
    for (int k = 0; k < cfg.K; ++k) {
        const double level_lo = sorted[k].first;
        IntervalSpec spec;
        spec.alpha = 2.0 * level_lo; // central interval (q, 1-q) has alpha = 2q
        spec.lower = sorted[k].second;
        spec.upper = sorted[n - 1 - k].second;
        const double is = interval_score(y, spec);
        interval_sum +=
            (cfg.convention == WisConvention::paper_literal ? spec.alpha : spec.alpha / 2.0) * is;
    }

    if (cfg.convention == WisConvention::paper_literal) {
        const double denom = cfg.includes_median ? cfg.K + 1.0 : std::max(1, cfg.K);
        return (median_term + interval_sum) / denom;
    }
    const double median_weight = cfg.includes_median ? 0.5 : 0.0;
    const double denom = cfg.includes_median ? cfg.K + 0.5 : std::max(1, cfg.K);
    return (median_weight * median_term + interval_sum) / denom;
}

double wis(double y, const ForecastSet& fs, std::size_t horizon, const WisConfig& cfg) {
    if (!fs.has_quantiles()) throw_error(Errc::NoQuantiles, "forecast set has no quantiles");
    if (horizon < 1 || horizon > fs.horizons()) {
        throw_error(Errc::InvalidArgument, "horizon out of range");
    }
    std::vector<std::pair<double, double>> quantiles;
    quantiles.reserve(fs.quantiles.size());
    for (const auto& track : fs.quantiles) {
        quantiles.emplace_back(track.level, track.values[horizon - 1]);
    }
    return wis(y, quantiles, cfg);
}

double percent_improvement(double base_score, double model_score) {
    if (!(base_score > 0.0)) {
        throw_error(Errc::ZeroBaseline, "baseline score must be > 0");
    }
    return (base_score - model_score) / base_score * 100.0;
}

bool AggregationWindow::matches(const ScoreRecord& rec) const {
    if (start && rec.origin_date < *start) return false;
    if (end && *end < rec.origin_date) return false;
    if (!locations.empty() &&
        std::find(locations.begin(), locations.end(), rec.location) == locations.end()) {
        return false;
    }
    if (!horizons.empty() &&
        std::find(horizons.begin(), horizons.end(), rec.horizon) == horizons.end()) {
        return false;
    }
    return true;
}

AggregateResult aggregate(const std::vector<ScoreRecord>& base_records,
                          const std::vector<ScoreRecord>& model_records,
                          const std::vector<AggregationWindow>& windows) {
    using Key = std::tuple<std::int64_t, std::string, int>;
    std::map<Key, const ScoreRecord*> base_by_key;
    for (const auto& rec : base_records) {
        base_by_key[{rec.origin_date.serial(), rec.location, rec.horizon}] = &rec;
    }

    AggregateResult result;
    std::map<Key, std::pair<const ScoreRecord*, const ScoreRecord*>> matched;
    for (const auto& rec : model_records) {
        const Key key{rec.origin_date.serial(), rec.location, rec.horizon};
        const auto it = base_by_key.find(key);
        if (it == base_by_key.end()) {
            ++result.model_only_keys;
        } else {
            matched[key] = {it->second, &rec};
        }
    }
    result.base_only_keys = base_by_key.size() - matched.size();
    if (matched.empty()) {
        throw_error(Errc::NoOverlap, "base and model runs share no (origin, location, horizon) key");
    }

    for (const auto& window : windows) {
        AggregateRow row;
        row.window = window.label;
        double base_sum = 0.0, model_sum = 0.0;
        for (const auto& [key, pair] : matched) {
            if (!window.matches(*pair.first)) continue;
            base_sum += pair.first->absolute_error;
            model_sum += pair.second->absolute_error;
            ++row.n_records;
        }
        if (row.n_records == 0) continue; // reported via the row's absence
        row.base_mean = base_sum / static_cast<double>(row.n_records);
        row.model_mean = model_sum / static_cast<double>(row.n_records);
        row.abs_reduction = row.base_mean - row.model_mean;
        row.pct_improvement =
            row.base_mean > 0.0 ? percent_improvement(row.base_mean, row.model_mean) : 0.0;
        result.rows.push_back(std::move(row));
    }
    return result;
}

} // namespace epimod
