#pragma once

#include "epimod/series.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epimod {

/// Central (1 - alpha) prediction interval.
struct IntervalSpec {
    double alpha = 0.2;
    double lower = 0.0;
    double upper = 0.0;
};

/// WIS weighting conventions. paper_literal uses weights alpha_k and median
/// weight 1 normalized by K+1; standard_half_alpha uses the Bracher et al.
/// weights alpha_k/2 with median weight 1/2, normalized by K + 1/2.
enum class WisConvention { paper_literal, standard_half_alpha };

struct WisConfig {
    WisConvention convention = WisConvention::standard_half_alpha;
    int K = 0; // number of central interval levels
    bool includes_median = true;

    /// Derives (K, includes_median) from a symmetric quantile-level set.
    /// Throws Error(AsymmetricQuantiles) when levels cannot be paired into
    /// central intervals plus an optional median.
    static WisConfig from_levels(const std::vector<double>& levels,
                                 WisConvention convention = WisConvention::standard_half_alpha);
};

/// Labeled (date range, location, horizon) filter for score aggregation.
/// Dates select on the forecast origin date; empty filters match everything.
struct AggregationWindow {
    std::string label;
    std::optional<Date> start;
    std::optional<Date> end; // inclusive
    std::vector<std::string> locations;
    std::vector<int> horizons;

    bool matches(const ScoreRecord& rec) const;
};

struct AggregateRow {
    std::string window;
    double base_mean = 0.0;
    double model_mean = 0.0;
    double abs_reduction = 0.0;
    double pct_improvement = 0.0;
    std::size_t n_records = 0;
};

struct AggregateResult {
    std::vector<AggregateRow> rows;
    std::size_t base_only_keys = 0;  // records present only in the base run
    std::size_t model_only_keys = 0; // records present only in the model run
};

/// Mean absolute error over (observed, predicted) pairs.
/// Throws Error(EmptyInput) on an empty list.
double mae(const std::vector<std::pair<double, double>>& pairs);

/// Width plus 2/alpha times the out-of-interval distance.
double interval_score(double y, const IntervalSpec& spec);

/// Weighted interval score at one horizon; quantiles is the (level, value)
/// map at that horizon. Throws Error(AsymmetricQuantiles) when the levels do
/// not form central intervals (plus optional median) matching cfg.
double wis(double y, const std::vector<std::pair<double, double>>& quantiles,
           const WisConfig& cfg);

/// Convenience overload pulling the quantiles of fs at the given horizon.
double wis(double y, const ForecastSet& fs, std::size_t horizon, const WisConfig& cfg);

/// (base - model) / base * 100. Throws Error(ZeroBaseline) when base <= 0.
double percent_improvement(double base_score, double model_score);

/// Per-window mean absolute error of base vs model over matching
/// (origin, location, horizon) keys. Mismatched keys are counted in the
/// result, never silently dropped. Throws Error(NoOverlap) when no key
/// matches at all.
AggregateResult aggregate(const std::vector<ScoreRecord>& base_records,
                          const std::vector<ScoreRecord>& model_records,
                          const std::vector<AggregationWindow>& windows);

} // namespace epimod
