#pragma once

#include "epimod/date.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epimod {

enum class Cadence { daily, weekly };

/// Days per period of a cadence (weekly series step by plain 7-day dates).
inline int cadence_step_days(Cadence c) { return c == Cadence::weekly ? 7 : 1; }

/// Dated, location-tagged, gapless nonnegative count series. Index i maps to
/// start_date + i periods. Immutable by convention once validated.
struct EpidemicSeries {
    std::string location;
    Cadence cadence = Cadence::daily;
    Date start_date;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    Date date_at(std::size_t index) const {
        return start_date + static_cast<std::int64_t>(index) * cadence_step_days(cadence);
    }

    /// Inverse of date_at. Empty when the date does not fall on the grid.
    std::optional<std::size_t> index_of(Date date) const;
};

/// One quantile trajectory of a forecast (level in (0,1), one value per horizon).
struct QuantileTrack {
    double level = 0.5;
    std::vector<double> values;
};

/// Point trajectory plus optional quantile trajectories for horizons 1..k
/// issued at one origin for one location. origin_index is the number of truth
/// values observed before the forecast starts; horizon h targets truth index
/// origin_index + h - 1 and date origin_date + h periods.
struct ForecastSet {
    std::size_t origin_index = 0;
    Date origin_date;
    std::string location;
    std::vector<double> point;
    std::vector<QuantileTrack> quantiles; // sorted by level, may be empty

    std::size_t horizons() const { return point.size(); }
    bool has_quantiles() const { return !quantiles.empty(); }
    const QuantileTrack* find_level(double level, double tol = 1e-9) const;
};

/// Per-(origin, location, horizon) evaluation result.
struct ScoreRecord {
    Date origin_date;
    std::string location;
    int horizon = 1;
    double observed = 0.0;
    double predicted_point = 0.0;
    double absolute_error = 0.0;
    std::optional<double> wis;
    std::vector<std::pair<double, double>> interval_scores; // (alpha, score)
};

/// Checks the EpidemicSeries invariants and returns the series untouched.
/// Throws Error(EmptySeries | NegativeValue | NonFiniteValue), naming the
/// offending index.
const EpidemicSeries& validate_series(const EpidemicSeries& series);

/// Checks the ForecastSet invariants (lengths, level ordering, per-horizon
/// quantile monotonicity, nonnegative finite values).
const ForecastSet& validate_forecast_set(const ForecastSet& fs);

/// Pairs forecast horizons with available truth, in horizon order:
/// min(k, truth.size() - origin_index) pairs of (observed, predicted).
/// Throws Error(OriginBeyondTruth) when origin_index > truth.size().
std::vector<std::pair<double, double>> align(const EpidemicSeries& truth, const ForecastSet& fs);

/// Returns a copy of fs with origin_index derived from origin_date against
/// the given truth series (count of observations dated <= origin_date).
ForecastSet locate_origin(const EpidemicSeries& truth, const ForecastSet& fs);

ScoreRecord make_score_record(Date origin_date, const std::string& location, int horizon,
                              double observed, double predicted_point);

} // namespace epimod
