#include "epimod/series.hpp"

#include "epimod/errors.hpp"

#include <algorithm>
#include <cmath>

namespace epimod {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::NegativeValue: return "NegativeValue";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::OriginBeyondTruth: return "OriginBeyondTruth";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::NegativeForecastInput: return "NegativeForecastInput";
    case Errc::NoQuantiles: return "NoQuantiles";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ZeroBaseline: return "ZeroBaseline";
    case Errc::AsymmetricQuantiles: return "AsymmetricQuantiles";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::ParseError: return "ParseError";
    case Errc::NonMonotoneDates: return "NonMonotoneDates";
    case Errc::UnparseableTarget: return "UnparseableTarget";
    case Errc::InconsistentHorizons: return "InconsistentHorizons";
    case Errc::NoRetrospectiveOrigins: return "NoRetrospectiveOrigins";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

std::optional<std::size_t> EpidemicSeries::index_of(Date date) const {
    const std::int64_t delta = date - start_date;
    const int step = cadence_step_days(cadence);
    if (delta < 0 || delta % step != 0) return std::nullopt;
    const std::size_t index = static_cast<std::size_t>(delta / step);
    if (index >= values.size()) return std::nullopt;
    return index;
}

const QuantileTrack* ForecastSet::find_level(double level, double tol) const {
    for (const auto& track : quantiles) {
        if (std::abs(track.level - level) <= tol) return &track;
    }
    return nullptr;
}

const EpidemicSeries& validate_series(const EpidemicSeries& series) {
    if (series.values.empty()) {
        throw_error(Errc::EmptySeries, "series '" + series.location + "' has no values");
    }
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double v = series.values[i];
        if (!std::isfinite(v)) {
            throw_error(Errc::NonFiniteValue,
                        "series '" + series.location + "' index " + std::to_string(i));
        }
        if (v < 0.0) {
            throw_error(Errc::NegativeValue,
                        "series '" + series.location + "' index " + std::to_string(i));
        }
    }
    return series;
}

namespace {

void check_trajectory(const std::vector<double>& values, std::size_t k, const std::string& what) {
    if (values.size() != k) {
        throw_error(Errc::InvalidArgument,
                    what + " has length " + std::to_string(values.size()) + ", expected " +
                        std::to_string(k));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw_error(Errc::NonFiniteValue, what + " horizon " + std::to_string(i + 1));
        }
        if (values[i] < 0.0) {
            throw_error(Errc::NegativeValue, what + " horizon " + std::to_string(i + 1));
        }
    }
}

} // namespace

const ForecastSet& validate_forecast_set(const ForecastSet& fs) {
    if (fs.point.empty()) {
        throw_error(Errc::EmptyInput, "forecast set for '" + fs.location + "' has no horizons");
    }
    check_trajectory(fs.point, fs.point.size(), "point trajectory");
    double prev_level = 0.0;
    for (const auto& track : fs.quantiles) {
        if (!(track.level > 0.0 && track.level < 1.0)) {
            throw_error(Errc::InvalidArgument,
                        "quantile level " + std::to_string(track.level) + " outside (0,1)");
        }
        if (track.level <= prev_level) {
            throw_error(Errc::InvalidArgument, "quantile levels not strictly increasing");
        }
        prev_level = track.level;
        check_trajectory(track.values, fs.point.size(),
                         "quantile " + std::to_string(track.level) + " trajectory");
    }
    // Monotone quantile function at every horizon.
    for (std::size_t h = 0; h < fs.point.size(); ++h) {
        for (std::size_t q = 1; q < fs.quantiles.size(); ++q) {
            if (fs.quantiles[q].values[h] < fs.quantiles[q - 1].values[h]) {
                throw_error(Errc::InvalidArgument,
                            "quantile crossing at horizon " + std::to_string(h + 1));
            }
        }
    }
    return fs;
}

std::vector<std::pair<double, double>> align(const EpidemicSeries& truth, const ForecastSet& fs) {
    if (fs.origin_index > truth.size()) {
        throw_error(Errc::OriginBeyondTruth,
                    "origin " + std::to_string(fs.origin_index) + " > truth length " +
                        std::to_string(truth.size()));
    }
    const std::size_t available = truth.size() - fs.origin_index;
    const std::size_t n = std::min(fs.horizons(), available);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n);
    for (std::size_t h = 0; h < n; ++h) {
        pairs.emplace_back(truth.values[fs.origin_index + h], fs.point[h]);
    }
    return pairs;
}

ForecastSet locate_origin(const EpidemicSeries& truth, const ForecastSet& fs) {
    ForecastSet out = fs;
    const int step = cadence_step_days(truth.cadence);
    const std::int64_t delta = fs.origin_date - truth.start_date;
    if (delta < 0) {
        out.origin_index = 0;
        return out;
    }
    // Count of observations dated <= origin_date, capped at the series end.
    const std::int64_t periods = delta / step + 1;
    out.origin_index = std::min<std::size_t>(static_cast<std::size_t>(periods), truth.size());
    return out;
}

ScoreRecord make_score_record(Date origin_date, const std::string& location, int horizon,
                              double observed, double predicted_point) {
    ScoreRecord rec;
    rec.origin_date = origin_date;
    rec.location = location;
    rec.horizon = horizon;
    rec.observed = observed;
    rec.predicted_point = predicted_point;
    rec.absolute_error = std::abs(predicted_point - observed);
    return rec;
}

} // namespace epimod
