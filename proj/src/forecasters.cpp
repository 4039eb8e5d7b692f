#include "epimod/forecasters.hpp"

#include "epimod/errors.hpp"
#include "fc_internal.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace epimod {

const char* kind_name(ForecasterKind kind) {
    switch (kind) {
    case ForecasterKind::arima: return "arima";
    case ForecasterKind::holt: return "holt";
    case ForecasterKind::spline: return "spline";
    case ForecasterKind::external: return "external";
    }
    return "unknown";
}

ForecasterKind kind_by_name(const std::string& name) {
    if (name == "arima") return ForecasterKind::arima;
    if (name == "holt") return ForecasterKind::holt;
    if (name == "spline") return ForecasterKind::spline;
    if (name == "external") return ForecasterKind::external;
    throw_error(Errc::InvalidArgument, "unknown forecaster kind '" + name + "'");
}

std::size_t min_history(ForecasterKind kind) {
    switch (kind) {
    case ForecasterKind::arima: return 10;
    case ForecasterKind::holt: return 4;
    case ForecasterKind::spline: return 8;
    case ForecasterKind::external: return 0;
    }
    return 0;
}

double normal_quantile(double q) {
    static const boost::math::normal_distribution<double> standard_normal;
    return boost::math::quantile(standard_normal, q);
}

const std::vector<double>& hub_quantile_levels() {
    static const std::vector<double> levels = [] {
        std::vector<double> v{0.01, 0.025};
        for (int i = 1; i <= 19; ++i) v.push_back(i * 0.05);
        v.push_back(0.975);
        v.push_back(0.99);
        std::sort(v.begin(), v.end());
        return v;
    }();
    return levels;
}

FittedModel FittedModel::from_forecast(const ForecastSet& fs) {
    validate_forecast_set(fs);
    FittedModel model;
    model.spec = ForecasterSpec::of(ForecasterKind::external);
    model.sigma = 0.0;
    model.training_length = fs.origin_index;
    model.origin_date = fs.origin_date;
    model.location = fs.location;
    model.state = ExternalFit{fs};
    return model;
}

FittedModel fit(const ForecasterSpec& spec, const EpidemicSeries& history) {
    if (spec.kind == ForecasterKind::external) {
        throw_error(Errc::InvalidArgument, "external forecasts are loaded, not fitted");
    }
    validate_series(history);
    const std::size_t need = min_history(spec.kind);
    if (history.size() < need) {
        throw_error(Errc::InsufficientHistory,
                    std::string(kind_name(spec.kind)) + " needs " + std::to_string(need) +
                        " points, got " + std::to_string(history.size()));
    }
    double prev = -1.0;
    for (double level : spec.quantile_levels) {
        if (!(level > 0.0 && level < 1.0) || level <= prev) {
            throw_error(Errc::InvalidArgument, "quantile levels must be strictly increasing in (0,1)");
        }
        prev = level;
    }

    FittedModel model;
    model.spec = spec;
    model.training_length = history.size();
    model.origin_date = history.date_at(history.size() - 1);
    model.location = history.location;
    model.cadence = history.cadence;

    switch (spec.kind) {
    case ForecasterKind::arima:
        model.state = detail::fit_arima(history.values, spec.arima, model.sigma);
        break;
    case ForecasterKind::holt:
        model.state = detail::fit_holt(history.values, spec.holt, model.sigma);
        break;
    case ForecasterKind::spline:
        model.state = detail::fit_spline(history.values, spec.spline, model.sigma);
        break;
    case ForecasterKind::external:
        break; // unreachable
    }
    return model;
}

ForecastSet forecast(const FittedModel& model, std::size_t k) {
    if (k < 1) throw_error(Errc::InvalidArgument, "horizon count must be >= 1");

    if (const auto* external = std::get_if<ExternalFit>(&model.state)) {
        const ForecastSet& stored = external->forecast;
        if (stored.horizons() < k) {
            throw_error(Errc::InvalidArgument,
                        "external forecast has only " + std::to_string(stored.horizons()) +
                            " horizons");
        }
        ForecastSet out = stored;
        out.point.resize(k);
        for (auto& track : out.quantiles) track.values.resize(k);
        return out;
    }

    ForecastSet out;
    out.origin_index = model.training_length;
    out.origin_date = model.origin_date;
    out.location = model.location;

    std::vector<double> raw;
    if (const auto* arima = std::get_if<ArimaFit>(&model.state)) {
        raw = detail::forecast_arima(*arima, k);
    } else if (const auto* holt = std::get_if<HoltFit>(&model.state)) {
        raw = detail::forecast_holt(*holt, k);
    } else {
        raw = detail::forecast_spline(std::get<SplineFit>(model.state), k);
    }

    out.point.resize(k);
    for (std::size_t h = 0; h < k; ++h) out.point[h] = std::max(0.0, raw[h]);

    for (const double level : model.spec.quantile_levels) {
        const double z = normal_quantile(level);
        QuantileTrack track;
        track.level = level;
        track.values.resize(k);
        for (std::size_t h = 0; h < k; ++h) {
            track.values[h] =
                std::max(0.0, out.point[h] + z * model.sigma * std::sqrt(static_cast<double>(h + 1)));
        }
        out.quantiles.push_back(std::move(track));
    }
    return out;
}

} // namespace epimod
