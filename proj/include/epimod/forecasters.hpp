#pragma once

#include "epimod/series.hpp"

#include <string>
#include <variant>
#include <vector>

namespace epimod {

enum class ForecasterKind { arima, holt, spline, external };

const char* kind_name(ForecasterKind kind);
ForecasterKind kind_by_name(const std::string& name);

/// Shortest history each kind will accept for fitting.
std::size_t min_history(ForecasterKind kind);

struct ArimaOptions {
    int max_p = 3;
    int max_d = 2;
    int max_q = 3;
};

struct HoltOptions {
    bool damped = false;
    double phi = 0.98; // damping weight, used only when damped
};

struct SplineOptions {
    double lambda_min = 1e-4;
    double lambda_max = 1e6;
    int grid_size = 20; // log-spaced GCV grid
};

struct ForecasterSpec {
    ForecasterKind kind = ForecasterKind::holt;
    ArimaOptions arima;
    HoltOptions holt;
    SplineOptions spline;
    std::vector<double> quantile_levels; // strictly increasing, empty = point-only

    static ForecasterSpec of(ForecasterKind kind) {
        ForecasterSpec spec;
        spec.kind = kind;
        return spec;
    }
};

/// ARIMA(p,d,q) fitted by conditional sum of squares on the d-differenced
/// series, with the state needed to roll forecasts forward.
struct ArimaFit {
    int p = 0, d = 0, q = 0;
    bool has_constant = true;
    double constant = 0.0;
    std::vector<double> ar;     // phi_1..phi_p
    std::vector<double> ma;     // theta_1..theta_q
    std::vector<double> w_tail; // last p differenced values, oldest first
    std::vector<double> e_tail; // last q CSS residuals, oldest first
    std::vector<double> y_tail; // last d original values, oldest first
    double aicc = 0.0;
};

struct HoltFit {
    double alpha = 0.5;
    double beta = 0.1;
    double level = 0.0;
    double trend = 0.0;
    bool damped = false;
    double phi = 1.0;
};

struct SplineFit {
    double lambda = 0.0;
    double last_fitted = 0.0;
    double boundary_slope = 0.0;
    double gcv = 0.0;
    double edf = 0.0; // trace of the smoother matrix
};

struct ExternalFit {
    ForecastSet forecast;
};

/// Immutable result of fit(); cheap to copy and safe to share across threads.
struct FittedModel {
    ForecasterSpec spec;
    double sigma = 0.0; // in-sample one-step residual standard deviation
    std::size_t training_length = 0;
    Date origin_date;
    std::string location;
    Cadence cadence = Cadence::daily;
    std::variant<ArimaFit, HoltFit, SplineFit, ExternalFit> state;

    /// Wraps a pre-made forecast (e.g. an ingested hub ensemble) so it can
    /// flow through the same evaluation path as fitted models.
    static FittedModel from_forecast(const ForecastSet& fs);
};

/// Fits spec on the full history. Deterministic for fixed inputs.
/// Throws Error(InsufficientHistory) below the kind minimum and
/// Error(InvalidArgument) for the external kind, which is not fittable.
/// An all-constant history degrades ARIMA to a constant-mean (0,0,0) model.
FittedModel fit(const ForecasterSpec& spec, const EpidemicSeries& history);

/// k-step-ahead forecast. Point values are clipped at zero; when the spec
/// carries quantile levels, quantile q at horizon h is
/// max(0, point_h + z_q * sigma * sqrt(h)).
ForecastSet forecast(const FittedModel& model, std::size_t k);

/// Standard normal quantile (inverse CDF).
double normal_quantile(double q);

/// Hub-style 23 quantile levels (11 central intervals plus the median).
const std::vector<double>& hub_quantile_levels();

} // namespace epimod
