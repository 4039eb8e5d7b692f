#pragma once

// Internal fitting routines shared by the forecaster translation units.

#include "epimod/forecasters.hpp"

#include <vector>

namespace epimod::detail {

ArimaFit fit_arima(const std::vector<double>& y, const ArimaOptions& opts, double& sigma_out);
HoltFit fit_holt(const std::vector<double>& y, const HoltOptions& opts, double& sigma_out);
SplineFit fit_spline(const std::vector<double>& y, const SplineOptions& opts, double& sigma_out);

std::vector<double> forecast_arima(const ArimaFit& fit, std::size_t k);
std::vector<double> forecast_holt(const HoltFit& fit, std::size_t k);
std::vector<double> forecast_spline(const SplineFit& fit, std::size_t k);

} // namespace epimod::detail
