#include "epimod/optim.hpp"
#include "fc_internal.hpp"

#include <cmath>

namespace epimod::detail {

namespace {

struct HoltPass {
    double sse = 0.0;
    double level = 0.0;
    double trend = 0.0;
};

// One pass of the additive linear-trend recursion, initialized with
// l0 = y0, b0 = y1 - y0. Residuals are one-step-ahead errors from t = 1.
HoltPass run_holt(const std::vector<double>& y, double alpha, double beta, double phi) {
    HoltPass pass;
    pass.level = y[0];
    pass.trend = y[1] - y[0];
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double predicted = pass.level + phi * pass.trend;
        const double err = y[t] - predicted;
        pass.sse += err * err;
        const double new_level = alpha * y[t] + (1.0 - alpha) * predicted;
        pass.trend = beta * (new_level - pass.level) + (1.0 - beta) * phi * pass.trend;
        pass.level = new_level;
    }
    return pass;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

} // namespace

HoltFit fit_holt(const std::vector<double>& y, const HoltOptions& opts, double& sigma_out) {
    const double phi = opts.damped ? opts.phi : 1.0;

    auto objective = [&](const std::vector<double>& u) {
        return run_holt(y, sigmoid(u[0]), sigmoid(u[1]), phi).sse;
    };

    const double starts[][2] = {{0.5, 0.1}, {0.8, 0.2}, {0.2, 0.05}};
    std::vector<double> best_u;
    double best_sse = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        const auto run =
            nelder_mead(objective, {logit(s[0]), logit(s[1])}, {0.5, 0.5}, 400);
        if (run.value < best_sse) {
            best_sse = run.value;
            best_u = run.x;
        }
    }

    HoltFit fit;
    fit.alpha = sigmoid(best_u[0]);
    fit.beta = sigmoid(best_u[1]);
    fit.damped = opts.damped;
    fit.phi = phi;
    const HoltPass pass = run_holt(y, fit.alpha, fit.beta, phi);
    fit.level = pass.level;
    fit.trend = pass.trend;
    const double df = std::max<double>(1.0, static_cast<double>(y.size()) - 3.0);
    sigma_out = std::sqrt(pass.sse / df);
    return fit;
}

std::vector<double> forecast_holt(const HoltFit& fit, std::size_t k) {
    std::vector<double> out;
    out.reserve(k);
    double trend_sum = 0.0;
    double phi_pow = 1.0;
    for (std::size_t h = 1; h <= k; ++h) {
        phi_pow *= fit.phi;
        trend_sum += phi_pow; // phi == 1 gives the plain h * trend
        out.push_back(fit.level + trend_sum * fit.trend);
    }
    return out;
}

} // namespace epimod::detail
