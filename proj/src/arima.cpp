#include "epimod/errors.hpp"
#include "epimod/optim.hpp"
#include "fc_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace epimod::detail {

namespace {

std::vector<double> difference(std::vector<double> w, int d) {
    for (int rep = 0; rep < d; ++rep) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) w[i] = w[i + 1] - w[i];
        w.pop_back();
    }
    return w;
}

// Durbin-Levinson map from partial autocorrelations in (-1,1) to AR
// coefficients of a stationary polynomial. Applied to tanh-transformed
// optimizer variables, it keeps the CSS search inside the admissible region.
std::vector<double> pacf_to_ar(const std::vector<double>& pac) {
    std::vector<double> phi(pac.size(), 0.0);
    std::vector<double> prev(pac.size(), 0.0);
    for (std::size_t k = 1; k <= pac.size(); ++k) {
        const double r = pac[k - 1];
        std::copy(phi.begin(), phi.begin() + (k - 1), prev.begin());
        phi[k - 1] = r;
        for (std::size_t j = 0; j + 1 < k; ++j) phi[j] = prev[j] - r * prev[k - 2 - j];
    }
    return phi;
}

// Inverse of pacf_to_ar; empty when the coefficients are not stationary.
std::optional<std::vector<double>> ar_to_pacf(std::vector<double> phi) {
    std::vector<double> pac(phi.size(), 0.0);
    for (std::size_t k = phi.size(); k >= 1; --k) {
        const double r = phi[k - 1];
        if (!(std::abs(r) < 1.0)) return std::nullopt;
        pac[k - 1] = r;
        std::vector<double> prev(k > 0 ? k - 1 : 0, 0.0);
        for (std::size_t j = 0; j + 1 < k; ++j) {
            prev[j] = (phi[j] + r * phi[k - 2 - j]) / (1.0 - r * r);
        }
        std::copy(prev.begin(), prev.end(), phi.begin());
    }
    return pac;
}

// Conditional sum of squares: residuals from t = p with presample residuals
// fixed at zero.
double css(const std::vector<double>& w, double c, const std::vector<double>& phi,
           const std::vector<double>& theta, std::vector<double>* residuals = nullptr) {
    const std::size_t p = phi.size(), q = theta.size(), m = w.size();
    std::vector<double> e(m, 0.0);
    double sse = 0.0;
    for (std::size_t t = p; t < m; ++t) {
        double pred = c;
        for (std::size_t i = 1; i <= p; ++i) pred += phi[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) {
            if (t - j >= p) pred += theta[j - 1] * e[t - j];
        }
        e[t] = w[t] - pred;
        sse += e[t] * e[t];
    }
    if (residuals) *residuals = std::move(e);
    return sse;
}

struct Unpacked {
    double c = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
};

Unpacked unpack(const std::vector<double>& x, bool has_c, int p, int q) {
    Unpacked u;
    std::size_t idx = 0;
    if (has_c) u.c = x[idx++];
    std::vector<double> pac(p);
    for (int i = 0; i < p; ++i) pac[i] = std::tanh(x[idx++]);
    u.phi = pacf_to_ar(pac);
    std::vector<double> mac(q);
    for (int j = 0; j < q; ++j) mac[j] = std::tanh(x[idx++]);
    const auto inv = pacf_to_ar(mac);
    u.theta.resize(q);
    for (int j = 0; j < q; ++j) u.theta[j] = -inv[j]; // invertible MA polynomial
    return u;
}

// Least squares by normal equations with partial pivoting; empty on a
// singular system.
std::optional<std::vector<double>> solve_least_squares(const std::vector<std::vector<double>>& rows,
                                                       const std::vector<double>& target) {
    const std::size_t dim = rows.empty() ? 0 : rows[0].size();
    if (dim == 0 || rows.size() < dim) return std::nullopt;
    std::vector<std::vector<double>> a(dim, std::vector<double>(dim + 1, 0.0));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) a[i][j] += rows[r][i] * rows[r][j];
            a[i][dim] += rows[r][i] * target[r];
        }
    }
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < dim; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-12) return std::nullopt;
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < dim; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= dim; ++j) a[r][j] -= factor * a[col][j];
        }
    }
    std::vector<double> beta(dim);
    for (std::size_t i = 0; i < dim; ++i) beta[i] = a[i][dim] / a[i][i];
    return beta;
}

struct ComboFit {
    double sse = 0.0;
    double aicc = 0.0;
    Unpacked params;
    std::vector<double> residuals;
};

std::optional<ComboFit> fit_combo(const std::vector<double>& w, int p, int q, bool has_c) {
    const std::size_t m = w.size();
    const double m_eff = static_cast<double>(m) - p;
    const int k_free = p + q + (has_c ? 1 : 0);
    const int k_aicc = k_free + 1; // + innovation variance
    if (m_eff - k_aicc - 1 < 1.0) return std::nullopt;

    const double mean_w = std::accumulate(w.begin(), w.end(), 0.0) / m;
    double sd_w = 0.0;
    for (double v : w) sd_w += (v - mean_w) * (v - mean_w);
    sd_w = std::sqrt(sd_w / m);

    const int dim = k_free;
    auto objective = [&](const std::vector<double>& x) {
        const Unpacked u = unpack(x, has_c, p, q);
        return css(w, u.c, u.phi, u.theta);
    };

    std::vector<std::vector<double>> starts;
    {
        std::vector<double> x0(dim, 0.0);
        if (has_c) x0[0] = mean_w;
        starts.push_back(x0);
    }
    if (p > 0) {
        // AR start from a least-squares regression of w_t on its lags.
        std::vector<std::vector<double>> rows;
        std::vector<double> target;
        for (std::size_t t = p; t < m; ++t) {
            std::vector<double> row;
            if (has_c) row.push_back(1.0);
            for (int i = 1; i <= p; ++i) row.push_back(w[t - i]);
            rows.push_back(std::move(row));
            target.push_back(w[t]);
        }
        if (const auto beta = solve_least_squares(rows, target)) {
            std::vector<double> phi(beta->begin() + (has_c ? 1 : 0), beta->end());
            if (auto pac = ar_to_pacf(phi)) {
                std::vector<double> x0(dim, 0.0);
                std::size_t idx = 0;
                if (has_c) x0[idx++] = (*beta)[0];
                for (int i = 0; i < p; ++i) {
                    x0[idx++] = std::atanh(std::clamp((*pac)[i], -0.98, 0.98));
                }
                starts.push_back(std::move(x0));
            }
        }
    }
    if (q > 0) {
        std::vector<double> x0(dim, 0.0);
        std::size_t idx = has_c ? 1 : 0;
        if (has_c) x0[0] = mean_w;
        idx += p;
        for (int j = 0; j < q; ++j) x0[idx++] = std::atanh(0.3);
        starts.push_back(std::move(x0));
    }

    std::vector<double> step(dim, 0.4);
    if (has_c) step[0] = 0.1 * sd_w + 1e-3;

    double best_sse = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    for (const auto& x0 : starts) {
        const auto run = nelder_mead(objective, x0, step, 150 * dim + 100);
        if (run.value < best_sse) {
            best_sse = run.value;
            best_x = run.x;
        }
    }

    ComboFit fit;
    fit.params = unpack(best_x, has_c, p, q);
    fit.sse = css(w, fit.params.c, fit.params.phi, fit.params.theta, &fit.residuals);

    const double sigma2 = fit.sse / m_eff;
    if (sigma2 <= 0.0 || !std::isfinite(sigma2)) {
        fit.aicc = -std::numeric_limits<double>::infinity();
    } else {
        fit.aicc = m_eff * std::log(sigma2) + 2.0 * k_aicc +
                   2.0 * k_aicc * (k_aicc + 1.0) / (m_eff - k_aicc - 1.0);
    }
    return fit;
}

} // namespace

ArimaFit fit_arima(const std::vector<double>& y, const ArimaOptions& opts, double& sigma_out) {
    ArimaFit best_fit;
    const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());

    // Degenerate (all-identical) history: fall back to the constant-mean
    // ARIMA(0,0,0) model.
    if (*min_it == *max_it) {
        best_fit.constant = y.front();
        best_fit.has_constant = true;
        best_fit.aicc = -std::numeric_limits<double>::infinity();
        sigma_out = 0.0;
        return best_fit;
    }

    double best_aicc = std::numeric_limits<double>::infinity();
    double best_sigma = 0.0;
    bool found = false;

    for (int d = 0; d <= opts.max_d; ++d) {
        const std::vector<double> w = difference(y, d);
        const bool has_c = d <= 1; // no constant at d = 2: avoids cubic drift
        for (int p = 0; p <= opts.max_p; ++p) {
            for (int q = 0; q <= opts.max_q; ++q) {
                const auto combo = fit_combo(w, p, q, has_c);
                if (!combo || !(combo->aicc < best_aicc)) continue;
                best_aicc = combo->aicc;
                found = true;

                best_fit = ArimaFit{};
                best_fit.p = p;
                best_fit.d = d;
                best_fit.q = q;
                best_fit.has_constant = has_c;
                best_fit.constant = combo->params.c;
                best_fit.ar = combo->params.phi;
                best_fit.ma = combo->params.theta;
                best_fit.aicc = combo->aicc;
                best_fit.w_tail.assign(w.end() - p, w.end());
                best_fit.e_tail.assign(combo->residuals.end() - q, combo->residuals.end());
                best_fit.y_tail.assign(y.end() - d, y.end());

                const double m_eff = static_cast<double>(w.size()) - p;
                const int k_free = p + q + (has_c ? 1 : 0);
                best_sigma = std::sqrt(combo->sse / std::max(1.0, m_eff - k_free));
            }
        }
    }

    if (!found) {
        throw_error(Errc::InsufficientHistory,
                    "no ARIMA order is estimable on " + std::to_string(y.size()) + " points");
    }
    sigma_out = best_sigma;
    return best_fit;
}

std::vector<double> forecast_arima(const ArimaFit& fit, std::size_t k) {
    std::vector<double> w_hist = fit.w_tail;
    std::vector<double> e_hist = fit.e_tail;
    std::vector<double> w_forecast;
    w_forecast.reserve(k);
    for (std::size_t h = 0; h < k; ++h) {
        double pred = fit.constant;
        for (std::size_t i = 1; i <= fit.ar.size(); ++i) {
            pred += fit.ar[i - 1] * w_hist[w_hist.size() - i];
        }
        for (std::size_t j = 1; j <= fit.ma.size() && j <= e_hist.size(); ++j) {
            pred += fit.ma[j - 1] * e_hist[e_hist.size() - j];
        }
        w_hist.push_back(pred);
        e_hist.push_back(0.0); // future innovations at their mean
        w_forecast.push_back(pred);
    }

    if (fit.d == 0) return w_forecast;

    // Undo the differencing: diffs[j] carries the latest value of the j-th
    // difference of the original series.
    std::vector<double> diffs(fit.d, 0.0);
    diffs[0] = fit.y_tail.back();
    if (fit.d == 2) diffs[1] = fit.y_tail[1] - fit.y_tail[0];

    std::vector<double> out;
    out.reserve(k);
    for (const double w_hat : w_forecast) {
        diffs[fit.d - 1] += w_hat;
        for (int j = fit.d - 2; j >= 0; --j) diffs[j] += diffs[j + 1];
        out.push_back(diffs[0]);
    }
    return out;
}

} // namespace epimod::detail
