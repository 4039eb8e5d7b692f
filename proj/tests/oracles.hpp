#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include "epimod/modulation.hpp"
#include "epimod/series.hpp"
#include "epimod/sir.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracles {

// Classic fourth-order Runge-Kutta integration of the SIR right-hand side.
inline epimod::sir::SirState rk4_sir(const epimod::sir::SirState& start, double beta, double gamma,
                                     double t_total, double dt) {
    auto deriv = [&](const epimod::sir::SirState& s) {
        epimod::sir::SirState d;
        d.s = -beta * s.s * s.i;
        d.i = beta * s.s * s.i - gamma * s.i;
        d.r = gamma * s.i;
        return d;
    };
    auto advance = [](const epimod::sir::SirState& s, const epimod::sir::SirState& d, double h) {
        return epimod::sir::SirState{s.s + h * d.s, s.i + h * d.i, s.r + h * d.r};
    };
    epimod::sir::SirState state = start;
    const long steps = std::lround(t_total / dt);
    for (long n = 0; n < steps; ++n) {
        const auto k1 = deriv(state);
        const auto k2 = deriv(advance(state, k1, dt / 2));
        const auto k3 = deriv(advance(state, k2, dt / 2));
        const auto k4 = deriv(advance(state, k3, dt));
        state.s += dt / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
        state.i += dt / 6 * (k1.i + 2 * k2.i + 2 * k3.i + k4.i);
        state.r += dt / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
    }
    return state;
}

// Deterministic uniform/normal draws (mt19937 bit stream only, so results
// are identical across standard libraries).
class Rng {
public:
    explicit Rng(std::uint32_t seed) : engine_(seed) {}

    double uniform() {
        const std::uint64_t hi = engine_() >> 5, lo = engine_() >> 6;
        return (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) /
               9007199254740992.0;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * n) % n; }

private:
    std::mt19937 engine_;
};

// Ordinary least squares slope of y_t on y_{t-1} with intercept.
inline double ols_ar1_slope(const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t n = y.size() - 1;
    for (std::size_t t = 1; t < y.size(); ++t) {
        sx += y[t - 1];
        sy += y[t];
        sxx += y[t - 1] * y[t - 1];
        sxy += y[t - 1] * y[t];
    }
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

// Plain sum of squared point-forecast errors, no modulation code involved.
inline double plain_sse(const epimod::EpidemicSeries& truth,
                        const std::vector<epimod::ForecastSet>& forecasts) {
    double total = 0.0;
    for (const auto& fs : forecasts) {
        for (std::size_t h = 0; h < fs.point.size(); ++h) {
            const double err = fs.point[h] - truth.values[fs.origin_index + h];
            total += err * err;
        }
    }
    return total;
}

// Direct evaluation of the depletion exponentials as a running product of
// per-horizon factors (a different floating-point path than exp-of-sum).
inline std::vector<double> modulate_by_products(const std::vector<double>& point, double rate,
                                                bool total_window) {
    std::vector<double> out(point.size());
    if (total_window) {
        double factor = 1.0;
        for (const double v : point) factor *= std::exp(-rate * v);
        for (std::size_t i = 0; i < point.size(); ++i) out[i] = point[i] * factor;
    } else {
        double factor = 1.0;
        for (std::size_t i = 0; i < point.size(); ++i) {
            factor *= std::exp(-rate * point[i]);
            out[i] = point[i] * factor;
        }
    }
    return out;
}

// Dense grid minimum of the adjusted prediction error over effective theta.
struct GridMin {
    double rate = 0.0;
    double value = 0.0;
};

inline GridMin dense_theta_grid(const epimod::EpidemicSeries& truth,
                                const std::vector<epimod::ForecastSet>& forecasts,
                                const epimod::ModulationMode& mode, double hi, int points) {
    GridMin best;
    best.value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
        const double rate = hi * static_cast<double>(i) / (points - 1);
        const double value =
            epimod::prediction_error(truth, forecasts, epimod::Theta{rate, 1.0}, mode);
        if (value < best.value) {
            best.value = value;
            best.rate = rate;
        }
    }
    return best;
}

// Valid randomized forecast set: nonnegative point, monotone quantile tracks.
inline epimod::ForecastSet random_forecast_set(Rng& rng, std::size_t max_k = 28,
                                               bool with_quantiles = true) {
    epimod::ForecastSet fs;
    fs.location = "r" + std::to_string(rng.index(50));
    fs.origin_date = epimod::Date(2022, 1, 1) + static_cast<std::int64_t>(rng.index(300));
    fs.origin_index = rng.index(200);
    const std::size_t k = 1 + rng.index(max_k);
    fs.point.resize(k);
    for (auto& v : fs.point) v = rng.uniform(0.0, 5000.0);

    if (with_quantiles) {
        const std::size_t n_pairs = 1 + rng.index(5);
        std::vector<double> levels;
        for (std::size_t p = 1; p <= n_pairs; ++p) {
            const double q = 0.5 * static_cast<double>(p) / (n_pairs + 1);
            levels.push_back(q);
            levels.push_back(1.0 - q);
        }
        levels.push_back(0.5);
        std::sort(levels.begin(), levels.end());

        std::vector<double> floor(k, 0.0);
        for (const double level : levels) {
            epimod::QuantileTrack track;
            track.level = level;
            track.values.resize(k);
            for (std::size_t h = 0; h < k; ++h) {
                floor[h] += rng.uniform(0.0, 500.0);
                track.values[h] = floor[h];
            }
            fs.quantiles.push_back(std::move(track));
        }
    }
    return fs;
}

} // namespace oracles
