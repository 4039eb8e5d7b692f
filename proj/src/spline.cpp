#include "epimod/errors.hpp"
#include "fc_internal.hpp"

#include <cmath>
#include <limits>

namespace epimod::detail {

namespace {

// Cubic smoothing spline at unit-spaced knots, Reinsch form: solve
// (R + lambda * QtQ) g = Qt y for the interior second derivatives g, then
// fitted = y - lambda * Q g. R is tridiagonal [1/6, 2/3, 1/6] and QtQ the
// pentadiagonal second-difference filter [1, -4, 6, -4, 1].
struct BandSystem {
    std::vector<double> d0, d1, d2; // diagonal, first and second superdiagonal
};

BandSystem build_system(std::size_t nn, double lambda) {
    BandSystem m;
    m.d0.assign(nn, 2.0 / 3.0 + 6.0 * lambda);
    m.d1.assign(nn > 1 ? nn - 1 : 0, 1.0 / 6.0 - 4.0 * lambda);
    m.d2.assign(nn > 2 ? nn - 2 : 0, lambda);
    return m;
}

// Banded LDL^T factorization (semi-bandwidth 2, symmetric positive definite).
struct BandFactor {
    std::vector<double> d;  // D
    std::vector<double> l1; // L[i][i-1], index i
    std::vector<double> l2; // L[i][i-2], index i
};

BandFactor factorize(const BandSystem& m) {
    const std::size_t n = m.d0.size();
    BandFactor f;
    f.d.assign(n, 0.0);
    f.l1.assign(n, 0.0);
    f.l2.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 2) f.l2[i] = m.d2[i - 2] / f.d[i - 2];
        if (i >= 1) {
            double v = m.d1[i - 1];
            if (i >= 2) v -= f.l2[i] * f.d[i - 2] * f.l1[i - 1];
            f.l1[i] = v / f.d[i - 1];
        }
        double v = m.d0[i];
        if (i >= 1) v -= f.l1[i] * f.l1[i] * f.d[i - 1];
        if (i >= 2) v -= f.l2[i] * f.l2[i] * f.d[i - 2];
        f.d[i] = v;
    }
    return f;
}

std::vector<double> solve(const BandFactor& f, std::vector<double> rhs) {
    const std::size_t n = f.d.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 1) rhs[i] -= f.l1[i] * rhs[i - 1];
        if (i >= 2) rhs[i] -= f.l2[i] * rhs[i - 2];
    }
    for (std::size_t i = 0; i < n; ++i) rhs[i] /= f.d[i];
    for (std::size_t i = n; i-- > 0;) {
        if (i + 1 < n) rhs[i] -= f.l1[i + 1] * rhs[i + 1];
        if (i + 2 < n) rhs[i] -= f.l2[i + 2] * rhs[i + 2];
    }
    return rhs;
}

// Band of the inverse via the Takahashi equations: entries of M^-1 within
// the bandwidth, computed backward from the LDL^T factors.
struct InverseBand {
    std::vector<double> z0, z1, z2;
};

InverseBand inverse_band(const BandFactor& f) {
    const std::size_t n = f.d.size();
    InverseBand z;
    z.z0.assign(n, 0.0);
    z.z1.assign(n, 0.0);
    z.z2.assign(n, 0.0);
    auto zsym = [&](std::size_t r, std::size_t c) {
        const std::size_t i = std::min(r, c), j = std::max(r, c);
        if (j - i == 0) return z.z0[i];
        if (j - i == 1) return z.z1[i];
        return z.z2[i];
    };
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t off = 3; off-- > 0;) {
            const std::size_t j = i + off;
            if (j >= n) continue;
            double v = (off == 0) ? 1.0 / f.d[i] : 0.0;
            if (i + 1 < n) v -= f.l1[i + 1] * zsym(i + 1, j);
            if (i + 2 < n) v -= f.l2[i + 2] * zsym(i + 2, j);
            if (off == 0) z.z0[i] = v;
            else if (off == 1) z.z1[i] = v;
            else z.z2[i] = v;
        }
    }
    return z;
}

struct SplineSolution {
    std::vector<double> fitted;
    std::vector<double> gamma; // interior second derivatives
    double rss = 0.0;
    double trace = 0.0; // trace of the smoother matrix
};

SplineSolution solve_spline(const std::vector<double>& y, double lambda) {
    const std::size_t n = y.size();
    const std::size_t nn = n - 2;

    std::vector<double> qty(nn);
    for (std::size_t j = 0; j < nn; ++j) qty[j] = y[j] - 2.0 * y[j + 1] + y[j + 2];

    const BandSystem m = build_system(nn, lambda);
    const BandFactor f = factorize(m);

    SplineSolution sol;
    sol.gamma = solve(f, qty);

    auto g = [&](std::ptrdiff_t j) {
        return (j >= 0 && j < static_cast<std::ptrdiff_t>(nn)) ? sol.gamma[j] : 0.0;
    };
    sol.fitted.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r);
        const double residual = lambda * (g(rr) - 2.0 * g(rr - 1) + g(rr - 2));
        sol.fitted[r] = y[r] - residual;
        sol.rss += residual * residual;
    }

    // trace(A) = n - lambda * trace(M^-1 QtQ) with QtQ = [1,-4,6,-4,1].
    const InverseBand z = inverse_band(f);
    double tr = 0.0;
    for (std::size_t i = 0; i < nn; ++i) tr += 6.0 * z.z0[i];
    for (std::size_t i = 0; i + 1 < nn; ++i) tr -= 8.0 * z.z1[i];
    for (std::size_t i = 0; i + 2 < nn; ++i) tr += 2.0 * z.z2[i];
    sol.trace = static_cast<double>(n) - lambda * tr;
    return sol;
}

} // namespace

SplineFit fit_spline(const std::vector<double>& y, const SplineOptions& opts, double& sigma_out) {
    const std::size_t n = y.size();
    const double n_real = static_cast<double>(n);

    double best_gcv = std::numeric_limits<double>::infinity();
    double best_lambda = opts.lambda_max;
    SplineSolution best;

    const int grid = std::max(2, opts.grid_size);
    const double log_lo = std::log(opts.lambda_min), log_hi = std::log(opts.lambda_max);
    for (int i = 0; i < grid; ++i) {
        const double lambda =
            std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / (grid - 1));
        SplineSolution sol = solve_spline(y, lambda);
        const double denom = n_real - sol.trace;
        const double gcv = denom > 0.0 ? n_real * sol.rss / (denom * denom)
                                       : std::numeric_limits<double>::infinity();
        // <= prefers the larger (smoother) lambda on ties.
        if (gcv <= best_gcv) {
            best_gcv = gcv;
            best_lambda = lambda;
            best = std::move(sol);
        }
    }

    SplineFit fit;
    fit.lambda = best_lambda;
    fit.gcv = best_gcv;
    fit.edf = best.trace;
    fit.last_fitted = best.fitted[n - 1];
    // Natural boundary: zero curvature at the last knot, so the spline leaves
    // the data linearly with this slope.
    fit.boundary_slope =
        best.fitted[n - 1] - best.fitted[n - 2] + (best.gamma.empty() ? 0.0 : best.gamma.back() / 6.0);

    const double df = std::max(1.0, n_real - best.trace);
    sigma_out = std::sqrt(best.rss / df);
    return fit;
}

std::vector<double> forecast_spline(const SplineFit& fit, std::size_t k) {
    std::vector<double> out;
    out.reserve(k);
    for (std::size_t h = 1; h <= k; ++h) {
        out.push_back(fit.last_fitted + static_cast<double>(h) * fit.boundary_slope);
    }
    return out;
}

} // namespace epimod::detail
