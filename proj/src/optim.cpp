#include "epimod/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epimod {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             const std::vector<double>& x0, const std::vector<double>& step,
                             int max_evaluations, double x_tol, double f_tol) {
    const std::size_t n = x0.size();
    NelderMeadResult result;
    result.x = x0;
    if (n == 0) {
        result.value = fn(x0);
        result.evaluations = 1;
        return result;
    }

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += step[i] != 0.0 ? step[i] : 0.1;
    }
    std::vector<double> values(n + 1);
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = fn(simplex[i]);
        ++evals;
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), candidate(n);

    while (evals < max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

        const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            spread = std::max(spread, std::abs(simplex[worst][i] - simplex[best][i]));
        }
        const double f_spread = std::abs(values[worst] - values[best]);
        if (spread <= x_tol * (1.0 + spread) && f_spread <= f_tol * (1.0 + std::abs(values[best]))) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

        auto blend = [&](double coeff) {
            for (std::size_t j = 0; j < n; ++j) {
                candidate[j] = centroid[j] + coeff * (simplex[worst][j] - centroid[j]);
            }
        };

        blend(-alpha);
        const double f_reflect = fn(candidate);
        ++evals;

        if (f_reflect < values[best]) {
            std::vector<double> reflect = candidate;
            blend(-gamma);
            const double f_expand = fn(candidate);
            ++evals;
            if (f_expand < f_reflect) {
                simplex[worst] = candidate;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if (f_reflect < values[second_worst]) {
            simplex[worst] = candidate;
            values[worst] = f_reflect;
        } else {
            blend(f_reflect < values[worst] ? -rho : rho);
            const double f_contract = fn(candidate);
            ++evals;
            if (f_contract < std::min(f_reflect, values[worst])) {
                simplex[worst] = candidate;
                values[worst] = f_contract;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] = simplex[best][j] + sigma * (simplex[i][j] - simplex[best][j]);
                    }
                    values[i] = fn(simplex[i]);
                    ++evals;
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (values[i] < values[best]) best = i;
    }
    result.x = simplex[best];
    result.value = values[best];
    result.evaluations = evals;
    return result;
}

GoldenSectionResult golden_section(const std::function<double(double)>& fn, double lo, double hi,
                                   double x_tol, int max_iterations) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    if (x_tol <= 0.0) x_tol = 1e-10 * (1.0 + std::abs(hi - lo));

    GoldenSectionResult best;
    best.x = lo;
    best.value = fn(lo);
    const double f_hi = fn(hi);
    if (f_hi < best.value) {
        best.x = hi;
        best.value = f_hi;
    }
    if (hi - lo <= x_tol) return best;

    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = fn(c), fd = fn(d);

    for (int it = 0; it < max_iterations && (b - a) > x_tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = fn(d);
        }
    }
    if (fc < best.value) {
        best.x = c;
        best.value = fc;
    }
    if (fd < best.value) {
        best.x = d;
        best.value = fd;
    }
    return best;
}

} // namespace epimod
