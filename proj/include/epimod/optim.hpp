#pragma once

#include <functional>
#include <vector>

namespace epimod {

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Derivative-free simplex minimization of fn starting at x0. step sets the
/// initial simplex edge per coordinate. Deterministic for fixed inputs.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             const std::vector<double>& x0, const std::vector<double>& step,
                             int max_evaluations = 2000, double x_tol = 1e-9,
                             double f_tol = 1e-12);

struct GoldenSectionResult {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section minimization of fn on [lo, hi]. Endpoints are evaluated and
/// kept as candidates, so a boundary minimum is returned exactly.
GoldenSectionResult golden_section(const std::function<double(double)>& fn, double lo, double hi,
                                   double x_tol = 0.0, int max_iterations = 200);

} // namespace epimod
