#pragma once

#include "epimod/forecasters.hpp"
#include "epimod/series.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace epimod {

/// Depletion parameter. The exponent applied to a forecast uses the
/// effective rate value/scale, in units of 1/count; scale is the count
/// normalization chosen at estimation time (max observed value) so that the
/// optimizer always searches an O(1) range for value. value == 0 makes
/// modulation the identity.
struct Theta {
    double value = 0.0;
    double scale = 1.0;

    double effective() const { return value / scale; }
};

/// How the exponent accumulates forecast burden.
///   cumulative_window: horizon j is damped by the running sum of forecasts
///     through j (depletion accumulates over the window). Default.
///   total_window: every horizon is damped by the full-window sum.
/// include_history additionally adds the observed pre-origin burden to the
/// exponent (off by default; the exponent then depends on history length).
struct ModulationMode {
    enum class Window { cumulative_window, total_window };
    Window window = Window::cumulative_window;
    bool include_history = false;
};

/// Cross-validation output of estimate_theta.
struct ThetaEstimate {
    Theta theta;
    double objective_at_optimum = 0.0; // adjusted prediction error at theta
    double objective_at_zero = 0.0;    // plain prediction error
    std::size_t origins_used = 0;
    std::pair<double, double> bracket{0.0, 0.0}; // effective-theta search interval
};

/// Applies the susceptible-depletion factor exp(-theta' * burden) to a point
/// trajectory. history_burden is the observed pre-origin sum, used only when
/// mode.include_history is set. Output never exceeds the input elementwise.
/// Throws Error(NegativeForecastInput) on negative input values.
std::vector<double> modulate(const std::vector<double>& point, const Theta& theta,
                             const ModulationMode& mode, double history_burden = 0.0);

/// Modulates the point trajectory and every quantile trajectory (each with
/// its own values in the exponent), then restores per-horizon monotonicity
/// across quantile levels by sorting (monotone rearrangement).
/// Throws Error(NoQuantiles) when fs carries no quantiles.
ForecastSet modulate_quantiles(const ForecastSet& fs, const Theta& theta,
                               const ModulationMode& mode, double history_burden = 0.0);

/// Sum over forecasts and horizons of (modulated point - truth)^2. With
/// theta = 0 this is the unmodulated prediction error. Every forecast must
/// satisfy origin_index + horizons <= truth length.
double prediction_error(const EpidemicSeries& truth, const std::vector<ForecastSet>& forecasts,
                        const Theta& theta, const ModulationMode& mode);

/// Reusable store of per-origin fitted models so rolling estimation does not
/// refit the same (history prefix, spec) pair twice. Not thread-safe; use one
/// instance per worker.
class ForecastCache {
public:
    const FittedModel* find(std::size_t origin) const;
    const FittedModel& put(std::size_t origin, FittedModel model);

private:
    std::map<std::size_t, FittedModel> by_origin_;
};

struct EstimateOptions {
    /// Appendix-style fixed parameter: skip optimization, report diagnostics.
    std::optional<Theta> fixed_theta;
    /// Optional cross-call cache of per-origin fits (owned by the caller).
    ForecastCache* cache = nullptr;
};

/// Cross-validated depletion estimate: fits spec at every admissible origin
/// t* in [min_history(kind), T-k], stores the k-ahead point forecasts, and
/// minimizes the adjusted prediction error over effective theta in
/// [0, 10/max(truth)] by golden-section search refined on the best bracket
/// third (three restarts). Prefers theta = 0 when the optimum is not better
/// than the zero objective by more than 1e-10 relative.
/// Throws Error(InsufficientHistory) when no origin is admissible.
ThetaEstimate estimate_theta(const EpidemicSeries& truth, const ForecasterSpec& spec,
                             std::size_t k, const ModulationMode& mode,
                             const EstimateOptions& options = {});

/// Same optimization applied to pre-made forecasts (e.g. ingested hub files)
/// instead of refitting a spec. Forecasts that do not satisfy
/// origin_index + k <= truth length are ignored; throws
/// Error(NoRetrospectiveOrigins) when none qualify and no fixed theta is given.
ThetaEstimate estimate_theta_from_forecasts(const EpidemicSeries& truth,
                                            const std::vector<ForecastSet>& forecasts,
                                            const ModulationMode& mode,
                                            const EstimateOptions& options = {});

} // namespace epimod
