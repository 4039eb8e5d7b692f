#pragma once

#include "epimod/series.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace epimod::sir {

/// Compartmental rates and initial conditions, in per-period units.
struct SirParams {
    double beta = 0.3;     // transmission rate, >= 0
    double gamma = 0.1;    // recovery rate, > 0
    double s0 = 0.9999;    // initial susceptible proportion
    double i0 = 1e-4;      // initial infected proportion
    double r0_init = 0.0;  // initial recovered proportion
    double dt = 0.05;      // integration step in periods, <= 1, must divide 1
    double population = 1e6;
};

struct SirState {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
};

/// Ordered (time, beta) change points applied during simulation; time is in
/// periods from the start. Realizes multi-wave scenarios via step changes in
/// the transmission rate.
struct WaveSchedule {
    std::vector<std::pair<double, double>> changes;

    double beta_at(double time, double initial_beta) const;
};

/// Throws Error(InvalidArgument) when rates, proportions or dt are out of range.
void validate_params(const SirParams& params);
void validate_schedule(const WaveSchedule& schedule);

/// One explicit Euler step of dS = -beta*S*I, dI = beta*S*I - gamma*I,
/// dR = gamma*I. Components are clipped to [0,1] and R is set to the
/// remainder 1 - S - I, renormalizing the state onto the simplex.
SirState step(const SirState& state, const SirParams& params);

/// Sub-step states from t=0 to t=n_periods (inclusive endpoints), beta taken
/// from the schedule. states.size() == n_periods/dt + 1.
std::vector<SirState> simulate_states(const SirParams& params, const WaveSchedule& schedule,
                                      std::size_t n_periods);

/// Per-period incidence -dS * population aggregated over the dt sub-steps of
/// each period. Values are nonnegative for beta >= 0.
EpidemicSeries simulate_incidence(const SirParams& params, const WaveSchedule& schedule,
                                  std::size_t n_periods, const std::string& location = "sim",
                                  Date start_date = Date(2021, 1, 1),
                                  Cadence cadence = Cadence::daily);

/// Max over t of |S(t) - S0 * exp(-beta * trapz(I, 0..t))| for a trajectory
/// integrated with constant beta. A self-consistency probe of the integrator
/// against the closed-form survival function.
double check_survival_identity(const std::vector<SirState>& states, double beta, double dt);

/// Named scenario presets used by the CLI and the test suites.
struct Scenario {
    SirParams params;
    WaveSchedule schedule;
    std::size_t n_periods = 0;
};

/// Single epidemic wave, one local maximum in incidence.
Scenario one_wave_scenario();

/// Mild first wave, then a beta step-up after it recedes: two incidence peaks
/// separated by a trough.
Scenario two_wave_scenario();

Scenario scenario_by_name(const std::string& name);

/// Multiplies each value by a seeded lognormal factor exp(sigma*z - sigma^2/2).
/// Deterministic across platforms (mt19937 + Box-Muller, no std distributions).
EpidemicSeries add_observation_noise(const EpidemicSeries& series, double sigma,
                                     unsigned long long seed);

} // namespace epimod::sir
