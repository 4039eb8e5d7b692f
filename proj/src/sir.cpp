#include "epimod/sir.hpp"

#include "epimod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace epimod::sir {

double WaveSchedule::beta_at(double time, double initial_beta) const {
    double beta = initial_beta;
    for (const auto& [t, b] : changes) {
        if (time >= t) beta = b;
        else break;
    }
    return beta;
}

void validate_params(const SirParams& params) {
    if (!(params.beta >= 0.0)) throw_error(Errc::InvalidArgument, "beta must be >= 0");
    if (!(params.gamma > 0.0)) throw_error(Errc::InvalidArgument, "gamma must be > 0");
    if (!(params.dt > 0.0 && params.dt <= 1.0)) {
        throw_error(Errc::InvalidArgument, "dt must be in (0, 1]");
    }
    const double steps = 1.0 / params.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9) {
        throw_error(Errc::InvalidArgument, "dt must divide one period evenly");
    }
    if (!(params.population > 0.0)) throw_error(Errc::InvalidArgument, "population must be > 0");
    for (double p : {params.s0, params.i0, params.r0_init}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw_error(Errc::InvalidArgument, "initial proportions must lie in [0,1]");
        }
    }
    if (std::abs(params.s0 + params.i0 + params.r0_init - 1.0) > 1e-12) {
        throw_error(Errc::InvalidArgument, "s0 + i0 + r0_init must equal 1");
    }
}

void validate_schedule(const WaveSchedule& schedule) {
    double prev = -1.0;
    for (const auto& [t, b] : schedule.changes) {
        if (t <= prev) throw_error(Errc::InvalidArgument, "schedule times must be strictly increasing");
        if (!(b >= 0.0)) throw_error(Errc::InvalidArgument, "schedule betas must be >= 0");
        prev = t;
    }
}

SirState step(const SirState& state, const SirParams& params) {
    const double flow_si = params.beta * state.s * state.i * params.dt;
    const double flow_ir = params.gamma * state.i * params.dt;
    SirState next;
    next.s = std::clamp(state.s - flow_si, 0.0, 1.0);
    next.i = std::clamp(state.i + flow_si - flow_ir, 0.0, 1.0);
    // R absorbs the remainder, which keeps s+i+r at 1 without perturbing the
    // S trajectory by rounding.
    next.r = std::clamp(1.0 - next.s - next.i, 0.0, 1.0);
    return next;
}

std::vector<SirState> simulate_states(const SirParams& params, const WaveSchedule& schedule,
                                      std::size_t n_periods) {
    validate_params(params);
    validate_schedule(schedule);
    const std::size_t steps_per_period = static_cast<std::size_t>(std::round(1.0 / params.dt));
    const std::size_t total_steps = steps_per_period * n_periods;

    std::vector<SirState> states;
    states.reserve(total_steps + 1);
    states.push_back({params.s0, params.i0, params.r0_init});

    SirParams current = params;
    for (std::size_t n = 0; n < total_steps; ++n) {
        const double time = static_cast<double>(n) * params.dt;
        current.beta = schedule.beta_at(time, params.beta);
        states.push_back(step(states.back(), current));
    }
    return states;
}

EpidemicSeries simulate_incidence(const SirParams& params, const WaveSchedule& schedule,
                                  std::size_t n_periods, const std::string& location,
                                  Date start_date, Cadence cadence) {
    if (n_periods < 1) throw_error(Errc::InvalidArgument, "n_periods must be >= 1");
    const auto states = simulate_states(params, schedule, n_periods);
    const std::size_t steps_per_period = (states.size() - 1) / n_periods;

    EpidemicSeries series;
    series.location = location;
    series.cadence = cadence;
    series.start_date = start_date;
    series.values.reserve(n_periods);
    for (std::size_t p = 0; p < n_periods; ++p) {
        const double s_begin = states[p * steps_per_period].s;
        const double s_end = states[(p + 1) * steps_per_period].s;
        series.values.push_back(std::max(0.0, (s_begin - s_end) * params.population));
    }
    return series;
}

double check_survival_identity(const std::vector<SirState>& states, double beta, double dt) {
    double max_deviation = 0.0;
    double integral = 0.0; // trapezoidal accumulation of I
    const double s0 = states.empty() ? 0.0 : states.front().s;
    for (std::size_t n = 0; n < states.size(); ++n) {
        if (n > 0) {
            integral += 0.5 * (states[n - 1].i + states[n].i) * dt;
        }
        const double closed_form = s0 * std::exp(-beta * integral);
        max_deviation = std::max(max_deviation, std::abs(states[n].s - closed_form));
    }
    return max_deviation;
}

Scenario one_wave_scenario() {
    Scenario sc;
    sc.params.beta = 0.3;
    sc.params.gamma = 0.1;
    sc.params.i0 = 1e-4;
    sc.params.s0 = 1.0 - sc.params.i0;
    sc.params.r0_init = 0.0;
    sc.params.dt = 0.05;
    sc.params.population = 1e6;
    sc.n_periods = 160;
    return sc;
}

Scenario two_wave_scenario() {
    Scenario sc;
    sc.params.beta = 0.26;
    sc.params.gamma = 0.2;
    sc.params.i0 = 5e-4;
    sc.params.s0 = 1.0 - sc.params.i0;
    sc.params.r0_init = 0.0;
    sc.params.dt = 0.05;
    sc.params.population = 1e6;
    sc.schedule.changes = {{160.0, 0.52}};
    sc.n_periods = 300;
    return sc;
}

Scenario scenario_by_name(const std::string& name) {
    if (name == "one-wave") return one_wave_scenario();
    if (name == "two-wave") return two_wave_scenario();
    throw_error(Errc::InvalidArgument, "unknown scenario '" + name + "'");
}

EpidemicSeries add_observation_noise(const EpidemicSeries& series, double sigma,
                                     unsigned long long seed) {
    if (!(sigma >= 0.0)) throw_error(Errc::InvalidArgument, "noise sigma must be >= 0");
    EpidemicSeries noisy = series;
    if (sigma == 0.0) return noisy;

    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    auto uniform01 = [&rng]() {
        // 53-bit mantissa uniform in (0,1); avoids the unspecified layout of
        // std::uniform_real_distribution.
        const std::uint64_t hi = rng() >> 5, lo = rng() >> 6;
        const double u = (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) /
                         9007199254740992.0;
        return std::max(u, 1e-300);
    };
    for (double& v : noisy.values) {
        const double u1 = uniform01(), u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        v = std::max(0.0, v * std::exp(sigma * z - 0.5 * sigma * sigma));
    }
    return noisy;
}

} // namespace epimod::sir
