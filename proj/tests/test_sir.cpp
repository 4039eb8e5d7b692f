#include "epimod/sir.hpp"

#include "epimod/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace epimod;
using namespace epimod::sir;

namespace {

int count_local_maxima(const std::vector<double>& v) {
    int count = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) ++count;
    }
    return count;
}

} // namespace

TEST_CASE("step with beta=0 keeps S and decays I geometrically") {
    SirParams params;
    params.beta = 0.0;
    params.gamma = 0.1;
    params.dt = 0.5;
    const SirState state{0.7, 0.2, 0.1};
    const SirState next = step(state, params);
    CHECK(next.s == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(next.i == doctest::Approx(0.2 * (1.0 - 0.1 * 0.5)).epsilon(1e-14));
}

TEST_CASE("step at the disease-free equilibrium is the identity") {
    SirParams params;
    const SirState state{0.6, 0.0, 0.4};
    const SirState next = step(state, params);
    CHECK(next.s == 0.6);
    CHECK(next.i == 0.0);
    CHECK(next.r == 0.4);
}

TEST_CASE("one Euler step tracks a fine-step RK4 reference") {
    SirParams params;
    params.beta = 0.3;
    params.gamma = 0.1;
    params.dt = 0.1;
    const SirState state{0.99, 0.01, 0.0};
    const SirState euler = step(state, params);
    const SirState reference = oracles::rk4_sir(state, 0.3, 0.1, 0.1, 1e-4);
    CHECK(std::abs(euler.s - reference.s) <= 1e-3);
    CHECK(std::abs(euler.i - reference.i) <= 1e-3);
    CHECK(std::abs(euler.r - reference.r) <= 1e-3);
}

TEST_CASE("simulate_incidence with beta=0 yields zero incidence") {
    SirParams params;
    params.beta = 0.0;
    params.gamma = 0.2;
    params.i0 = 0.01;
    params.s0 = 0.99;
    const auto series = simulate_incidence(params, {}, 50);
    for (const double v : series.values) CHECK(v == 0.0);
}

TEST_CASE("single wave incidence is unimodal") {
    const Scenario sc = one_wave_scenario();
    const auto series = simulate_incidence(sc.params, sc.schedule, sc.n_periods);
    CHECK(count_local_maxima(series.values) == 1);
    validate_series(series);
}

TEST_CASE("beta step-up after the first wave produces two peaks and a trough") {
    const Scenario sc = two_wave_scenario();
    const auto series = simulate_incidence(sc.params, sc.schedule, sc.n_periods);
    CHECK(count_local_maxima(series.values) == 2);

    // Identify the two peaks and the trough between them.
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        if (series.values[i] > series.values[i - 1] && series.values[i] > series.values[i + 1]) {
            peaks.push_back(i);
        }
    }
    REQUIRE(peaks.size() == 2);
    double trough = series.values[peaks[0]];
    for (std::size_t i = peaks[0]; i <= peaks[1]; ++i) trough = std::min(trough, series.values[i]);
    CHECK(trough < 0.5 * series.values[peaks[0]]);
    CHECK(trough < 0.5 * series.values[peaks[1]]);
}

TEST_CASE("conservation holds at every step") {
    const Scenario sc = two_wave_scenario();
    const auto states = simulate_states(sc.params, sc.schedule, sc.n_periods);
    for (const auto& s : states) {
        CHECK(std::abs(s.s + s.i + s.r - 1.0) <= 1e-8);
    }
}

TEST_CASE("susceptibles never increase") {
    const Scenario sc = two_wave_scenario();
    const auto states = simulate_states(sc.params, sc.schedule, sc.n_periods);
    for (std::size_t n = 1; n < states.size(); ++n) {
        CHECK(states[n].s <= states[n - 1].s + 1e-15);
    }
}

TEST_CASE("per-period incidence equals the drop in S times population") {
    const Scenario sc = one_wave_scenario();
    const auto series = simulate_incidence(sc.params, sc.schedule, sc.n_periods);
    const auto states = simulate_states(sc.params, sc.schedule, sc.n_periods);
    const std::size_t steps = (states.size() - 1) / sc.n_periods;
    for (std::size_t p = 0; p < sc.n_periods; ++p) {
        const double drop =
            (states[p * steps].s - states[(p + 1) * steps].s) * sc.params.population;
        CHECK(std::abs(series.values[p] - drop) <= 1e-9);
    }
}

TEST_CASE("survival identity") {
    SUBCASE("beta=0 matches exactly") {
        SirParams params;
        params.beta = 0.0;
        params.gamma = 0.1;
        params.i0 = 0.01;
        params.s0 = 0.99;
        const auto states = simulate_states(params, {}, 30);
        CHECK(check_survival_identity(states, 0.0, params.dt) == 0.0);
    }
    SUBCASE("fine-step single wave stays within 1e-3 and improves as dt halves") {
        SirParams params;
        params.beta = 0.3;
        params.gamma = 0.1;
        params.i0 = 1e-4;
        params.s0 = 1.0 - 1e-4;
        params.dt = 0.01;
        const auto states = simulate_states(params, {}, 160);
        const double dev = check_survival_identity(states, params.beta, params.dt);
        CHECK(dev <= 1e-3);

        params.dt = 0.005;
        const auto finer = simulate_states(params, {}, 160);
        const double dev_finer = check_survival_identity(finer, params.beta, params.dt);
        CHECK(dev_finer <= dev);
    }
}

TEST_CASE("sub-critical outbreak stays below 5% cumulative incidence") {
    SirParams params;
    params.beta = 0.1;
    params.gamma = 0.1;
    params.i0 = 1e-4;
    params.s0 = 1.0 - 1e-4;
    const auto series = simulate_incidence(params, {}, 400);
    double cumulative = 0.0;
    for (const double v : series.values) cumulative += v;
    CHECK(cumulative <= 0.05 * params.population);
}

TEST_CASE("invalid parameters are rejected") {
    SirParams params;
    params.gamma = 0.0;
    CHECK_THROWS_AS(validate_params(params), Error);
    params = SirParams{};
    params.s0 = 0.9; // sum != 1
    CHECK_THROWS_AS(validate_params(params), Error);
    params = SirParams{};
    params.dt = 0.3; // does not divide a period
    CHECK_THROWS_AS(validate_params(params), Error);

    WaveSchedule schedule;
    schedule.changes = {{10.0, 0.5}, {5.0, 0.4}};
    CHECK_THROWS_AS(validate_schedule(schedule), Error);
}

TEST_CASE("observation noise is seeded and preserves nonnegativity") {
    const Scenario sc = one_wave_scenario();
    const auto series = simulate_incidence(sc.params, sc.schedule, sc.n_periods);
    const auto a = add_observation_noise(series, 0.05, 99);
    const auto b = add_observation_noise(series, 0.05, 99);
    const auto c = add_observation_noise(series, 0.05, 100);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    validate_series(a);
}
