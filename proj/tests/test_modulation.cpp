#include "epimod/modulation.hpp"

#include "epimod/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace epimod;

namespace {

EpidemicSeries make_series(std::vector<double> values) {
    EpidemicSeries s;
    s.location = "US";
    s.cadence = Cadence::daily;
    s.start_date = Date(2021, 3, 1);
    s.values = std::move(values);
    return s;
}

ModulationMode cumulative_mode() { return {}; }

ModulationMode total_mode() {
    ModulationMode mode;
    mode.window = ModulationMode::Window::total_window;
    return mode;
}

} // namespace

TEST_CASE("theta zero is an exact identity in all modes") {
    oracles::Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> point(1 + rng.index(28));
        for (auto& v : point) v = rng.uniform(0.0, 5000.0);
        for (const auto& mode : {cumulative_mode(), total_mode()}) {
            CHECK(modulate(point, Theta{0.0, 123.0}, mode) == point);
        }
    }
}

TEST_CASE("hand-evaluated exponentials for a flat trajectory") {
    const std::vector<double> point{100.0, 100.0, 100.0};
    const Theta theta{0.001, 1.0}; // effective rate 0.001

    const auto cumulative = modulate(point, theta, cumulative_mode());
    CHECK(cumulative[0] == doctest::Approx(100.0 * std::exp(-0.1)).epsilon(1e-12));
    CHECK(cumulative[1] == doctest::Approx(100.0 * std::exp(-0.2)).epsilon(1e-12));
    CHECK(cumulative[2] == doctest::Approx(100.0 * std::exp(-0.3)).epsilon(1e-12));
    CHECK(cumulative[0] == doctest::Approx(90.4837).epsilon(1e-5));
    CHECK(cumulative[1] == doctest::Approx(81.8731).epsilon(1e-5));
    CHECK(cumulative[2] == doctest::Approx(74.0818).epsilon(1e-5));

    const auto total = modulate(point, theta, total_mode());
    for (const double v : total) CHECK(v == doctest::Approx(74.0818).epsilon(1e-5));
}

TEST_CASE("larger forecasted burden shrinks relatively more") {
    const Theta theta{0.001, 1.0};
    const auto small = modulate({10.0, 10.0}, theta, cumulative_mode());
    const auto large = modulate({100.0, 100.0}, theta, cumulative_mode());
    for (std::size_t h = 0; h < 2; ++h) {
        CHECK(large[h] / 100.0 < small[h] / 10.0);
    }
}

TEST_CASE("modulated values never exceed the base and never go negative") {
    oracles::Rng rng(13);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> point(1 + rng.index(20));
        for (auto& v : point) v = rng.uniform(0.0, 3000.0);
        const Theta theta{rng.uniform(0.0, 5.0), rng.uniform(1.0, 3000.0)};
        for (const auto& mode : {cumulative_mode(), total_mode()}) {
            const auto out = modulate(point, theta, mode);
            for (std::size_t h = 0; h < point.size(); ++h) {
                CHECK(out[h] <= point[h]);
                CHECK(out[h] >= 0.0);
            }
        }
    }
}

TEST_CASE("modulation factor stays in (0, 1] for bounded exponents") {
    oracles::Rng rng(14);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> point(1 + rng.index(20));
        double total = 0.0;
        for (auto& v : point) {
            v = rng.uniform(1.0, 3000.0);
            total += v;
        }
        const Theta theta{rng.uniform(0.0, 50.0) / total, 1.0};
        const auto out = modulate(point, theta, cumulative_mode());
        for (std::size_t h = 0; h < point.size(); ++h) {
            CHECK(out[h] > 0.0);
            CHECK(out[h] <= point[h]);
        }
    }
}

TEST_CASE("negative forecast input is rejected") {
    CHECK_THROWS_AS(modulate({10.0, -1.0}, Theta{0.1, 1.0}, cumulative_mode()), Error);
    try {
        modulate({10.0, -1.0}, Theta{0.1, 1.0}, cumulative_mode());
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NegativeForecastInput);
    }
}

TEST_CASE("history burden only enters when the mode asks for it") {
    const std::vector<double> point{50.0, 50.0};
    const Theta theta{0.002, 1.0};
    ModulationMode with_history = cumulative_mode();
    with_history.include_history = true;

    const auto plain = modulate(point, theta, cumulative_mode(), 400.0);
    const auto burdened = modulate(point, theta, with_history, 400.0);
    const double extra = std::exp(-0.002 * 400.0);
    for (std::size_t h = 0; h < 2; ++h) {
        CHECK(burdened[h] == doctest::Approx(plain[h] * extra).epsilon(1e-12));
    }
}

TEST_CASE("modulate_quantiles with theta zero preserves everything") {
    oracles::Rng rng(17);
    const auto fs = oracles::random_forecast_set(rng);
    const auto out = modulate_quantiles(fs, Theta{0.0, 1.0}, cumulative_mode());
    CHECK(out.point == fs.point);
    for (std::size_t q = 0; q < fs.quantiles.size(); ++q) {
        CHECK(out.quantiles[q].level == fs.quantiles[q].level);
        CHECK(out.quantiles[q].values == fs.quantiles[q].values);
    }
}

TEST_CASE("monotone rearrangement repairs induced quantile crossings") {
    ForecastSet fs;
    fs.location = "US";
    fs.point = {500.0, 500.0};
    fs.quantiles.push_back({0.25, {100.0, 100.0}});
    fs.quantiles.push_back({0.75, {2000.0, 2000.0}});

    // Find a rate where per-track modulation crosses the raw trajectories.
    double crossing_rate = -1.0;
    for (double rate = 1e-5; rate < 1.0; rate *= 1.5) {
        const auto lo = modulate(fs.quantiles[0].values, Theta{rate, 1.0}, cumulative_mode());
        const auto hi = modulate(fs.quantiles[1].values, Theta{rate, 1.0}, cumulative_mode());
        if (hi[0] < lo[0] || hi[1] < lo[1]) {
            crossing_rate = rate;
            break;
        }
    }
    REQUIRE(crossing_rate > 0.0);

    const auto out = modulate_quantiles(fs, Theta{crossing_rate, 1.0}, cumulative_mode());
    CHECK_NOTHROW(validate_forecast_set(out));
    for (std::size_t h = 0; h < 2; ++h) {
        CHECK(out.quantiles[1].values[h] >= out.quantiles[0].values[h]);
    }
}

TEST_CASE("a single quantile level modulates exactly like its trajectory") {
    ForecastSet fs;
    fs.location = "US";
    fs.point = {40.0, 60.0};
    fs.quantiles.push_back({0.5, {45.0, 70.0}});
    const Theta theta{0.004, 1.0};
    const auto out = modulate_quantiles(fs, theta, cumulative_mode());
    CHECK(out.quantiles[0].values == modulate(fs.quantiles[0].values, theta, cumulative_mode()));
}

TEST_CASE("modulate_quantiles requires quantiles") {
    ForecastSet fs;
    fs.point = {1.0};
    CHECK_THROWS_AS(modulate_quantiles(fs, Theta{0.0, 1.0}, cumulative_mode()), Error);
}

TEST_CASE("prediction error") {
    auto truth = make_series({10, 12, 14, 16, 18, 20});

    SUBCASE("perfect forecasts at theta zero give zero error") {
        ForecastSet fs;
        fs.origin_index = 2;
        fs.point = {14, 16};
        CHECK(prediction_error(truth, {fs}, Theta{0.0, 1.0}, cumulative_mode()) == 0.0);
    }

    SUBCASE("theta zero equals the independent plain SSE") {
        oracles::Rng rng(23);
        std::vector<ForecastSet> forecasts;
        for (int rep = 0; rep < 5; ++rep) {
            ForecastSet fs;
            fs.origin_index = rng.index(4);
            fs.point = {rng.uniform(0, 30), rng.uniform(0, 30)};
            forecasts.push_back(fs);
        }
        const double via_modulation =
            prediction_error(truth, forecasts, Theta{0.0, 1.0}, cumulative_mode());
        CHECK(via_modulation == oracles::plain_sse(truth, forecasts));
    }

    SUBCASE("analytic zero of a one-point instance") {
        auto small_truth = make_series({5, 8});
        ForecastSet fs;
        fs.origin_index = 1;
        fs.point = {10.0};
        const double rate = std::log(10.0 / 8.0) / 10.0;
        const double err =
            prediction_error(small_truth, {fs}, Theta{rate, 1.0}, cumulative_mode());
        CHECK(err <= 1e-20);
    }

    SUBCASE("origin beyond truth is rejected") {
        ForecastSet fs;
        fs.origin_index = 5;
        fs.point = {1.0, 1.0};
        CHECK_THROWS_AS(prediction_error(truth, {fs}, Theta{0.0, 1.0}, cumulative_mode()), Error);
    }
}

namespace {

// Noisy single-wave series where trend extrapolation overshoots the peak.
EpidemicSeries wave_series(std::size_t n, std::uint32_t seed) {
    const sir::Scenario sc = sir::one_wave_scenario();
    auto series = sir::simulate_incidence(sc.params, sc.schedule, std::max<std::size_t>(n, 40));
    series.values.resize(n);
    return sir::add_observation_noise(series, 0.05, seed);
}

} // namespace

TEST_CASE("theta is zero on strictly growing truth") {
    std::vector<double> y;
    for (int t = 0; t < 60; ++t) y.push_back(2.0 * std::pow(1.06, t));
    const auto truth = make_series(std::move(y));

    const auto est =
        estimate_theta(truth, ForecasterSpec::of(ForecasterKind::holt), 7, cumulative_mode());
    CHECK(est.theta.value == 0.0);
    CHECK(est.objective_at_optimum == est.objective_at_zero);

    // Dense grid confirms the objective really is minimized at zero.
    ForecastCache cache;
    std::vector<ForecastSet> forecasts;
    for (std::size_t origin = min_history(ForecasterKind::holt); origin + 7 <= truth.size();
         ++origin) {
        EpidemicSeries prefix = truth;
        prefix.values.resize(origin);
        forecasts.push_back(forecast(fit(ForecasterSpec::of(ForecasterKind::holt), prefix), 7));
    }
    const double hi = 10.0 / *std::max_element(truth.values.begin(), truth.values.end());
    const auto grid = oracles::dense_theta_grid(truth, forecasts, cumulative_mode(), hi, 2000);
    CHECK(grid.rate == 0.0);
}

TEST_CASE("theta becomes positive across a simulated peak") {
    const auto truth = wave_series(120, 31);
    const auto spec = ForecasterSpec::of(ForecasterKind::spline);
    const auto est = estimate_theta(truth, spec, 14, cumulative_mode());
    CHECK(est.theta.value > 0.0);
    CHECK(est.objective_at_optimum < est.objective_at_zero);

    // The golden-section optimum matches a dense grid scan.
    ForecastCache cache;
    std::vector<ForecastSet> forecasts;
    for (std::size_t origin = min_history(ForecasterKind::spline); origin + 14 <= truth.size();
         ++origin) {
        EpidemicSeries prefix = truth;
        prefix.values.resize(origin);
        forecasts.push_back(forecast(fit(spec, prefix), 14));
    }
    const auto grid = oracles::dense_theta_grid(truth, forecasts, cumulative_mode(),
                                                est.bracket.second, 10000);
    CHECK(est.objective_at_optimum <= grid.value * (1.0 + 1e-6));
}

TEST_CASE("fixed theta skips optimization but reports diagnostics") {
    const auto truth = wave_series(80, 57);
    EstimateOptions options;
    options.fixed_theta = Theta{0.25, 100.0};
    const auto est = estimate_theta(truth, ForecasterSpec::of(ForecasterKind::holt), 7,
                                    cumulative_mode(), options);
    CHECK(est.theta.value == 0.25);
    CHECK(est.theta.scale == 100.0);
    CHECK(est.objective_at_zero > 0.0);
    CHECK(est.origins_used > 0);
}

TEST_CASE("estimate_theta needs at least one admissible origin") {
    const auto truth = make_series(std::vector<double>(10, 3.0));
    CHECK_THROWS_AS(
        estimate_theta(truth, ForecasterSpec::of(ForecasterKind::holt), 7, cumulative_mode()),
        Error);
}

TEST_CASE("shared cache does not change the estimate") {
    const auto truth = wave_series(90, 101);
    const auto spec = ForecasterSpec::of(ForecasterKind::holt);
    const auto plain = estimate_theta(truth, spec, 7, cumulative_mode());

    ForecastCache cache;
    EstimateOptions options;
    options.cache = &cache;
    const auto cached_1 = estimate_theta(truth, spec, 7, cumulative_mode(), options);
    const auto cached_2 = estimate_theta(truth, spec, 7, cumulative_mode(), options);
    CHECK(cached_1.theta.value == plain.theta.value);
    CHECK(cached_2.theta.value == plain.theta.value);
    CHECK(cached_2.objective_at_optimum == plain.objective_at_optimum);
}

TEST_CASE("rescaling truth rescales the effective rate") {
    const auto truth = wave_series(100, 71);
    auto scaled = truth;
    const double c = 40.0;
    for (double& v : scaled.values) v *= c;

    const auto spec = ForecasterSpec::of(ForecasterKind::holt);
    const auto base = estimate_theta(truth, spec, 7, cumulative_mode());
    const auto big = estimate_theta(scaled, spec, 7, cumulative_mode());
    REQUIRE(base.theta.value > 0.0);
    CHECK(big.theta.effective() * c ==
          doctest::Approx(base.theta.effective()).epsilon(1e-3));
}

TEST_CASE("objective at optimum never exceeds the zero objective") {
    for (std::uint32_t seed : {5u, 6u, 7u, 8u}) {
        const auto truth = wave_series(70 + 10 * (seed % 3), seed);
        const auto est =
            estimate_theta(truth, ForecasterSpec::of(ForecasterKind::holt), 7, cumulative_mode());
        CHECK(est.objective_at_optimum <= est.objective_at_zero);
    }
}
