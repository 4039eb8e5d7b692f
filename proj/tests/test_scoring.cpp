#include "epimod/scoring.hpp"

#include "epimod/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace epimod;

TEST_CASE("mae") {
    CHECK(mae({{10, 10}, {20, 20}}) == 0.0);
    CHECK(mae({{10, 12}, {20, 16}}) == 3.0);
    CHECK(mae({{20, 16}, {10, 12}}) == 3.0); // order invariant
    CHECK_THROWS_AS(mae({}), Error);
}

TEST_CASE("interval score reproduces the three-case definition") {
    const IntervalSpec spec{0.2, 5.0, 10.0};
    CHECK(interval_score(7.0, spec) == 5.0);
    CHECK(interval_score(12.0, spec) == 25.0); // 5 + (2/0.2)*2
    CHECK(interval_score(4.0, spec) == 15.0);  // 5 + 10*1
}

TEST_CASE("interval score is continuous, nonnegative, piecewise linear") {
    const IntervalSpec spec{0.1, 3.0, 9.0};
    const double eps = 1e-12;
    CHECK(std::abs(interval_score(3.0 - eps, spec) - interval_score(3.0, spec)) <= 1e-9);
    CHECK(std::abs(interval_score(9.0 + eps, spec) - interval_score(9.0, spec)) <= 1e-9);

    oracles::Rng rng(3);
    for (int rep = 0; rep < 300; ++rep) {
        const double y = rng.uniform(-20.0, 30.0);
        CHECK(interval_score(y, spec) >= 0.0);
        // Linearity on each side: midpoint value matches endpoint average.
        const double y2 = y + 0.5;
        if ((y < 3.0 && y2 < 3.0) || (y > 3.0 && y2 > 3.0 && y < 9.0 && y2 < 9.0) ||
            (y > 9.0 && y2 > 9.0)) {
            const double mid = interval_score((y + y2) / 2.0, spec);
            const double avg = 0.5 * (interval_score(y, spec) + interval_score(y2, spec));
            CHECK(mid == doctest::Approx(avg).epsilon(1e-12));
        }
    }
}

TEST_CASE("wis reproduces both convention examples") {
    // K = 1 interval (alpha 0.2) plus a median.
    const std::vector<std::pair<double, double>> quantiles{{0.1, 5.0}, {0.5, 8.0}, {0.9, 10.0}};

    WisConfig paper = WisConfig::from_levels({0.1, 0.5, 0.9}, WisConvention::paper_literal);
    CHECK(paper.K == 1);
    CHECK(paper.includes_median);
    CHECK(wis(8.0, quantiles, paper) == doctest::Approx(0.5).epsilon(1e-12));

    WisConfig standard = WisConfig::from_levels({0.1, 0.5, 0.9});
    CHECK(wis(8.0, quantiles, standard) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("wis is zero when all quantiles hit the observation") {
    const std::vector<std::pair<double, double>> quantiles{{0.1, 4.0}, {0.5, 4.0}, {0.9, 4.0}};
    for (const auto convention : {WisConvention::paper_literal, WisConvention::standard_half_alpha}) {
        const WisConfig cfg = WisConfig::from_levels({0.1, 0.5, 0.9}, convention);
        CHECK(wis(4.0, quantiles, cfg) == 0.0);
    }
}

TEST_CASE("wis with only a median reduces to absolute error") {
    const std::vector<std::pair<double, double>> quantiles{{0.5, 6.0}};
    for (const auto convention : {WisConvention::paper_literal, WisConvention::standard_half_alpha}) {
        const WisConfig cfg = WisConfig::from_levels({0.5}, convention);
        CHECK(cfg.K == 0);
        CHECK(wis(10.0, quantiles, cfg) == doctest::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("asymmetric levels are rejected") {
    CHECK_THROWS_AS(WisConfig::from_levels({0.2, 0.5, 0.9}), Error);
    try {
        WisConfig::from_levels({0.2, 0.5, 0.9});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AsymmetricQuantiles);
    }
    // Structure mismatch between cfg and data is also rejected.
    const WisConfig cfg = WisConfig::from_levels({0.1, 0.5, 0.9});
    const std::vector<std::pair<double, double>> two_pairs{
        {0.1, 1.0}, {0.25, 2.0}, {0.75, 3.0}, {0.9, 4.0}};
    CHECK_THROWS_AS(wis(2.0, two_pairs, cfg), Error);
}

TEST_CASE("percent improvement") {
    CHECK(percent_improvement(10.0, 9.0) == 10.0);
    CHECK(percent_improvement(10.0, 10.0) == 0.0);
    CHECK_THROWS_AS(percent_improvement(0.0, 1.0), Error);

    // Identity pi(b, m) = 100 * (1 - m/b), checked over random inputs.
    oracles::Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const double b = rng.uniform(0.1, 50.0), m = rng.uniform(0.0, 50.0);
        CHECK(percent_improvement(b, m) ==
              doctest::Approx(100.0 * (1.0 - m / b)).epsilon(1e-14));
    }

    // Consistency illustration: a 4.7 absolute reduction at 12.5% implies a
    // base error near 37.6.
    const double implied_base = 4.7 / 0.125;
    CHECK(implied_base == doctest::Approx(37.6).epsilon(1e-12));
    CHECK(percent_improvement(implied_base, implied_base - 4.7) ==
          doctest::Approx(12.5).epsilon(1e-12));
}

namespace {

ScoreRecord record(const char* date, const char* loc, int horizon, double err) {
    ScoreRecord rec = make_score_record(Date::parse(date), loc, horizon, 0.0, err);
    return rec;
}

} // namespace

TEST_CASE("aggregate") {
    std::vector<ScoreRecord> base{
        record("2022-01-03", "US", 1, 2.0),
        record("2022-01-03", "US", 4, 6.0),
        record("2022-02-07", "CA", 4, 10.0),
    };
    std::vector<ScoreRecord> model{
        record("2022-01-03", "US", 1, 1.0),
        record("2022-01-03", "US", 4, 3.0),
        record("2022-02-07", "CA", 4, 5.0),
    };

    SUBCASE("identical runs improve nothing") {
        const AggregationWindow overall{"overall", {}, {}, {}, {}};
        const auto result = aggregate(base, base, {overall});
        REQUIRE(result.rows.size() == 1);
        CHECK(result.rows[0].pct_improvement == 0.0);
        CHECK(result.rows[0].n_records == 3);
    }

    SUBCASE("single matched pair halves the error") {
        const AggregationWindow overall{"overall", {}, {}, {}, {}};
        const auto result = aggregate({base[0]}, {model[0]}, {overall});
        REQUIRE(result.rows.size() == 1);
        CHECK(result.rows[0].base_mean == 2.0);
        CHECK(result.rows[0].model_mean == 1.0);
        CHECK(result.rows[0].pct_improvement == 50.0);
    }

    SUBCASE("horizon filter selects matching records only") {
        AggregationWindow h4{"h4", {}, {}, {}, {4}};
        const auto result = aggregate(base, model, {h4});
        REQUIRE(result.rows.size() == 1);
        CHECK(result.rows[0].n_records == 2);
        CHECK(result.rows[0].base_mean == 8.0);
        CHECK(result.rows[0].model_mean == 4.0);
    }

    SUBCASE("date window filters on origin date") {
        AggregationWindow january{"jan", Date(2022, 1, 1), Date(2022, 1, 31), {}, {}};
        const auto result = aggregate(base, model, {january});
        REQUIRE(result.rows.size() == 1);
        CHECK(result.rows[0].n_records == 2);
    }

    SUBCASE("mismatched keys are counted, not dropped") {
        auto model_extra = model;
        model_extra.push_back(record("2022-03-01", "TX", 1, 9.0));
        auto base_extra = base;
        base_extra.push_back(record("2022-03-02", "TX", 1, 9.0));
        const AggregationWindow overall{"overall", {}, {}, {}, {}};
        const auto result = aggregate(base_extra, model_extra, {overall});
        CHECK(result.base_only_keys == 1);
        CHECK(result.model_only_keys == 1);
        CHECK(result.rows[0].n_records == 3);
    }

    SUBCASE("no overlap at all is an error") {
        const AggregationWindow overall{"overall", {}, {}, {}, {}};
        std::vector<ScoreRecord> other{record("2021-06-06", "TX", 2, 1.0)};
        CHECK_THROWS_AS(aggregate(base, other, {overall}), Error);
    }
}

TEST_CASE("scores are invariant under record reordering") {
    oracles::Rng rng(9);
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 50; ++i) pairs.emplace_back(rng.uniform(0, 100), rng.uniform(0, 100));
    auto shuffled = pairs;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[3], shuffled[17]);
    CHECK(mae(pairs) == doctest::Approx(mae(shuffled)).epsilon(1e-15));
}
