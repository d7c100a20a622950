#include "debias/model.hpp"
#include "debias/instances.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace debias;

TEST_CASE("noiseless evaluations add the group bias") {
    const ActionSet a = fixtures::make(2, {{{1, 0}, 1}, {{1, 0}, -1}});
    const Parameter p{{0.5, 0.0}, -0.2};
    Environment env(a, p, 0.0, 1);
    CHECK(env.evaluate(0) == doctest::Approx(0.3));
    CHECK(env.evaluate(1) == doctest::Approx(0.7));
    CHECK(evaluations(a, p) == std::vector<double>{0.5 - 0.2, 0.5 + 0.2});
    CHECK(true_rewards(a, p) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("noisy evaluations average to the mean") {
    const ActionSet a = fixtures::make(2, {{{1, 0}, 1}, {{0, 1}, -1}});
    Environment env(a, Parameter{{0.5, 0.25}, 0.1}, 1.0, 99);
    const int n = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = env.evaluate(0);
        sum += y;
        sq += y * y;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.6) <= 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("environments with the same seed replay the same noise") {
    const ActionSet a = fixtures::non_separable();
    Environment e1(a, Parameter{{0.1, 0.2}, 0.0}, 1.0, 5);
    Environment e2(a, Parameter{{0.1, 0.2}, 0.0}, 1.0, 5);
    for (int i = 0; i < 100; ++i) CHECK(e1.evaluate(i % 3) == e2.evaluate(i % 3));
}

TEST_CASE("gaps") {
    const ActionSet a = fixtures::make(1, {{{0.6}, 1}, {{0.4}, -1}});
    const GapInfo g = gaps(a, Parameter{{1.0}, 0.3});
    CHECK(g.gaps[0] == doctest::Approx(0.0));
    CHECK(g.gaps[1] == doctest::Approx(0.2));
    CHECK(g.delta_min == doctest::Approx(0.2));
    CHECK(g.best == 0);
    CHECK(g.unique);

    const ProblemInstance p = gap_instance(4.0, 4, 0.05, 0.1, 1);
    const GapInfo h = gaps(p.actions, p.theta);
    CHECK(h.delta_min == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(h.delta_neq == doctest::Approx(0.1).epsilon(1e-12));

    const ActionSet tie = fixtures::make(2, {{{1, 0}, 1}, {{0, 1}, -1}, {{0.5, 0.5}, 1}});
    CHECK_FALSE(gaps(tie, Parameter{{0.3, 0.3}, 0.0}).unique);
}

TEST_CASE("cumulative_regret sums per-step gaps") {
    const ActionSet a = fixtures::make(1, {{{0.6}, 1}, {{0.4}, -1}, {{-0.1}, -1}});
    const Parameter p{{1.0}, 0.0};
    const std::vector<std::size_t> best(10, 0);
    CHECK(cumulative_regret(a, p, best) == 0.0);
    const std::vector<std::size_t> five(5, 1);
    CHECK(cumulative_regret(a, p, five) == doctest::Approx(1.0));
    const std::vector<std::size_t> mixed{0, 1, 2, 2, 1, 0, 2};
    double oracle = 0.0;
    for (std::size_t i : mixed) oracle += 0.6 - a.actions[i].x[0];
    CHECK(cumulative_regret(a, p, mixed) == doctest::Approx(oracle));
}

TEST_CASE("admissibility") {
    const ActionSet a = fixtures::make(1, {{{1.0}, 1}, {{-0.5}, -1}});
    CHECK(is_admissible(a, Parameter{{1.0}, 5.0}));
    CHECK_FALSE(is_admissible(a, Parameter{{1.001}, 0.0}));
}
