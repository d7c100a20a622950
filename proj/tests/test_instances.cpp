#include "debias/geometry.hpp"
#include "debias/instances.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace debias;

TEST_CASE("every fixture satisfies its declared metadata") {
    for (const auto& f : fixtures::instance_fixtures()) {
        CAPTURE(f.name);
        CHECK(verify_instance(f.instance).empty());
    }
}

TEST_CASE("worst-case pair shares every evaluation except the last action") {
    for (double kappa : {1.0, 4.0, 9.0})
        for (std::size_t d : {2u, 3u, 5u}) {
            const auto [p1, p2] = worst_case_instance(kappa, d, 1 << 16);
            const Vector m1 = evaluations(p1.actions, p1.theta);
            const Vector m2 = evaluations(p2.actions, p2.theta);
            for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(m1[i] - m2[i]) <= 1e-12);
            CHECK(std::abs(m1[d] - m2[d]) > 1e-6);
            CHECK(gaps(p1.actions, p1.theta).best != gaps(p2.actions, p2.theta).best);
            CHECK(p1.meta.rho.value() == doctest::Approx(std::cbrt(kappa / 65536.0)));
        }
}

TEST_CASE("worst-case preconditions") {
    CHECK_THROWS_AS(worst_case_instance(0.5, 2, 4096), std::invalid_argument);
    CHECK_THROWS_AS(worst_case_instance(4.0, 1, 4096), std::invalid_argument);
    CHECK_THROWS_AS(worst_case_instance(4.0, 2, 256), std::invalid_argument);
    CHECK_NOTHROW(worst_case_instance(4.0, 2, 257));
}

TEST_CASE("gap family alternatives") {
    const std::size_t d = 6;
    for (int alt = 1; alt <= 4; ++alt) {
        CAPTURE(alt);
        const ProblemInstance p = gap_instance(4.0, d, 0.05, 0.1, alt);
        CHECK(verify_instance(p).empty());
        const GapInfo g = gaps(p.actions, p.theta);
        CHECK(g.delta_min == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(g.delta_neq == doctest::Approx(0.1).epsilon(1e-12));
        const std::size_t expected_best = alt == 4 ? 3 : static_cast<std::size_t>(alt - 1);
        CHECK(g.best == expected_best);
    }
    CHECK_THROWS_AS(gap_instance(4.0, 3, 0.05, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(gap_instance(4.0, 4, 0.1, 0.05, 1), std::invalid_argument);
    CHECK_THROWS_AS(gap_instance(4.0, 4, 0.05, 0.1, 4), std::invalid_argument);
    CHECK_THROWS_AS(gap_instance(4.0, 4, 0.5, 0.9, 3), std::invalid_argument);
}

TEST_CASE("low-dimensional families") {
    const ProblemInstance c2 = small_d_gap_instance(2, 2, 4.0, std::nullopt, 0.1);
    CHECK(c2.actions.size() == 3);
    CHECK(std::abs(c2.theta.omega) == doctest::Approx(0.05));
    const ProblemInstance c1 = small_d_gap_instance(3, 1, 1.0, 0.05, std::nullopt);
    CHECK(c1.theta.omega == 0.0);
    CHECK(kappa_star(c1.actions).value == doctest::Approx(1.0));
    CHECK_THROWS_AS(small_d_gap_instance(4, 1, 1.0, 0.05, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(small_d_gap_instance(2, 1, 1.0, std::nullopt, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(small_d_gap_instance(2, 3, 1.0, 0.05, 0.1), std::invalid_argument);
}

TEST_CASE("verify_instance reports wrong metadata") {
    ProblemInstance p = gap_instance(4.0, 4, 0.05, 0.1, 1);
    p.meta.kappa = 5.0;
    p.meta.delta_min = 0.04;
    CHECK(verify_instance(p).size() == 2);
}
