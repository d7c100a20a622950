#include "debias/simplex.hpp"

#include <doctest.h>

#include <string>

using namespace debias;

TEST_CASE("simplex solves a small standard-form program") {
    // max x1 + x2 s.t. x1 + 2 x2 <= 4, 3 x1 + x2 <= 6; optimum (8/5, 6/5).
    LinearProgram lp;
    lp.a = Matrix(2, 4, {1, 2, 1, 0, 3, 1, 0, 1});
    lp.b = {4, 6};
    lp.c = {-1, -1, 0, 0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.x[0] == doctest::Approx(1.6));
    CHECK(s.x[1] == doctest::Approx(1.2));
    CHECK(s.value == doctest::Approx(-2.8));
}

TEST_CASE("simplex detects infeasibility and unboundedness") {
    LinearProgram infeasible;
    infeasible.a = Matrix(2, 1, {1, 1});
    infeasible.b = {1, 2};
    infeasible.c = {0};
    CHECK(solve_lp(infeasible).status == LpStatus::infeasible);

    LinearProgram unbounded;
    unbounded.a = Matrix(1, 2, {1, -1});
    unbounded.b = {0};
    unbounded.c = {-1, 0};
    CHECK(solve_lp(unbounded).status == LpStatus::unbounded);
}

TEST_CASE("simplex handles redundant equality rows") {
    LinearProgram lp;
    lp.a = Matrix(2, 2, {1, 1, 2, 2});
    lp.b = {1, 2};
    lp.c = {1, 2};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == doctest::Approx(1.0));
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.basis.size() == 1);
}

TEST_CASE("simplex terminates on a degenerate program") {
    // Beale's cycling example in standard form.
    LinearProgram lp;
    lp.a = Matrix(3, 7, {0.25, -8, -1, 9, 1, 0, 0, 0.5, -12, -0.5, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1});
    lp.b = {0, 0, 1};
    lp.c = {-0.75, 20, -0.5, 6, 0, 0, 0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == doctest::Approx(-1.25));
}

TEST_CASE("to_string covers every status") {
    CHECK(std::string(to_string(LpStatus::optimal)) == "optimal");
    CHECK(std::string(to_string(LpStatus::infeasible)) == "infeasible");
    CHECK(std::string(to_string(LpStatus::unbounded)) == "unbounded");
    CHECK(std::string(to_string(LpStatus::iteration_limit)) == "iteration limit");
}
