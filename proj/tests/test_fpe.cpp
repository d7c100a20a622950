#include "debias/fpe.hpp"
#include "debias/instances.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace debias;

namespace {

// Lifted (1,0,1), (0,1,1), (1,1,-1) span R^3.
ActionSet three_actions() { return fixtures::make(2, {{{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, -1}}); }

}  // namespace

TEST_CASE("pow2 checkpoints") {
    CHECK(pow2_checkpoints(1) == std::vector<std::int64_t>{1});
    CHECK(pow2_checkpoints(8) == std::vector<std::int64_t>{1, 2, 4, 8});
    CHECK(pow2_checkpoints(10) == std::vector<std::int64_t>{1, 2, 4, 8, 10});
}

TEST_CASE("ols") {
    const ActionSet a = three_actions();
    const Parameter p{{0.3, -0.2}, 0.1};
    const Vector theta = p.lifted();

    ObservationBatch full(3);
    for (std::size_t i = 0; i < 3; ++i) full.add(a.lifted(i), dot(a.lifted(i), theta));
    const Vector est = ols(full);
    for (std::size_t j = 0; j < 3; ++j) CHECK(est[j] == doctest::Approx(theta[j]).epsilon(1e-9));

    ObservationBatch one(3);
    const Vector a0 = a.lifted(0);
    one.add(a0, 0.7);
    const Vector e1 = ols(one);
    for (std::size_t j = 0; j < 3; ++j) CHECK(e1[j] == doctest::Approx(0.7 * a0[j] / 2.0));

    ObservationBatch rep(3);
    const Vector ys{0.1, 0.5, -0.3, 0.9};
    for (double y : ys) rep.add(a0, y);
    CHECK(dot(a0, ols(rep)) == doctest::Approx(0.3));
}

TEST_CASE("g_exp_elim eliminates exactly past 3 eps") {
    const double eps = 0.05;
    const ActionSet a = three_actions();
    const std::vector<std::size_t> active{0, 1};
    SUBCASE("gap 4 eps") {
        Environment env(a, Parameter{{0.5, 0.5 - 4 * eps}, 0.2}, 0.0);
        BanditSession s(env, 100000);
        const GExpResult r = g_exp_elim(s, active, 100.0, eps);
        REQUIRE(r.completed);
        CHECK(r.survivors == std::vector<std::size_t>{0});
    }
    SUBCASE("gap 2 eps") {
        Environment env(a, Parameter{{0.5, 0.5 - 2 * eps}, 0.2}, 0.0);
        BanditSession s(env, 100000);
        const GExpResult r = g_exp_elim(s, active, 100.0, eps);
        REQUIRE(r.completed);
        CHECK(r.survivors == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("singleton") {
        Environment env(a, Parameter{{0.5, 0.5}, 0.2}, 0.0);
        BanditSession s(env, 100000);
        const std::vector<std::size_t> one{1};
        const GExpResult r = g_exp_elim(s, one, 37.4, eps);
        REQUIRE(r.completed);
        CHECK(r.survivors == one);
        CHECK(r.rounds_used == 38);
        CHECK(s.t() == 38);
    }
    SUBCASE("overrunning block is not sampled") {
        Environment env(a, Parameter{{0.5, 0.5}, 0.2}, 0.0);
        BanditSession s(env, 50);
        const GExpResult r = g_exp_elim(s, active, 100.0, eps);
        CHECK_FALSE(r.completed);
        CHECK(s.t() == 0);
    }
}

TEST_CASE("delta_exp_elim group test") {
    const double eps = 0.05;
    const ActionSet a = three_actions();
    const std::vector<std::size_t> pos{0};
    const std::vector<std::size_t> neg{2};
    auto run = [&](double between_gap) {
        // Reward of action 0 is 0.5, of action 2 is 0.5 - between_gap.
        const Parameter p{{0.5, -between_gap}, 0.3};
        Environment env(a, p, 0.0);
        BanditSession s(env, 1000000);
        const Vector theta = p.lifted();
        const Vector g0(3, 1.0);
        const DeltaDesignResult design = delta_optimal_design(a, g0);
        return delta_exp_elim(s, pos, neg, theta, theta, design, Vector(3, 2.0), 50.0, eps);
    };
    const DeltaExpResult five = run(5 * eps);
    REQUIRE(five.completed);
    CHECK(five.z_found == 1);
    CHECK(five.omega_hat == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(five.gap_estimates[0] == doctest::Approx(4 * eps));
    CHECK(five.gap_estimates[2] == doctest::Approx(9 * eps));
    CHECK(five.gap_estimates[1] == 2.0);

    const DeltaExpResult three = run(3 * eps);
    REQUIRE(three.completed);
    CHECK(three.z_found == 0);
    CHECK(three.gap_estimates[2] == doctest::Approx(7 * eps));
}

TEST_CASE("fpe spends exactly T rounds") {
    for (const auto& f : fixtures::instance_fixtures()) {
        CAPTURE(f.name);
        Environment env(f.instance.actions, f.instance.theta, 1.0, 3);
        RunOptions opt;
        opt.horizon = 30000;
        const RunResult r = fair_phased_elimination(env, opt);
        CHECK(std::accumulate(r.pull_counts.begin(), r.pull_counts.end(), std::int64_t{0}) == opt.horizon);
        std::int64_t phase_rounds = 0;
        for (const PhaseRecord& p : r.phases) {
            phase_rounds += p.rounds_g_pos + p.rounds_g_neg + p.rounds_delta;
            for (const Exploration& ex : p.explorations)
                if (ex.explored) CHECK(ex.rounds == ex.planned);
            if (p.explored_delta) CHECK(p.rounds_delta == p.planned_delta);
        }
        const std::int64_t recovery = r.recovery_entered_at ? opt.horizon - *r.recovery_entered_at : 0;
        CHECK(phase_rounds + recovery == opt.horizon);
        CHECK(r.checkpoints.back() == opt.horizon);
        CHECK(r.cum_regret.size() == r.checkpoints.size());
        CHECK(static_cast<int>(r.phases.size()) <= phase_cap(opt.horizon));
    }
}

TEST_CASE("fpe budget per G block") {
    const ProblemInstance p = worst_case_instance(4.0, 2, 1 << 14).first;
    Environment env(p.actions, p.theta, 1.0, 1);
    RunOptions opt;
    opt.horizon = 1 << 14;
    const RunResult r = fair_phased_elimination(env, opt);
    const double k = 3.0, d = 2.0, delta = 1.0 / opt.horizon;
    const Exploration& ex = r.phases.front().explorations.front();
    REQUIRE(ex.explored);
    const double n = 2.0 * (d + 1.0) / 4.0 * std::log(k * 2.0 / delta);
    // Ceiling adds at most one pull per supported action.
    CHECK(ex.planned >= static_cast<std::int64_t>(std::floor(n)));
    CHECK(ex.planned <= static_cast<std::int64_t>(std::ceil(n)) + static_cast<std::int64_t>(ex.active.size()));
}

TEST_CASE("horizon shorter than the first block") {
    const ProblemInstance p = gap_instance(4.0, 4, 0.05, 0.1, 1);
    Environment env(p.actions, p.theta, 1.0, 1);
    RunOptions opt;
    opt.horizon = 5;
    const RunResult r = fair_phased_elimination(env, opt);
    const Vector g = gaps(p.actions, p.theta).gaps;
    double regret = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) regret += static_cast<double>(r.pull_counts[i]) * g[i];
    CHECK(r.cum_regret.back() == doctest::Approx(regret));
    CHECK(r.phases.size() == 1);
}

TEST_CASE("fpe is deterministic given the seed") {
    const ProblemInstance p = gap_instance(4.0, 4, 0.05, 0.1, 2);
    RunOptions opt;
    opt.horizon = 20000;
    Environment e1(p.actions, p.theta, 1.0, 42);
    Environment e2(p.actions, p.theta, 1.0, 42);
    const RunResult r1 = fair_phased_elimination(e1, opt);
    const RunResult r2 = fair_phased_elimination(e2, opt);
    CHECK(r1.cum_regret == r2.cum_regret);
    CHECK(r1.pull_counts == r2.pull_counts);
}

TEST_CASE("noiseless fpe settles on the best action") {
    const ProblemInstance p = worst_case_instance(4.0, 2, 1 << 20).first;
    Environment env(p.actions, p.theta, 0.0);
    RunOptions opt;
    opt.horizon = 1 << 20;
    const RunResult r = fair_phased_elimination(env, opt);
    CHECK(r.last_suboptimal_round < opt.horizon);
    const std::size_t best = gaps(p.actions, p.theta).best;
    for (const PhaseRecord& ph : r.phases)
        if (ph.z_hat != 0) CHECK(ph.z_hat == p.actions.actions[best].z);
    CHECK_FALSE(good_event_violated(r, p.actions, p.theta));
}

TEST_CASE("good event check flags a bad estimate") {
    const ProblemInstance p = worst_case_instance(4.0, 2, 4096).first;
    RunResult r;
    PhaseRecord ph;
    ph.eps = 0.5;
    Exploration ex;
    ex.explored = true;
    ex.active = {0};
    ex.theta_hat = p.theta.lifted();
    ph.explorations.push_back(ex);
    r.phases.push_back(ph);
    CHECK_FALSE(good_event_violated(r, p.actions, p.theta));
    r.phases[0].explorations[0].theta_hat[0] += 0.6;
    CHECK(good_event_violated(r, p.actions, p.theta));
}

TEST_CASE("invalid inputs") {
    const ProblemInstance p = worst_case_instance(4.0, 2, 4096).first;
    Environment env(p.actions, p.theta);
    RunOptions opt;
    opt.horizon = 0;
    CHECK_THROWS_AS(fair_phased_elimination(env, opt), std::invalid_argument);
    opt.horizon = 10;
    opt.delta = -1.0;
    CHECK_THROWS_AS(fair_phased_elimination(env, opt), std::invalid_argument);
    Environment bad(fixtures::make(2, {{{1, 0}, 1}, {{0, 1}, -1}}), Parameter{{0, 0}, 0});
    opt.delta.reset();
    CHECK_THROWS_AS(fair_phased_elimination(bad, opt), std::invalid_argument);
}
