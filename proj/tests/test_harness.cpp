#include "debias/harness.hpp"
#include "debias/json_io.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

using namespace debias;

namespace {

ExperimentConfig small_config(const std::string& algorithm, int reps = 3) {
    ExperimentConfig c;
    c.instance = Json{{"family", "worst-case"}, {"kappa", 4.0}, {"d", 2}, {"T", 4096}, {"alt", 1}};
    c.algorithm = algorithm;
    c.horizon = 4096;
    c.reps = reps;
    c.seed = 17;
    return c;
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 123456789.123456789}) CHECK(parse_double(format_double(v)) == v);
    CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("regret CSV round-trips") {
    const SimulationResult r = simulate(small_config("fpe"));
    const std::string text = regret_csv(r);
    CHECK(text.rfind("rep,checkpoint,cum_regret\n", 0) == 0);
    const std::vector<RegretRow> rows = parse_regret_csv(text);
    REQUIRE(rows.size() == 3 * r.checkpoints.size());
    for (const RegretRow& row : rows) {
        const auto it = std::find(r.checkpoints.begin(), r.checkpoints.end(), row.checkpoint);
        REQUIRE(it != r.checkpoints.end());
        CHECK(row.cum_regret == r.runs[row.rep].cum_regret[it - r.checkpoints.begin()]);
    }
    const auto means = mean_by_checkpoint(rows);
    for (std::size_t i = 0; i < means.size(); ++i) CHECK(means[i].second == doctest::Approx(r.stats.mean[i]));
    CHECK_THROWS_AS(parse_regret_csv("a,b,c\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_regret_csv("rep,checkpoint,cum_regret\n0,1\n"), std::invalid_argument);
}

TEST_CASE("simulation is deterministic and independent of the worker count") {
    ExperimentConfig c = small_config("fpe", 1);
    CHECK(regret_csv(simulate(c)) == regret_csv(simulate(c)));
    ExperimentConfig many = small_config("fpe", 8);
    const std::string serial = regret_csv(simulate(many));
    many.workers = 4;
    CHECK(regret_csv(simulate(many)) == serial);
}

TEST_CASE("oracle regret is zero at every checkpoint") {
    const SimulationResult r = simulate(small_config("oracle"));
    CHECK(std::all_of(r.stats.mean.begin(), r.stats.mean.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("aggregate") {
    std::vector<std::pair<int, Vector>> rows{{0, {1.0, 2.0}}, {1, {3.0, 2.0}}, {2, {5.0, 2.0}}};
    const Aggregate a = aggregate(rows);
    CHECK(a.mean[0] == doctest::Approx(3.0));
    CHECK(a.sd[0] == doctest::Approx(2.0));
    CHECK(a.ci_low[0] == doctest::Approx(3.0 - 1.96 * 2.0 / std::sqrt(3.0)));
    CHECK(a.ci_high[0] == doctest::Approx(3.0 + 1.96 * 2.0 / std::sqrt(3.0)));
    CHECK(a.sd[1] == 0.0);

    std::vector<std::pair<int, Vector>> many;
    SplitMix64 rng(3);
    for (int i = 0; i < 50; ++i) many.push_back({i, {rng.normal(), 1e8 * rng.uniform(), 1e-8 * rng.normal()}});
    const Aggregate base = aggregate(many);
    std::mt19937 shuffle(5);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(many.begin(), many.end(), shuffle);
        const Aggregate again = aggregate(many);
        CHECK(again.mean == base.mean);
        CHECK(again.sd == base.sd);
    }
}

TEST_CASE("fit_slope") {
    const std::vector<double> t{1 << 10, 1 << 12, 1 << 14};
    std::vector<double> power, linear, logged;
    for (double x : t) {
        power.push_back(std::pow(x, 2.0 / 3.0));
        linear.push_back(5.0 * x);
        logged.push_back(std::pow(x, 2.0 / 3.0) * std::cbrt(std::log(x)));
    }
    CHECK(std::abs(fit_slope(t, power).slope - 2.0 / 3.0) <= 1e-12);
    CHECK(fit_slope(t, linear).slope == doctest::Approx(1.0).epsilon(1e-12));
    const double s = fit_slope(t, logged).slope;
    CHECK(s > 0.67);
    CHECK(s < 0.76);
    CHECK(fit_slope(t, power).r2 == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_slope(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("config parsing and hashing") {
    const Json j = Json::parse(R"({"instance": {"family": "gap", "kappa": 4, "d": 4, "delta_min": 0.05,
        "delta_neq": 0.1}, "algorithm": "fpe", "T": 1024, "reps": 2, "seed": 3, "workers": 2})");
    ExperimentConfig c = config_from_json(j);
    CHECK(c.horizon == 1024);
    CHECK_FALSE(c.delta.has_value());
    CHECK(c.noise_std == 1.0);
    const std::uint64_t h = config_hash(c);
    c.workers = 7;
    CHECK(config_hash(c) == h);
    c.seed = 4;
    CHECK(config_hash(c) != h);
    CHECK(config_hash(config_from_json(config_to_json(config_from_json(j)))) == h);

    Json bad = j;
    bad["extra"] = 1;
    CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
    bad = j;
    bad["algorithm"] = "ucb";
    CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
    bad = j;
    bad["T"] = 0;
    CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
    bad = j;
    bad["delta"] = 1.5;
    CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
}

TEST_CASE("instances resolve from generator specs, objects and files") {
    const ProblemInstance w = resolve_instance(Json{{"family", "worst-case"}, {"kappa", 4}, {"d", 2}}, 4096);
    CHECK(w.meta.alternative == 1);
    CHECK_THROWS_AS(resolve_instance(Json{{"family", "nope"}}, 4096), std::invalid_argument);

    const ProblemInstance g = gap_instance(4.0, 4, 0.05, 0.1, 2);
    const Json obj{{"actions", to_json(g.actions)}, {"parameter", to_json(g.theta)}};
    const ProblemInstance from_obj = resolve_instance(obj, 1000);
    CHECK(evaluations(from_obj.actions, from_obj.theta) == evaluations(g.actions, g.theta));

    const auto dir = std::filesystem::temp_directory_path() / "debias_harness_test";
    std::filesystem::create_directories(dir);
    write_json_file(dir / "actions.json", to_json(g.actions));
    write_json_file(dir / "theta.json", to_json(g.theta));
    const ProblemInstance from_file = resolve_instance(Json{{"actions", "actions.json"}, {"parameter", "theta.json"}}, 1000, dir);
    CHECK(evaluations(from_file.actions, from_file.theta) == evaluations(g.actions, g.theta));

    Json extra = to_json(g.actions);
    extra["colour"] = "red";
    CHECK_THROWS_AS(action_set_from_json(extra), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("write_simulation produces the CSV and summary") {
    const auto dir = std::filesystem::temp_directory_path() / "debias_sim_test";
    std::filesystem::remove_all(dir);
    const SimulationResult r = simulate(small_config("unfair-pe", 2));
    write_simulation(r, dir);
    const auto rows = read_regret_csv(dir / "regret.csv");
    CHECK(rows.size() == 2 * r.checkpoints.size());
    const Json summary = read_json_file(dir / "summary.json");
    CHECK(summary.contains("config_hash"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("compare") {
    const Comparison c = compare({small_config("oracle"), small_config("fpe"), small_config("fpe")});
    REQUIRE(c.mean.size() == 3);
    CHECK(std::all_of(c.mean[0].begin(), c.mean[0].end(), [](double v) { return v == 0.0; }));
    CHECK(c.mean[1] == c.mean[2]);
    CHECK(comparison_csv(c).rfind("checkpoint,", 0) == 0);

    ExperimentConfig other = small_config("fpe");
    other.horizon = 2048;
    CHECK_THROWS_AS(compare({small_config("fpe"), other}), std::invalid_argument);
}
