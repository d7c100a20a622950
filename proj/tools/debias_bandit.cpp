// debias-bandit: command-line front end for the design solvers, instance
// generators and the Monte Carlo harness.

#include "debias/baselines.hpp"
#include "debias/design.hpp"
#include "debias/geometry.hpp"
#include "debias/harness.hpp"
#include "debias/instances.hpp"
#include "debias/json_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace debias;

namespace {

Json weights_json(const Design& d) {
    Json w = Json::object();
    for (std::size_t i : d.support()) w[std::to_string(i)] = d.weights[i];
    return w;
}

int run_design(const std::string& kind, const fs::path& actions_path, const std::string& c_target,
               const std::optional<fs::path>& gaps_path, double tol) {
    const ActionSet a = action_set_from_json(read_json_file(actions_path));
    require_valid(a);
    Json out;
    if (kind == "g-opt") {
        const GDesignResult g = g_optimal_design(a, tol);
        out["weights"] = weights_json(g.design);
        out["value"] = g.value;
        out["iterations"] = g.iterations;
    } else if (kind == "c-opt") {
        if (c_target != "last") throw std::invalid_argument("--c-target supports only 'last'");
        const CDesignResult c = c_optimal_design(a, basis_vector(a.lifted_dim(), a.d));
        out["weights"] = weights_json(c.design);
        out["value"] = c.variance;
        out["iterations"] = c.iterations;
    } else {
        if (!gaps_path) throw std::invalid_argument("delta-opt requires --gaps");
        const Json g = read_json_file(*gaps_path);
        if (!g.is_array()) throw std::invalid_argument("gaps file must hold a JSON array of numbers");
        Vector gaps;
        for (const Json& v : g) {
            if (!v.is_number()) throw std::invalid_argument("gaps file must hold a JSON array of numbers");
            gaps.push_back(v.get<double>());
        }
        const DeltaDesignResult dd = delta_optimal_design(a, gaps);
        out["weights"] = weights_json(dd.measure);
        out["value"] = dd.kappa;
        out["iterations"] = dd.iterations;
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_kappa(const fs::path& actions_path) {
    const ActionSet a = action_set_from_json(read_json_file(actions_path));
    const KappaStar k = kappa_star(a);
    Json out;
    out["kappa_star"] = k.value;
    out["weights"] = weights_json(k.design);
    out["kappa_star_margin_form"] = kappa_star_margin_form(a).value;
    if (const auto m = separating_margin(a)) {
        out["separating_normal"] = m->normal;
        out["margin_ratio"] = m->margin_ratio;
    } else {
        out["separating_normal"] = nullptr;
        out["margin_ratio"] = nullptr;
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct InstanceArgs {
    std::string family;
    double kappa = 1.0;
    int d = 0;
    std::optional<std::int64_t> horizon;
    std::optional<double> dmin;
    std::optional<double> dneq;
    int alt = 1;
    std::optional<int> which_case;
    fs::path out;
};

int run_instance(const InstanceArgs& args) {
    ProblemInstance p;
    if (args.family == "worst-case") {
        if (!args.horizon) throw std::invalid_argument("worst-case requires --T");
        if (args.alt != 1 && args.alt != 2) throw std::invalid_argument("worst-case --alt must be 1 or 2");
        auto pair = worst_case_instance(args.kappa, static_cast<std::size_t>(args.d), *args.horizon);
        p = args.alt == 1 ? pair.first : pair.second;
    } else if (args.family == "gap") {
        if (!args.dmin || !args.dneq) throw std::invalid_argument("gap requires --dmin and --dneq");
        p = gap_instance(args.kappa, static_cast<std::size_t>(args.d), *args.dmin, *args.dneq, args.alt);
    } else {
        if (!args.which_case) throw std::invalid_argument("small-d requires --case");
        p = small_d_gap_instance(static_cast<std::size_t>(args.d), *args.which_case, args.kappa, args.dmin, args.dneq);
    }
    const std::vector<std::string> issues = verify_instance(p);
    if (!issues.empty()) {
        std::string msg = "generated instance failed verification:";
        for (const auto& s : issues) msg += " " + s + ";";
        throw std::runtime_error(msg);
    }
    fs::create_directories(args.out);
    write_json_file(args.out / "actions.json", to_json(p.actions));
    write_json_file(args.out / "parameter.json", to_json(p.theta));
    write_json_file(args.out / "meta.json", to_json(p.meta));
    std::cout << to_json(p.meta).dump() << '\n';
    return 0;
}

int run_simulate(const fs::path& config, const fs::path& out, std::optional<int> workers) {
    ExperimentConfig cfg = load_config(config);
    if (workers) {
        if (*workers < 1) throw std::invalid_argument("--workers must be at least 1");
        cfg.workers = *workers;
    }
    const SimulationResult r = simulate(cfg);
    write_simulation(r, out);
    Json s;
    s["reps"] = r.runs.size();
    s["T"] = cfg.horizon;
    s["final_mean_regret"] = r.stats.mean.back();
    s["final_ci"] = {r.stats.ci_low.back(), r.stats.ci_high.back()};
    std::cout << s.dump() << '\n';
    return 0;
}

int run_fit_slope(const fs::path& in, std::int64_t min_checkpoint) {
    const std::vector<RegretRow> rows = read_regret_csv(in);
    Vector t, r;
    for (const auto& [c, m] : mean_by_checkpoint(rows)) {
        if (c < min_checkpoint) continue;
        t.push_back(static_cast<double>(c));
        r.push_back(m);
    }
    const SlopeFit f = fit_slope(t, r);
    std::cout << Json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"points", t.size()}}.dump()
              << '\n';
    return 0;
}

int run_compare(const std::vector<fs::path>& configs, const std::optional<fs::path>& out) {
    std::vector<ExperimentConfig> cfgs;
    for (const fs::path& p : configs) cfgs.push_back(load_config(p));
    const std::string csv = comparison_csv(compare(cfgs));
    if (out) {
        std::ofstream f(*out);
        if (!f) throw std::runtime_error("cannot write " + out->string());
        f << csv;
    } else {
        std::cout << csv;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Biased linear bandits: optimal designs, Fair Phased Elimination and Monte Carlo runs"};
    app.require_subcommand(1);

    std::string design_kind;
    fs::path actions_path;
    std::string c_target = "last";
    std::optional<fs::path> gaps_path;
    double tol = 1e-3;
    auto* design = app.add_subcommand("design", "Solve a G-, c- or Delta-optimal design");
    design->add_option("kind", design_kind, "g-opt | c-opt | delta-opt")
        ->required()
        ->check(CLI::IsMember({"g-opt", "c-opt", "delta-opt"}));
    design->add_option("--actions", actions_path, "Action-set JSON")->required();
    design->add_option("--c-target", c_target, "Target vector for c-opt (only 'last' = e_{d+1})");
    design->add_option("--gaps", gaps_path, "JSON array of positive gaps for delta-opt");
    design->add_option("--tol", tol, "G-design tolerance")->check(CLI::PositiveNumber);

    fs::path kappa_actions;
    auto* kappa = app.add_subcommand("kappa", "kappa*, its margin form and the separating hyperplane");
    kappa->add_option("--actions", kappa_actions, "Action-set JSON")->required();

    InstanceArgs inst;
    auto* instance = app.add_subcommand("instance", "Generate a lower-bound instance");
    instance->add_option("family", inst.family, "worst-case | gap | small-d")
        ->required()
        ->check(CLI::IsMember({"worst-case", "gap", "small-d"}));
    instance->add_option("--kappa", inst.kappa, "kappa*")->required();
    instance->add_option("--d", inst.d, "Covariate dimension")->required();
    instance->add_option("--T", inst.horizon, "Horizon (worst-case)");
    instance->add_option("--dmin", inst.dmin, "Delta_min");
    instance->add_option("--dneq", inst.dneq, "Delta_neq");
    instance->add_option("--alt", inst.alt, "Alternative index");
    instance->add_option("--case", inst.which_case, "small-d case (1 or 2)");
    instance->add_option("--out", inst.out, "Output directory")->required();

    fs::path sim_config, sim_out;
    std::optional<int> workers;
    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
    sim->add_option("--config", sim_config, "Experiment config JSON")->required();
    sim->add_option("--out", sim_out, "Output directory")->required();
    sim->add_option("--workers", workers, "Worker threads");

    fs::path slope_in;
    std::int64_t min_checkpoint = 1;
    auto* slope = app.add_subcommand("fit-slope", "Log-log slope of the mean regret curve");
    slope->add_option("--in", slope_in, "regret.csv")->required();
    slope->add_option("--min-checkpoint", min_checkpoint, "Ignore checkpoints below this round");

    std::vector<fs::path> compare_configs;
    std::optional<fs::path> compare_out;
    auto* cmp = app.add_subcommand("compare", "Paired-seed comparison of several configs");
    cmp->add_option("--configs", compare_configs, "Experiment configs")->required();
    cmp->add_option("--out", compare_out, "Write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*design) return run_design(design_kind, actions_path, c_target, gaps_path, tol);
        if (*kappa) return run_kappa(kappa_actions);
        if (*instance) return run_instance(inst);
        if (*sim) return run_simulate(sim_config, sim_out, workers);
        if (*slope) return run_fit_slope(slope_in, min_checkpoint);
        if (*cmp) return run_compare(compare_configs, compare_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
