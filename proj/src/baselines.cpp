#include "debias/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace debias {

namespace {

RunResult joint_elimination(Environment& env, const RunOptions& opt, double omega_shift, const char* name) {
    const ActionSet& a = env.actions();
    require_valid(a);
    if (opt.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    const double delta = resolve_delta(opt);
    const double k = static_cast<double>(a.size());
    const double d = static_cast<double>(a.d);
    const int cap = phase_cap(opt.horizon);

    BanditSession s(env, opt.horizon);
    RunResult result;
    result.policy = name;
    result.horizon = opt.horizon;
    std::vector<std::size_t> active = a.all_indices();
    std::optional<Vector> theta;

    for (int l = 1; !s.done(); ++l) {
        if (l > cap) throw std::runtime_error(std::string(name) + ": phase cap exceeded");
        const double eps = std::ldexp(1.0, 2 - l);
        const double n =
            2.0 * (d + 1.0) / (eps * eps) * std::log(k * static_cast<double>(l) * static_cast<double>(l + 1) / delta);
        PhaseRecord rec;
        rec.l = l;
        rec.eps = eps;
        Exploration ex;
        ex.active = active;

        const GDesignResult g = g_optimal_design(a, active, opt.g_tol);
        const Allocation alloc = round_allocation(g.design, n);
        ex.planned = alloc.total();
        if (alloc.total() <= s.remaining()) {
            ObservationBatch batch(a.lifted_dim());
            for (std::size_t i = 0; i < alloc.counts.size(); ++i) {
                const std::int64_t c = alloc.counts[i];
                if (c == 0) continue;
                const double shift = omega_shift * a.actions[i].z;
                double sum = 0.0;
                for (std::int64_t j = 0; j < c; ++j) sum += s.pull(i) - shift;
                batch.add_repeated(a.lifted(i), sum, c);
                (a.actions[i].z > 0 ? rec.rounds_g_pos : rec.rounds_g_neg) += c;
            }
            theta = ols(batch);
            ex.explored = true;
            ex.rounds = batch.count;
            ex.theta_hat = *theta;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i : active) best = std::max(best, dot(a.lifted(i), *theta));
            std::vector<std::size_t> survivors;
            for (std::size_t i : active)
                if (best - dot(a.lifted(i), *theta) <= 3.0 * eps) survivors.push_back(i);
            active = std::move(survivors);
        } else {
            std::size_t pick = active.front();
            if (theta) {
                double top = -std::numeric_limits<double>::infinity();
                for (std::size_t i : active) {
                    const double v = dot(a.lifted(i), *theta);
                    if (v > top) {
                        top = v;
                        pick = i;
                    }
                }
            }
            const std::int64_t rest = s.remaining();
            s.pull_repeated(pick, rest);
            ex.rounds = rest;
            (a.actions[pick].z > 0 ? rec.rounds_g_pos : rec.rounds_g_neg) += rest;
        }
        rec.explorations.push_back(std::move(ex));
        result.phases.push_back(std::move(rec));
    }

    result.checkpoints = s.checkpoints();
    result.cum_regret = s.regret_at_checkpoints();
    result.last_suboptimal_round = s.last_suboptimal_round();
    result.pull_counts = s.pull_counts();
    return result;
}

}  // namespace

RunResult unfair_phased_elimination(Environment& env, const RunOptions& opt) {
    return joint_elimination(env, opt, 0.0, "unfair-pe");
}

RunResult known_bias_eliminator(Environment& env, const RunOptions& opt, double omega_true) {
    return joint_elimination(env, opt, omega_true, "known-bias");
}

RunResult static_oracle(Environment& env, const Parameter& p, const RunOptions& opt) {
    if (opt.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    const GapInfo g = gaps(env.actions(), p);
    BanditSession s(env, opt.horizon);
    s.pull_repeated(g.best, opt.horizon);
    RunResult result;
    result.policy = "oracle";
    result.horizon = opt.horizon;
    result.checkpoints = s.checkpoints();
    result.cum_regret = s.regret_at_checkpoints();
    result.last_suboptimal_round = s.last_suboptimal_round();
    result.pull_counts = s.pull_counts();
    return result;
}

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names = {"fpe", "unfair-pe", "known-bias", "oracle"};
    return names;
}

bool is_policy(const std::string& name) {
    const auto& n = policy_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

RunResult run_policy(const std::string& name, Environment& env, const RunOptions& opt) {
    if (name == "fpe") return fair_phased_elimination(env, opt);
    if (name == "unfair-pe") return unfair_phased_elimination(env, opt);
    if (name == "known-bias") return known_bias_eliminator(env, opt, env.theta().omega);
    if (name == "oracle") return static_oracle(env, env.theta(), opt);
    throw std::invalid_argument("unknown policy '" + name + "'");
}

}  // namespace debias
