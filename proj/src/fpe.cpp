#include "debias/fpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace debias {

std::vector<std::int64_t> pow2_checkpoints(std::int64_t horizon) {
    std::vector<std::int64_t> c;
    for (std::int64_t p = 1; p < horizon; p *= 2) c.push_back(p);
    if (horizon >= 1) c.push_back(horizon);
    return c;
}

BanditSession::BanditSession(Environment& env, std::int64_t horizon)
    : env_(env), horizon_(horizon), checkpoints_(pow2_checkpoints(horizon)) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    gaps_ = gaps(env.actions(), env.theta()).gaps;
    recorded_.reserve(checkpoints_.size());
    pulls_.assign(env.actions().size(), 0);
}

double BanditSession::pull(std::size_t i) {
    if (t_ >= horizon_) throw std::logic_error("pull: budget exhausted");
    const double y = env_.evaluate(i);
    ++t_;
    ++pulls_[i];
    regret_ += gaps_[i];
    if (gaps_[i] > 0.0) last_bad_ = t_;
    while (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] == t_) {
        recorded_.push_back(regret_);
        ++next_checkpoint_;
    }
    return y;
}

double BanditSession::pull_repeated(std::size_t i, std::int64_t n) {
    double sum = 0.0;
    for (std::int64_t k = 0; k < n && t_ < horizon_; ++k) sum += pull(i);
    return sum;
}

void ObservationBatch::add(std::span<const double> a, double y) { add_repeated(a, y, 1); }

void ObservationBatch::add_repeated(std::span<const double> a, double sum_y, std::int64_t n) {
    if (n <= 0) return;
    v.add_outer(a, a, static_cast<double>(n));
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += sum_y * a[i];
    count += n;
}

Vector ols(const ObservationBatch& batch) { return pseudo_inverse(batch.v) * std::span<const double>(batch.b); }

double resolve_delta(const RunOptions& opt) {
    const double delta = opt.delta.value_or(1.0 / static_cast<double>(opt.horizon));
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
    return delta;
}

int phase_cap(std::int64_t horizon) {
    return static_cast<int>(std::ceil(3.0 * std::log2(static_cast<double>(horizon)))) + 4;
}

namespace {

// Samples the allocation; returns the batch.
ObservationBatch sample_allocation(BanditSession& s, const Allocation& alloc) {
    const ActionSet& a = s.actions();
    ObservationBatch batch(a.lifted_dim());
    for (std::size_t i = 0; i < alloc.counts.size(); ++i) {
        if (alloc.counts[i] == 0) continue;
        const double sum = s.pull_repeated(i, alloc.counts[i]);
        batch.add_repeated(a.lifted(i), sum, alloc.counts[i]);
    }
    return batch;
}

double score(const ActionSet& a, std::size_t i, const Vector& theta) {
    const Vector ai = a.lifted(i);
    return dot(ai, theta);
}

}  // namespace

GExpResult g_exp_elim(BanditSession& s, std::span<const std::size_t> active, double n, double eps, double g_tol) {
    if (active.empty()) throw std::invalid_argument("g_exp_elim: empty active set");
    const ActionSet& a = s.actions();
    const GDesignResult g = g_optimal_design(a, active, g_tol);
    GExpResult out;
    out.allocation = round_allocation(g.design, n);
    if (out.allocation.total() > s.remaining()) return out;

    const ObservationBatch batch = sample_allocation(s, out.allocation);
    out.completed = true;
    out.rounds_used = batch.count;
    out.theta_hat = ols(batch);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i : active) best = std::max(best, score(a, i, out.theta_hat));
    for (std::size_t i : active)
        if (best - score(a, i, out.theta_hat) <= 3.0 * eps) out.survivors.push_back(i);
    return out;
}

DeltaExpResult delta_exp_elim(BanditSession& s, std::span<const std::size_t> active_pos,
                              std::span<const std::size_t> active_neg, const Vector& theta_pos,
                              const Vector& theta_neg, const DeltaDesignResult& design, const Vector& gap_estimates,
                              double n, double eps) {
    if (active_pos.empty() || active_neg.empty()) throw std::invalid_argument("delta_exp_elim: empty active set");
    const ActionSet& a = s.actions();
    DeltaExpResult out;
    out.gap_estimates = gap_estimates;
    out.allocation = round_allocation(design.measure, n);
    if (out.allocation.total() > s.remaining()) return out;

    const ObservationBatch batch = sample_allocation(s, out.allocation);
    out.completed = true;
    out.rounds_used = batch.count;
    out.omega_hat = ols(batch)[a.d];

    auto debiased = [&](std::size_t i) {
        const int z = a.actions[i].z;
        return score(a, i, z > 0 ? theta_pos : theta_neg) - z * out.omega_hat;
    };
    double best_pos = -std::numeric_limits<double>::infinity();
    double best_neg = -std::numeric_limits<double>::infinity();
    for (std::size_t i : active_pos) best_pos = std::max(best_pos, debiased(i));
    for (std::size_t i : active_neg) best_neg = std::max(best_neg, debiased(i));
    const double best = std::max(best_pos, best_neg);
    for (std::size_t i : active_pos) out.gap_estimates[i] = std::min(2.0, best - debiased(i) + 4.0 * eps);
    for (std::size_t i : active_neg) out.gap_estimates[i] = std::min(2.0, best - debiased(i) + 4.0 * eps);
    if (best_pos - 2.0 * eps >= best_neg + 2.0 * eps)
        out.z_found = 1;
    else if (best_neg - 2.0 * eps >= best_pos + 2.0 * eps)
        out.z_found = -1;
    return out;
}

namespace {

struct FpeState {
    std::vector<std::size_t> active[2];  // [0]: z = -1, [1]: z = +1
    std::optional<Vector> theta[2];
    std::optional<double> omega;

    static int slot(int z) { return z > 0 ? 1 : 0; }
};

// Lowest index among the maximizers of a score; the first element when all
// scores are equal or undefined.
template <class Score>
std::size_t argmax_lowest(std::span<const std::size_t> set, Score f) {
    std::vector<std::size_t> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t best = sorted.front();
    double top = f(best);
    for (std::size_t i : sorted) {
        const double v = f(i);
        if (v > top) {
            top = v;
            best = i;
        }
    }
    return best;
}

std::size_t empirical_best_in_group(const ActionSet& a, const FpeState& st, int z) {
    const auto& set = st.active[FpeState::slot(z)];
    const auto& theta = st.theta[FpeState::slot(z)];
    return argmax_lowest(set, [&](std::size_t i) { return theta ? score(a, i, *theta) : 0.0; });
}

std::size_t empirical_best_in_union(const ActionSet& a, const FpeState& st) {
    std::vector<std::size_t> uni(st.active[0]);
    uni.insert(uni.end(), st.active[1].begin(), st.active[1].end());
    const double omega = st.omega.value_or(0.0);
    return argmax_lowest(uni, [&](std::size_t i) {
        const int z = a.actions[i].z;
        const auto& theta = st.theta[FpeState::slot(z)];
        if (!theta) return -std::numeric_limits<double>::infinity();
        return score(a, i, *theta) - z * omega;
    });
}

}  // namespace

RunResult fair_phased_elimination(Environment& env, const RunOptions& opt) {
    const ActionSet& a = env.actions();
    require_valid(a);
    if (opt.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    const double delta = resolve_delta(opt);
    const std::int64_t horizon = opt.horizon;
    const double k = static_cast<double>(a.size());
    const double d = static_cast<double>(a.d);
    const double log_t = std::log(static_cast<double>(horizon));
    const int cap = phase_cap(horizon);

    BanditSession s(env, horizon);
    RunResult result;
    result.policy = "fpe";
    result.horizon = horizon;

    FpeState st;
    st.active[0] = a.group(-1);
    st.active[1] = a.group(1);
    int z_hat = 0;
    Vector gap_hat(a.size(), 2.0);

    for (int l = 1; !s.done(); ++l) {
        if (l > cap) throw std::runtime_error("fair_phased_elimination: phase cap " + std::to_string(cap) + " exceeded");
        const double eps = std::ldexp(1.0, 2 - l);
        const double ll = static_cast<double>(l) * static_cast<double>(l + 1);
        PhaseRecord rec;
        rec.l = l;
        rec.eps = eps;
        rec.gap_estimates = gap_hat;
        std::vector<std::size_t> next[2] = {st.active[0], st.active[1]};

        for (int z : {-1, 1}) {
            if (z == -z_hat || s.done()) continue;
            const int slot = FpeState::slot(z);
            Exploration ex;
            ex.group = z;
            ex.active = st.active[slot];
            const double n = 2.0 * (d + 1.0) / (eps * eps) * std::log(k * ll / delta);
            GExpResult g = g_exp_elim(s, st.active[slot], n, eps, opt.g_tol);
            ex.planned = g.allocation.total();
            if (g.completed) {
                ex.explored = true;
                ex.rounds = g.rounds_used;
                ex.theta_hat = g.theta_hat;
                st.theta[slot] = std::move(g.theta_hat);
                next[slot] = std::move(g.survivors);
            } else {
                const std::int64_t rest = s.remaining();
                s.pull_repeated(empirical_best_in_group(a, st, z), rest);
                ex.rounds = rest;
            }
            (z > 0 ? rec.rounds_g_pos : rec.rounds_g_neg) = ex.rounds;
            rec.explorations.push_back(std::move(ex));
        }
        st.active[0] = std::move(next[0]);
        st.active[1] = std::move(next[1]);

        if (z_hat == 0 && !s.done()) {
            const DeltaDesignResult design = delta_optimal_design(a, gap_hat);
            rec.kappa_hat = design.kappa;
            if (eps <= std::cbrt(design.kappa * log_t / static_cast<double>(horizon))) {
                result.recovery_entered_at = s.t();
                s.pull_repeated(empirical_best_in_union(a, st), s.remaining());
            } else {
                const double n = 2.0 / (eps * eps) * std::log(ll / delta);
                DeltaExpResult de = delta_exp_elim(s, st.active[1], st.active[0], *st.theta[1], *st.theta[0], design,
                                                   gap_hat, n, eps);
                rec.planned_delta = de.allocation.total();
                if (de.completed) {
                    rec.explored_delta = true;
                    rec.rounds_delta = de.rounds_used;
                    rec.omega_hat = de.omega_hat;
                    st.omega = de.omega_hat;
                    gap_hat = std::move(de.gap_estimates);
                    z_hat = de.z_found;
                } else {
                    rec.rounds_delta = s.remaining();
                    s.pull_repeated(empirical_best_in_union(a, st), s.remaining());
                }
            }
        }
        rec.z_hat = z_hat;
        result.phases.push_back(std::move(rec));
    }

    result.checkpoints = s.checkpoints();
    result.cum_regret = s.regret_at_checkpoints();
    result.last_suboptimal_round = s.last_suboptimal_round();
    result.pull_counts = s.pull_counts();
    return result;
}

bool good_event_violated(const RunResult& r, const ActionSet& a, const Parameter& truth) {
    const Vector theta = truth.lifted();
    for (const PhaseRecord& p : r.phases) {
        for (const Exploration& ex : p.explorations) {
            if (!ex.explored) continue;
            for (std::size_t i : ex.active) {
                const Vector ai = a.lifted(i);
                if (std::abs(dot(ai, ex.theta_hat) - dot(ai, theta)) >= p.eps) return true;
            }
        }
        if (p.explored_delta && p.omega_hat && std::abs(*p.omega_hat - truth.omega) >= p.eps) return true;
    }
    return false;
}

}  // namespace debias
