#pragma once

#include "debias/action_set.hpp"
#include "debias/design.hpp"
#include "debias/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace debias {

/// Powers of two up to the horizon, plus the horizon itself.
std::vector<std::int64_t> pow2_checkpoints(std::int64_t horizon);

/// Wraps an environment for one run: counts rounds and tracks the true regret
/// at checkpoints. Policies only see actions() and the observations returned
/// by pull().
class BanditSession {
public:
    BanditSession(Environment& env, std::int64_t horizon);

    double pull(std::size_t i);
    /// Pulls action i n times (n clipped to the remaining budget); returns the
    /// sum of the observations.
    double pull_repeated(std::size_t i, std::int64_t n);

    std::int64_t t() const { return t_; }
    std::int64_t horizon() const { return horizon_; }
    std::int64_t remaining() const { return horizon_ - t_; }
    bool done() const { return t_ >= horizon_; }
    const ActionSet& actions() const { return env_.actions(); }

    const std::vector<std::int64_t>& checkpoints() const { return checkpoints_; }
    const Vector& regret_at_checkpoints() const { return recorded_; }
    double cumulative_regret() const { return regret_; }
    /// Last round (1-based) in which a suboptimal action was played; 0 if none.
    std::int64_t last_suboptimal_round() const { return last_bad_; }
    const std::vector<std::int64_t>& pull_counts() const { return pulls_; }

private:
    Environment& env_;
    std::int64_t horizon_;
    std::int64_t t_ = 0;
    Vector gaps_;
    double regret_ = 0.0;
    std::int64_t last_bad_ = 0;
    std::vector<std::int64_t> checkpoints_;
    Vector recorded_;
    std::size_t next_checkpoint_ = 0;
    std::vector<std::int64_t> pulls_;
};

/// Running sums of a a^T and y a.
struct ObservationBatch {
    Matrix v;
    Vector b;
    std::int64_t count = 0;

    explicit ObservationBatch(std::size_t dim) : v(dim, dim), b(dim, 0.0) {}
    void add(std::span<const double> a, double y);
    /// n observations of the same vector with total response sum_y.
    void add_repeated(std::span<const double> a, double sum_y, std::int64_t n);
};

/// theta_hat = V^+ sum y a.
Vector ols(const ObservationBatch& batch);

/// One exploration block of a phase, recorded for diagnostics.
struct Exploration {
    int group = 0;  // -1, +1, or 0 for a block over the whole action set
    bool explored = false;
    std::vector<std::size_t> active;
    Vector theta_hat;
    std::int64_t planned = 0;
    std::int64_t rounds = 0;
};

struct PhaseRecord {
    int l = 0;
    double eps = 0.0;
    std::int64_t rounds_g_pos = 0;
    std::int64_t rounds_g_neg = 0;
    std::int64_t rounds_delta = 0;
    std::optional<double> kappa_hat;
    int z_hat = 0;  // identified group at the end of the phase

    std::vector<Exploration> explorations;
    Vector gap_estimates;  // Delta-hat used in this phase
    bool explored_delta = false;
    std::optional<double> omega_hat;
    std::int64_t planned_delta = 0;
};

struct RunResult {
    std::string policy;
    std::vector<std::int64_t> checkpoints;
    Vector cum_regret;
    std::vector<PhaseRecord> phases;
    std::optional<std::int64_t> recovery_entered_at;
    std::uint64_t seed = 0;

    std::int64_t horizon = 0;
    std::int64_t last_suboptimal_round = 0;
    std::vector<std::int64_t> pull_counts;
};

struct RunOptions {
    std::int64_t horizon = 0;
    /// Confidence level; 1/T when absent.
    std::optional<double> delta;
    double g_tol = 1e-3;
};

double resolve_delta(const RunOptions& opt);

struct GExpResult {
    bool completed = false;
    Vector theta_hat;
    std::vector<std::size_t> survivors;
    std::int64_t rounds_used = 0;
    Allocation allocation;
};

/// G-optimal exploration of `active` with ceil(n pi(x)) pulls per action and
/// elimination of actions more than 3 eps below the empirical best. When the
/// block does not fit in the remaining budget nothing is sampled and
/// completed is false.
GExpResult g_exp_elim(BanditSession& s, std::span<const std::size_t> active, double n, double eps,
                      double g_tol = 1e-3);

struct DeltaExpResult {
    bool completed = false;
    int z_found = 0;
    Vector gap_estimates;
    double omega_hat = 0.0;
    std::int64_t rounds_used = 0;
    Allocation allocation;
};

/// Delta-optimal bias estimation over the full action set followed by the
/// debiased group test. Gap estimates are refreshed on active_pos and
/// active_neg. As with g_exp_elim, an overrunning block is not sampled.
DeltaExpResult delta_exp_elim(BanditSession& s, std::span<const std::size_t> active_pos,
                              std::span<const std::size_t> active_neg, const Vector& theta_pos,
                              const Vector& theta_neg, const DeltaDesignResult& design, const Vector& gap_estimates,
                              double n, double eps);

/// Fair Phased Elimination.
RunResult fair_phased_elimination(Environment& env, const RunOptions& opt);

/// Highest phase index allowed for horizon T.
int phase_cap(std::int64_t horizon);

/// True if some completed exploration misses its eps_l accuracy: a group
/// estimate off by eps_l or more on an active action, or a bias estimate off
/// by eps_l or more.
bool good_event_violated(const RunResult& r, const ActionSet& a, const Parameter& truth);

}  // namespace debias
