#pragma once

#include "debias/action_set.hpp"
#include "debias/linalg.hpp"
#include "debias/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace debias {

/// theta = (gamma, omega).
struct Parameter {
    Vector gamma;
    double omega = 0.0;

    Vector lifted() const;
};

/// x^T gamma for every action.
Vector true_rewards(const ActionSet& a, const Parameter& p);
/// a_x^T theta for every action.
Vector evaluations(const ActionSet& a, const Parameter& p);

/// max_x |x^T gamma| <= 1 + tol.
bool is_admissible(const ActionSet& a, const Parameter& p, double tol = 1e-12);

class Environment {
public:
    Environment(ActionSet actions, Parameter theta, double noise_std = 1.0, std::uint64_t seed = 0);

    /// x^T gamma + z omega + noise_std * xi.
    double evaluate(std::size_t i);

    const ActionSet& actions() const { return actions_; }
    const Parameter& theta() const { return theta_; }
    double noise_std() const { return noise_std_; }

private:
    ActionSet actions_;
    Parameter theta_;
    Vector means_;
    double noise_std_;
    SplitMix64 rng_;
};

struct GapInfo {
    Vector gaps;
    double delta_min = 0.0;
    double delta_neq = 0.0;
    std::size_t best = 0;
    bool unique = true;
};

GapInfo gaps(const ActionSet& a, const Parameter& p);

/// Sum of the gaps of the chosen actions.
double cumulative_regret(const ActionSet& a, const Parameter& p, std::span<const std::size_t> chosen);

}  // namespace debias
