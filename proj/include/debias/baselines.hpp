#pragma once

#include "debias/fpe.hpp"
#include "debias/model.hpp"

#include <string>
#include <vector>

namespace debias {

/// Phased elimination on the lifted vectors of the whole action set that
/// takes the biased evaluations at face value.
RunResult unfair_phased_elimination(Environment& env, const RunOptions& opt);

/// The same eliminator fed with debiased observations y - z omega_true.
RunResult known_bias_eliminator(Environment& env, const RunOptions& opt, double omega_true);

/// Plays argmax x^T gamma every round.
RunResult static_oracle(Environment& env, const Parameter& p, const RunOptions& opt);

const std::vector<std::string>& policy_names();
bool is_policy(const std::string& name);

/// Dispatch by name: "fpe", "unfair-pe", "known-bias", "oracle". The last two
/// read the true parameter from the environment.
RunResult run_policy(const std::string& name, Environment& env, const RunOptions& opt);

}  // namespace debias
