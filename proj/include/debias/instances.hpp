#pragma once

#include "debias/action_set.hpp"
#include "debias/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace debias {

struct InstanceMeta {
    std::string family;  // "worst-case", "gap" or "small-d"
    double kappa = 1.0;
    std::size_t d = 0;
    int alternative = 1;
    std::optional<double> delta_min;
    std::optional<double> delta_neq;
    std::optional<std::int64_t> horizon;
    std::optional<double> rho;
    std::optional<int> small_d_case;
};

struct ProblemInstance {
    ActionSet actions;
    Parameter theta;
    InstanceMeta meta;
};

/// rho_T = (kappa / T)^{1/3}.
double worst_case_rho(double kappa, std::int64_t horizon);

/// Two-problem family on e_1 (z=+1), e_i (z=-1, i=2..d) and
/// -(1 - 2/(sqrt(kappa)+1)) e_1 (z=-1). Requires kappa >= 1, d >= 2, T > 64 kappa.
std::pair<ProblemInstance, ProblemInstance> worst_case_instance(double kappa, std::size_t d, std::int64_t horizon);

/// Problem `alternative` (1..floor(d/2)+1) of the gap family. Requires
/// kappa >= 1, d >= 4, 0 < delta_min <= delta_neq and an admissible parameter.
/// The lower bound for this family is stated for gaps below 1/8; larger gaps
/// are accepted as long as max |x^T gamma| <= 1.
ProblemInstance gap_instance(double kappa, std::size_t d, double delta_min, double delta_neq, int alternative = 1);

/// First problem of the low-dimensional gap families (d in {2, 3}). In these
/// families the declared gaps are lower bounds on the realized ones.
ProblemInstance small_d_gap_instance(std::size_t d, int which_case, double kappa, std::optional<double> delta_min,
                                     std::optional<double> delta_neq);

/// Checks the declared metadata: validity, kappa*, admissibility, gaps.
std::vector<std::string> verify_instance(const ProblemInstance& p);

}  // namespace debias
