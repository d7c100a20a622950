#pragma once

#include "debias/linalg.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace debias {

struct Action {
    Vector x;
    int z = 1;  // group label, -1 or +1
};

/// Covariates with their sensitive attribute. Lifted vectors a_x = (x, z_x)
/// live in dimension d + 1.
struct ActionSet {
    std::size_t d = 0;
    std::vector<Action> actions;

    std::size_t size() const { return actions.size(); }
    std::size_t lifted_dim() const { return d + 1; }
    Vector lifted(std::size_t i) const;
    std::vector<Vector> lifted_all() const;
    /// Indices of the actions with z == group.
    std::vector<std::size_t> group(int z) const;
    std::vector<std::size_t> all_indices() const;
};

/// Empty iff the set is well formed: consistent dimensions, labels in {-1,+1},
/// distinct covariates, both groups present, lifted vectors spanning R^{d+1}.
std::vector<std::string> validate(const ActionSet& a);

/// Throws std::invalid_argument listing the violations, if any.
void require_valid(const ActionSet& a);

}  // namespace debias
