#pragma once

#include "debias/linalg.hpp"

#include <cstddef>
#include <vector>

namespace debias {

/// minimize c^T x  subject to  A x = b, x >= 0.
struct LinearProgram {
    Matrix a;
    Vector b;
    Vector c;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vector x;
    double value = 0.0;
    /// Indices of the basic columns at termination (redundant rows removed).
    std::vector<std::size_t> basis;
    int pivots = 0;
};

/// Dense two-phase tableau simplex with Bland's rule. The returned x is a
/// vertex, so at most rank(A) entries are nonzero.
LpSolution solve_lp(const LinearProgram& lp, int max_pivots = 100000);

const char* to_string(LpStatus s);

}  // namespace debias
