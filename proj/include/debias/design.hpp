#pragma once

#include "debias/action_set.hpp"
#include "debias/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace debias {

enum class DesignKind { probability, measure };

/// Nonnegative weights indexed by action. Probability designs sum to one.
struct Design {
    Vector weights;
    DesignKind kind = DesignKind::probability;

    std::vector<std::size_t> support() const;
    double total() const;
};

struct Allocation {
    std::vector<std::int64_t> counts;

    std::int64_t total() const;
};

/// V(w) = sum_x w_x a_x a_x^T over the lifted vectors.
Matrix covariance(const ActionSet& a, std::span<const double> weights);
Matrix covariance(std::span<const Vector> vectors, std::span<const double> weights);
Matrix covariance(const ActionSet& a, const Allocation& alloc);

/// a^T V^+ a for every action.
Vector leverages(const ActionSet& a, std::span<const double> weights);

struct GDesignResult {
    Design design;
    double value = 0.0;  // max leverage over the active set
    std::size_t rank = 0;
    int iterations = 0;
};

/// Fedorov-Wynn iterations with away steps on the active subset, projected
/// onto the span of the active lifted vectors.
GDesignResult g_optimal_design(const ActionSet& a, std::span<const std::size_t> active, double tol = 1e-3);
GDesignResult g_optimal_design(const ActionSet& a, double tol = 1e-3);

inline constexpr int kGDesignMaxIterations = 100000;
inline constexpr double kPruneThreshold = 1e-9;

struct CDesignResult {
    Design design;
    double variance = 0.0;
    /// Signed Elfving coefficients: sum_x beta_x a_x = c.
    Vector beta;
    int iterations = 0;
};

/// min c^T V(pi)^+ c through the l1 program min sum|beta| s.t. sum beta_x a_x = c.
/// Throws std::invalid_argument when c is not spanned by the vectors.
CDesignResult c_optimal_design(std::span<const Vector> vectors, std::span<const double> c);
CDesignResult c_optimal_design(const ActionSet& a, std::span<const double> c);

struct DeltaDesignResult {
    Design measure;
    double kappa = 0.0;  // sum_x mu_x Delta_x
    int iterations = 0;
};

/// Regret-weighted design: minimize sum mu_x Delta_x s.t. e_{d+1}^T V(mu)^+ e_{d+1} <= 1.
DeltaDesignResult delta_optimal_design(const ActionSet& a, std::span<const double> gaps);

/// counts_x = ceil(m * w_x) on the support.
Allocation round_allocation(const Design& dsn, double m);

}  // namespace debias
