#pragma once

#include "debias/action_set.hpp"
#include "debias/design.hpp"

#include <cstdint>
#include <optional>

namespace debias {

struct KappaStar {
    double value = 0.0;
    Design design;
};

/// e_{d+1}-optimal variance: the smallest variance of an unbiased bias estimate
/// under a unit sampling budget.
KappaStar kappa_star(const ActionSet& a);

struct MarginForm {
    double value = 0.0;
    /// Minimizer of max_x |z_x x^T u + 1|.
    Vector u;
    double t = 0.0;
};

/// kappa* = max_u 1 / max_x (x^T u + z_x)^2, as a Chebyshev linear program.
MarginForm kappa_star_margin_form(const ActionSet& a);

struct SeparatingMargin {
    Vector normal;
    double margin_ratio = 0.0;
};

/// Hyperplane through the origin separating the groups, or nullopt when
/// kappa* = 1. Throws std::logic_error if the returned normal fails to separate.
std::optional<SeparatingMargin> separating_margin(const ActionSet& a);

/// Lower estimate of
///   alpha = max_u max_{x,x'} ((x - x')^T u)^2 / max_x (z_x x^T u + 1)^2
/// from random directions at several radii plus scaled copies of the margin
/// normal.
double alignment_constant_estimate(const ActionSet& a, std::size_t directions, std::uint64_t seed = 1);

/// The ratio inside alpha at a given u.
double alignment_ratio(const ActionSet& a, std::span<const double> u);

}  // namespace debias
