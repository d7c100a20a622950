#include "debias/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace debias {

Vector Parameter::lifted() const {
    Vector t(gamma);
    t.push_back(omega);
    return t;
}

Vector true_rewards(const ActionSet& a, const Parameter& p) {
    if (p.gamma.size() != a.d) throw std::invalid_argument("parameter dimension does not match the action set");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = dot(a.actions[i].x, p.gamma);
    return r;
}

Vector evaluations(const ActionSet& a, const Parameter& p) {
    Vector r = true_rewards(a, p);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a.actions[i].z * p.omega;
    return r;
}

bool is_admissible(const ActionSet& a, const Parameter& p, double tol) {
    const Vector r = true_rewards(a, p);
    return std::all_of(r.begin(), r.end(), [&](double v) { return std::abs(v) <= 1.0 + tol; });
}

Environment::Environment(ActionSet actions, Parameter theta, double noise_std, std::uint64_t seed)
    : actions_(std::move(actions)), theta_(std::move(theta)), noise_std_(noise_std), rng_(seed) {
    if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_))
        throw std::invalid_argument("noise_std must be a nonnegative finite number");
    means_ = evaluations(actions_, theta_);
}

double Environment::evaluate(std::size_t i) {
    if (i >= means_.size()) throw std::out_of_range("evaluate: action index " + std::to_string(i) + " out of range");
    const double xi = rng_.normal();
    return means_[i] + noise_std_ * xi;
}

GapInfo gaps(const ActionSet& a, const Parameter& p) {
    const Vector r = true_rewards(a, p);
    GapInfo g;
    if (r.empty()) return g;
    for (std::size_t i = 1; i < r.size(); ++i)
        if (r[i] > r[g.best]) g.best = i;
    const double top = r[g.best];
    g.gaps.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) g.gaps[i] = i == g.best ? 0.0 : top - r[i];
    g.delta_min = std::numeric_limits<double>::infinity();
    g.delta_neq = std::numeric_limits<double>::infinity();
    const int zbest = a.actions[g.best].z;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i == g.best) continue;
        g.delta_min = std::min(g.delta_min, g.gaps[i]);
        if (a.actions[i].z == -zbest) g.delta_neq = std::min(g.delta_neq, g.gaps[i]);
        if (g.gaps[i] <= 1e-12 * (1.0 + std::abs(top))) g.unique = false;
    }
    return g;
}

double cumulative_regret(const ActionSet& a, const Parameter& p, std::span<const std::size_t> chosen) {
    const GapInfo g = gaps(a, p);
    double total = 0.0;
    for (std::size_t i : chosen) {
        if (i >= g.gaps.size()) throw std::out_of_range("cumulative_regret: action index out of range");
        total += g.gaps[i];
    }
    return total;
}

}  // namespace debias
