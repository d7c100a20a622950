#include "debias/geometry.hpp"

#include "debias/rng.hpp"
#include "debias/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace debias {

Vector ActionSet::lifted(std::size_t i) const {
    const Action& act = actions.at(i);
    Vector a(act.x);
    a.push_back(static_cast<double>(act.z));
    return a;
}

std::vector<Vector> ActionSet::lifted_all() const {
    std::vector<Vector> out;
    out.reserve(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) out.push_back(lifted(i));
    return out;
}

std::vector<std::size_t> ActionSet::group(int z) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i].z == z) out.push_back(i);
    return out;
}

std::vector<std::size_t> ActionSet::all_indices() const {
    std::vector<std::size_t> out(actions.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
}

std::vector<std::string> validate(const ActionSet& a) {
    std::vector<std::string> v;
    if (a.d == 0) v.push_back("dimension d must be at least 1");
    if (a.actions.empty()) {
        v.push_back("empty action set");
        return v;
    }
    bool shapes_ok = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Action& act = a.actions[i];
        if (act.x.size() != a.d) {
            v.push_back("dimension mismatch at index " + std::to_string(i) + ": covariate has length " +
                        std::to_string(act.x.size()) + ", expected " + std::to_string(a.d));
            shapes_ok = false;
        } else if (!std::all_of(act.x.begin(), act.x.end(), [](double x) { return std::isfinite(x); })) {
            v.push_back("non-finite covariate at index " + std::to_string(i));
            shapes_ok = false;
        }
        if (act.z != 1 && act.z != -1) v.push_back("invalid group label at index " + std::to_string(i));
    }
    if (!shapes_ok) return v;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (a.actions[i].x == a.actions[j].x)
                v.push_back("duplicate covariate at indices " + std::to_string(i) + "," + std::to_string(j));
    if (a.group(1).empty()) v.push_back("empty group z=+1");
    if (a.group(-1).empty()) v.push_back("empty group z=-1");
    if (a.d > 0) {
        const Vector ones(a.size(), 1.0);
        const std::size_t rank = rank_symmetric(covariance(a, ones));
        if (rank < a.lifted_dim())
            v.push_back("span deficiency: rank " + std::to_string(rank) + " < " + std::to_string(a.lifted_dim()));
    }
    return v;
}

void require_valid(const ActionSet& a) {
    const std::vector<std::string> v = validate(a);
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid action set:";
    for (const std::string& s : v) msg << ' ' << s << ';';
    throw std::invalid_argument(msg.str());
}

KappaStar kappa_star(const ActionSet& a) {
    require_valid(a);
    const Vector e = basis_vector(a.lifted_dim(), a.d);
    CDesignResult c = c_optimal_design(a, e);
    return {c.variance, std::move(c.design)};
}

MarginForm kappa_star_margin_form(const ActionSet& a) {
    require_valid(a);
    const std::size_t d = a.d;
    const std::size_t k = a.size();
    // Columns: u+ (d), u- (d), t, slack_hi (k), slack_lo (k).
    const std::size_t cols = 2 * d + 1 + 2 * k;
    LinearProgram lp;
    lp.a = Matrix(2 * k, cols);
    lp.b.assign(2 * k, 0.0);
    lp.c.assign(cols, 0.0);
    lp.c[2 * d] = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        const Action& act = a.actions[i];
        const double z = act.z;
        //  z x^T u - t + s = -1
        for (std::size_t j = 0; j < d; ++j) {
            lp.a(i, j) = z * act.x[j];
            lp.a(i, d + j) = -z * act.x[j];
        }
        lp.a(i, 2 * d) = -1.0;
        lp.a(i, 2 * d + 1 + i) = 1.0;
        lp.b[i] = -1.0;
        // -z x^T u - t + s = 1
        for (std::size_t j = 0; j < d; ++j) {
            lp.a(k + i, j) = -z * act.x[j];
            lp.a(k + i, d + j) = z * act.x[j];
        }
        lp.a(k + i, 2 * d) = -1.0;
        lp.a(k + i, 2 * d + 1 + k + i) = 1.0;
        lp.b[k + i] = 1.0;
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error(std::string("kappa_star_margin_form: LP ended with status ") + to_string(sol.status));
    MarginForm out;
    out.u.resize(d);
    for (std::size_t j = 0; j < d; ++j) out.u[j] = sol.x[j] - sol.x[d + j];
    out.t = sol.x[2 * d];
    if (!(out.t > 0.0)) throw std::logic_error("kappa_star_margin_form: degenerate optimum t = 0");
    out.value = 1.0 / (out.t * out.t);
    return out;
}

std::optional<SeparatingMargin> separating_margin(const ActionSet& a) {
    const double kappa = kappa_star(a).value;
    if (kappa <= 1.0 + 1e-9) return std::nullopt;
    const MarginForm m = kappa_star_margin_form(a);
    SeparatingMargin out;
    out.normal = m.u;
    const double root = std::sqrt(kappa);
    out.margin_ratio = (root - 1.0) / (root + 1.0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double s = dot(a.actions[i].x, out.normal);
        if (!(s * a.actions[i].z < 0.0))
            throw std::logic_error("separating_margin: normal does not separate action " + std::to_string(i));
        lo = std::min(lo, std::abs(s));
        hi = std::max(hi, std::abs(s));
    }
    if (lo / hi < out.margin_ratio - 1e-6) throw std::logic_error("separating_margin: margin below the guaranteed ratio");
    return out;
}

double alignment_ratio(const ActionSet& a, std::span<const double> u) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double denom = 0.0;
    for (const Action& act : a.actions) {
        const double s = dot(act.x, u);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
        const double e = act.z * s + 1.0;
        denom = std::max(denom, e * e);
    }
    const double spread = hi - lo;
    return spread * spread / denom;
}

double alignment_constant_estimate(const ActionSet& a, std::size_t directions, std::uint64_t seed) {
    require_valid(a);
    if (directions == 0) throw std::invalid_argument("alignment_constant_estimate: need at least one direction");
    const std::size_t d = a.d;
    double best = 0.0;
    Vector best_u(d, 0.0);
    auto consider = [&](const Vector& u) {
        const double r = alignment_ratio(a, u);
        if (std::isfinite(r) && r > best) {
            best = r;
            best_u = u;
        }
    };

    const MarginForm m = kappa_star_margin_form(a);
    if (norm2(m.u) > 0.0)
        for (double lambda : {1.0, 2.0, 10.0, 1e3, 1e6}) {
            Vector u = m.u;
            for (double& x : u) x *= lambda;
            consider(u);
        }

    static constexpr double kRadii[] = {0.1, 0.3, 1.0, 3.0, 10.0, 1e3};
    SplitMix64 rng(seed);
    Vector u(d);
    for (std::size_t n = 0; n < directions; ++n) {
        double norm = 0.0;
        for (double& x : u) {
            x = rng.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double radius = kRadii[n % std::size(kRadii)];
        for (double& x : u) x *= radius / norm;
        consider(u);
    }

    // Local refinement around the incumbent.
    double step = 0.25 * std::max(1.0, norm2(best_u));
    for (int round = 0; round < 200 && step > 1e-9; ++round) {
        bool improved = false;
        for (std::size_t j = 0; j < d; ++j)
            for (double sgn : {1.0, -1.0}) {
                Vector v = best_u;
                v[j] += sgn * step;
                const double before = best;
                consider(v);
                improved = improved || best > before;
            }
        if (!improved) step *= 0.5;
    }
    return best;
}

}  // namespace debias
