#include "debias/instances.hpp"

#include "debias/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace debias {

namespace {

double alpha_of(double kappa) { return 2.0 / (std::sqrt(kappa) + 1.0); }

void require_kappa(double kappa) {
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be a finite number >= 1");
}

Vector unit(std::size_t d, std::size_t i, double scale = 1.0) {
    Vector v(d, 0.0);
    v[i] = scale;
    return v;
}

// e_1 (z=+1), e_i (z=-1) for i=2..d, -(1-alpha) e_1 (z=-1).
ActionSet worst_case_actions(double kappa, std::size_t d) {
    ActionSet a;
    a.d = d;
    a.actions.push_back({unit(d, 0), 1});
    for (std::size_t i = 1; i < d; ++i) a.actions.push_back({unit(d, i), -1});
    a.actions.push_back({unit(d, 0, -(1.0 - alpha_of(kappa))), -1});
    return a;
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

double worst_case_rho(double kappa, std::int64_t horizon) {
    return std::cbrt(kappa / static_cast<double>(horizon));
}

std::pair<ProblemInstance, ProblemInstance> worst_case_instance(double kappa, std::size_t d, std::int64_t horizon) {
    require_kappa(kappa);
    if (d < 2) throw std::invalid_argument("worst_case_instance: d must be at least 2");
    if (!(static_cast<double>(horizon) > 64.0 * kappa))
        throw std::invalid_argument("worst_case_instance: T must exceed 64 kappa");
    const double rho = worst_case_rho(kappa, horizon);
    const ActionSet a = worst_case_actions(kappa, d);

    ProblemInstance p1, p2;
    p1.actions = p2.actions = a;
    p1.theta.gamma.assign(d, -rho / 2.0);
    p2.theta.gamma.assign(d, rho / 2.0);
    p1.theta.gamma[0] = (1.0 + rho) / 2.0;
    p1.theta.gamma[1] = (1.0 - rho) / 2.0;
    p2.theta.gamma[0] = (1.0 - rho) / 2.0;
    p2.theta.gamma[1] = (1.0 + rho) / 2.0;
    p1.theta.omega = -rho / 2.0;
    p2.theta.omega = rho / 2.0;
    for (auto* p : {&p1, &p2}) {
        p->meta.family = "worst-case";
        p->meta.kappa = kappa;
        p->meta.d = d;
        p->meta.horizon = horizon;
        p->meta.rho = rho;
    }
    p1.meta.alternative = 1;
    p2.meta.alternative = 2;
    return {std::move(p1), std::move(p2)};
}

ProblemInstance gap_instance(double kappa, std::size_t d, double delta_min, double delta_neq, int alternative) {
    require_kappa(kappa);
    if (d < 4) throw std::invalid_argument("gap_instance: d must be at least 4");
    if (!(delta_min > 0.0 && delta_min <= delta_neq && std::isfinite(delta_neq)))
        throw std::invalid_argument("gap_instance: need 0 < delta_min <= delta_neq");
    const std::size_t h = d / 2;
    if (alternative < 1 || static_cast<std::size_t>(alternative) > h + 1)
        throw std::invalid_argument("gap_instance: alternative must lie in 1.." + std::to_string(h + 1));

    ProblemInstance p;
    p.actions.d = d;
    for (std::size_t i = 0; i < d; ++i) p.actions.actions.push_back({unit(d, i), i < h ? 1 : -1});
    p.actions.actions.push_back({unit(d, 0, -(1.0 - alpha_of(kappa))), -1});

    const bool swapped = static_cast<std::size_t>(alternative) == h + 1;
    const double hi = (1.0 + delta_neq - delta_min) / 2.0;
    const double lo = (1.0 - delta_neq - delta_min) / 2.0;
    Vector& g = p.theta.gamma;
    g.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) g[j] = (j < h) != swapped ? hi : lo;
    g[0] += delta_min;
    g[h] += delta_min;
    if (alternative >= 2 && !swapped) {
        const std::size_t i = static_cast<std::size_t>(alternative) - 1;
        g[i] += 2.0 * delta_min;
        g[h + i] += 2.0 * delta_min;
    }
    p.theta.omega = swapped ? delta_neq / 2.0 : -delta_neq / 2.0;

    if (!is_admissible(p.actions, p.theta))
        throw std::invalid_argument("gap_instance: gaps too large, some |x^T gamma| exceeds 1");

    p.meta.family = "gap";
    p.meta.kappa = kappa;
    p.meta.d = d;
    p.meta.alternative = alternative;
    p.meta.delta_min = delta_min;
    p.meta.delta_neq = delta_neq;
    return p;
}

ProblemInstance small_d_gap_instance(std::size_t d, int which_case, double kappa, std::optional<double> delta_min,
                                     std::optional<double> delta_neq) {
    require_kappa(kappa);
    if (d != 2 && d != 3) throw std::invalid_argument("small_d_gap_instance: d must be 2 or 3");
    auto in_range = [](std::optional<double> v) { return !v || (*v > 0.0 && *v < 0.125); };
    if (!in_range(delta_min) || !in_range(delta_neq))
        throw std::invalid_argument("small_d_gap_instance: gaps must lie in (0, 1/8)");
    if (delta_min && delta_neq && *delta_min > *delta_neq)
        throw std::invalid_argument("small_d_gap_instance: need delta_min <= delta_neq");

    ProblemInstance p;
    p.meta.family = "small-d";
    p.meta.kappa = kappa;
    p.meta.d = d;
    p.meta.small_d_case = which_case;
    p.meta.delta_min = delta_min;
    p.meta.delta_neq = delta_neq;
    if (which_case == 1) {
        if (!delta_min) throw std::invalid_argument("small_d_gap_instance: case 1 needs delta_min");
        const double dm = *delta_min;
        p.actions.d = d;
        for (std::size_t i = 0; i < d; ++i) p.actions.actions.push_back({unit(d, i), 1});
        p.actions.actions.push_back({unit(d, 0, -(1.0 - alpha_of(kappa))), -1});
        p.theta.gamma.assign(d, (1.0 - dm) / 2.0);
        p.theta.gamma[0] += dm;
        p.theta.omega = 0.0;
    } else if (which_case == 2) {
        if (!delta_neq) throw std::invalid_argument("small_d_gap_instance: case 2 needs delta_neq");
        const double dn = *delta_neq;
        p.actions = worst_case_actions(kappa, d);
        p.theta.gamma.assign(d, 0.0);
        p.theta.gamma[0] = (1.0 + dn) / 2.0;
        p.theta.gamma[1] = (1.0 - dn) / 2.0;
        if (d == 3) p.theta.gamma[2] = -dn / 2.0;
        p.theta.omega = -dn / 2.0;
    } else {
        throw std::invalid_argument("small_d_gap_instance: case must be 1 or 2");
    }
    return p;
}

std::vector<std::string> verify_instance(const ProblemInstance& p) {
    std::vector<std::string> issues = validate(p.actions);
    if (!issues.empty()) return issues;
    const double kappa = kappa_star(p.actions).value;
    if (!close_rel(kappa, p.meta.kappa, 1e-6)) {
        std::ostringstream s;
        s << "kappa* is " << kappa << ", declared " << p.meta.kappa;
        issues.push_back(s.str());
    }
    if (!is_admissible(p.actions, p.theta)) issues.push_back("parameter is not admissible: some |x^T gamma| > 1");
    const GapInfo g = gaps(p.actions, p.theta);
    if (!g.unique) issues.push_back("best action is not unique");
    const bool exact = p.meta.family == "gap";
    auto check = [&](const char* what, std::optional<double> declared, double actual) {
        if (!declared) return;
        const bool ok = exact ? std::abs(actual - *declared) <= 1e-12 : actual >= *declared - 1e-12;
        if (!ok) {
            std::ostringstream s;
            s << what << " is " << actual << ", declared " << *declared;
            issues.push_back(s.str());
        }
    };
    check("delta_min", p.meta.delta_min, g.delta_min);
    check("delta_neq", p.meta.delta_neq, g.delta_neq);
    return issues;
}

}  // namespace debias
