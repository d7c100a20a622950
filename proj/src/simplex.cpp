#include "debias/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace debias {

namespace {

constexpr double kPivotTol = 1e-9;

struct Tableau {
    std::size_t m = 0;
    std::size_t width = 0;  // columns including rhs
    std::vector<Vector> rows;
    Vector obj;  // reduced costs; obj[rhs] = -objective value
    std::vector<std::size_t> basis;

    std::size_t rhs() const { return width - 1; }

    void pivot(std::size_t r, std::size_t col) {
        Vector& pr = rows[r];
        const double p = pr[col];
        for (double& v : pr) v /= p;
        pr[col] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r) continue;
            const double f = rows[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) rows[i][j] -= f * pr[j];
            rows[i][col] = 0.0;
        }
        const double f = obj[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j < width; ++j) obj[j] -= f * pr[j];
            obj[col] = 0.0;
        }
        basis[r] = col;
    }

    void price(const Vector& cost) {
        obj.assign(width, 0.0);
        for (std::size_t j = 0; j + 1 < width; ++j) obj[j] = j < cost.size() ? cost[j] : 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double cb = basis[i] < cost.size() ? cost[basis[i]] : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) obj[j] -= cb * rows[i][j];
        }
    }

    // Returns optimal, unbounded or iteration_limit.
    LpStatus iterate(std::size_t allowed_cols, int& pivots, int max_pivots) {
        while (true) {
            std::size_t enter = allowed_cols;
            for (std::size_t j = 0; j < allowed_cols; ++j)
                if (obj[j] < -kPivotTol) {
                    enter = j;
                    break;
                }
            if (enter == allowed_cols) return LpStatus::optimal;
            std::size_t leave = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                const double a = rows[i][enter];
                if (a <= kPivotTol) continue;
                const double ratio = rows[i][rhs()] / a;
                if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && leave < m && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m) return LpStatus::unbounded;
            if (pivots >= max_pivots) return LpStatus::iteration_limit;
            pivot(leave, enter);
            ++pivots;
        }
    }
};

}  // namespace

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::iteration_limit: return "iteration limit";
    }
    return "unknown";
}

LpSolution solve_lp(const LinearProgram& lp, int max_pivots) {
    const std::size_t m = lp.a.rows();
    const std::size_t n = lp.a.cols();
    if (lp.b.size() != m || lp.c.size() != n) throw std::invalid_argument("solve_lp: inconsistent dimensions");

    Tableau t;
    t.m = m;
    t.width = n + m + 1;
    t.rows.assign(m, Vector(t.width, 0.0));
    t.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = sign * lp.a(i, j);
        t.rows[i][n + i] = 1.0;
        t.rows[i][t.rhs()] = sign * lp.b[i];
        t.basis[i] = n + i;
    }

    LpSolution sol;
    Vector phase1_cost(n + m, 0.0);
    for (std::size_t i = 0; i < m; ++i) phase1_cost[n + i] = 1.0;
    t.price(phase1_cost);
    LpStatus st = t.iterate(n + m, sol.pivots, max_pivots);
    if (st == LpStatus::iteration_limit) {
        sol.status = st;
        return sol;
    }
    double bnorm = 0.0;
    for (double v : lp.b) bnorm = std::max(bnorm, std::abs(v));
    if (-t.obj[t.rhs()] > 1e-9 * (1.0 + bnorm)) {
        sol.status = LpStatus::infeasible;
        return sol;
    }

    // Drive artificial variables out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.m;) {
        if (t.basis[i] < n) {
            ++i;
            continue;
        }
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(t.rows[i][j]) > kPivotTol) {
                col = j;
                break;
            }
        if (col < n) {
            t.pivot(i, col);
            ++i;
        } else {
            t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
            t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
            --t.m;
        }
    }

    t.price(lp.c);
    st = t.iterate(n, sol.pivots, max_pivots);
    sol.status = st;
    if (st != LpStatus::optimal) return sol;

    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < t.m; ++i) sol.x[t.basis[i]] = std::max(0.0, t.rows[i][t.rhs()]);
    sol.value = dot(lp.c, sol.x);
    sol.basis = t.basis;
    return sol;
}

}  // namespace debias
