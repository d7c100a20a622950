#include "debias/design.hpp"

#include "debias/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace debias {

std::vector<std::size_t> Design::support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0) s.push_back(i);
    return s;
}

double Design::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::int64_t Allocation::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

Matrix covariance(std::span<const Vector> vectors, std::span<const double> weights) {
    if (vectors.size() != weights.size()) throw std::invalid_argument("covariance: weight count mismatch");
    const std::size_t n = vectors.empty() ? 0 : vectors.front().size();
    Matrix v(n, n);
    for (std::size_t i = 0; i < vectors.size(); ++i)
        if (weights[i] != 0.0) v.add_outer(vectors[i], vectors[i], weights[i]);
    return v;
}

Matrix covariance(const ActionSet& a, std::span<const double> weights) {
    const std::vector<Vector> lifted = a.lifted_all();
    return covariance(lifted, weights);
}

Matrix covariance(const ActionSet& a, const Allocation& alloc) {
    Vector w(alloc.counts.begin(), alloc.counts.end());
    return covariance(a, w);
}

Vector leverages(const ActionSet& a, std::span<const double> weights) {
    const Matrix vp = pseudo_inverse(covariance(a, weights));
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vector ai = a.lifted(i);
        out[i] = dot(ai, vp * std::span<const double>(ai));
    }
    return out;
}

namespace {

Matrix inverse_or_pinv(const Matrix& m) {
    try {
        return spd_inverse(m);
    } catch (const std::domain_error&) {
        return pseudo_inverse(m);
    }
}

Vector projected_leverages(const std::vector<Vector>& p, const Vector& w) {
    const Matrix minv = inverse_or_pinv(covariance(p, w));
    Vector lev(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) lev[i] = dot(p[i], minv * std::span<const double>(p[i]));
    return lev;
}

// Removes support points while keeping sum w_i p_i p_i^T fixed up to scale.
void caratheodory_reduce(const std::vector<Vector>& p, Vector& w, std::size_t bound) {
    const std::size_t r = p.empty() ? 0 : p.front().size();
    while (true) {
        std::vector<std::size_t> supp;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] > 0.0) supp.push_back(i);
        if (supp.size() <= bound) return;
        // Columns are the upper-triangular moments of p_i p_i^T.
        const std::size_t s = supp.size();
        std::vector<Vector> moments(s);
        for (std::size_t c = 0; c < s; ++c) {
            const Vector& v = p[supp[c]];
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = i; j < r; ++j) moments[c].push_back(v[i] * v[j]);
        }
        Matrix gram(s, s);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) gram(i, j) = dot(moments[i], moments[j]);
        const SymmetricEigen eig = eigen_symmetric(gram);
        Vector lambda(s);
        for (std::size_t i = 0; i < s; ++i) lambda[i] = eig.vectors(i, s - 1);
        if (std::accumulate(lambda.begin(), lambda.end(), 0.0) < 0.0)
            for (double& l : lambda) l = -l;
        double step = std::numeric_limits<double>::infinity();
        std::size_t hit = s;
        for (std::size_t i = 0; i < s; ++i)
            if (lambda[i] > 1e-15 && w[supp[i]] / lambda[i] < step) {
                step = w[supp[i]] / lambda[i];
                hit = i;
            }
        if (hit == s) return;
        for (std::size_t i = 0; i < s; ++i) w[supp[i]] = std::max(0.0, w[supp[i]] - step * lambda[i]);
        w[supp[hit]] = 0.0;
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= total;
    }
}

}  // namespace

GDesignResult g_optimal_design(const ActionSet& a, std::span<const std::size_t> active, double tol) {
    if (active.empty()) throw std::invalid_argument("g_optimal_design: empty active set");
    if (!(tol > 0.0)) throw std::invalid_argument("g_optimal_design: tol must be positive");
    std::vector<std::size_t> idx(active.begin(), active.end());
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
        throw std::invalid_argument("g_optimal_design: duplicate active index");
    if (idx.back() >= a.size()) throw std::invalid_argument("g_optimal_design: active index out of range");

    std::vector<Vector> lifted;
    for (std::size_t i : idx) lifted.push_back(a.lifted(i));
    const Matrix basis = orthonormal_span_basis(lifted);
    const std::size_t r = basis.rows();
    if (r == 0) throw std::invalid_argument("g_optimal_design: active vectors are all zero");
    std::vector<Vector> p;
    for (const Vector& v : lifted) p.push_back(basis * std::span<const double>(v));

    const std::size_t n = idx.size();
    const double rd = static_cast<double>(r);
    Vector w(n, 1.0 / static_cast<double>(n));
    GDesignResult out;
    out.rank = r;

    while (out.iterations < kGDesignMaxIterations) {
        const Vector lev = projected_leverages(p, w);
        const double top = *std::max_element(lev.begin(), lev.end());
        std::size_t imax = 0;
        while (lev[imax] < top - 1e-12 * top) ++imax;
        std::size_t imin = n;
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] > kPruneThreshold && (imin == n || lev[i] < lev[imin])) imin = i;
        const double lmax = lev[imax];
        const double lmin = lev[imin];
        if (lmax <= (1.0 + tol) * rd && lmin >= lmax - tol * rd) break;
        ++out.iterations;

        if (lmax - rd >= rd - lmin) {
            const double s = (lmax - rd) / (rd * (lmax - 1.0));
            for (double& x : w) x *= (1.0 - s);
            w[imax] += s;
        } else {
            const double wi = w[imin];
            if (wi >= 1.0) break;
            const double drop = -wi / (1.0 - wi);
            double s = lmin <= 1.0 ? drop : (lmin - rd) / (rd * (lmin - 1.0));
            const bool dropping = s <= drop;
            if (dropping) s = drop;
            for (double& x : w) x *= (1.0 - s);
            w[imin] = dropping ? 0.0 : w[imin] + s;
        }
    }

    for (double& x : w)
        if (x < kPruneThreshold) x = 0.0;
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
    const std::size_t bound = (a.d + 1) * (a.d + 2) / 2;
    caratheodory_reduce(p, w, bound);

    const Vector lev = projected_leverages(p, w);
    out.value = *std::max_element(lev.begin(), lev.end());
    out.design.kind = DesignKind::probability;
    out.design.weights.assign(a.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) out.design.weights[idx[i]] = w[i];
    return out;
}

GDesignResult g_optimal_design(const ActionSet& a, double tol) {
    const std::vector<std::size_t> all = a.all_indices();
    return g_optimal_design(a, all, tol);
}

CDesignResult c_optimal_design(std::span<const Vector> vectors, std::span<const double> c) {
    if (vectors.empty()) throw std::invalid_argument("c_optimal_design: no vectors");
    const std::size_t n = c.size();
    if (norm_inf(c) == 0.0) throw std::invalid_argument("c_optimal_design: target vector is zero");
    const std::size_t k = vectors.size();
    LinearProgram lp;
    lp.a = Matrix(n, 2 * k);
    for (std::size_t j = 0; j < k; ++j) {
        if (vectors[j].size() != n) throw std::invalid_argument("c_optimal_design: dimension mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            lp.a(i, j) = vectors[j][i];
            lp.a(i, k + j) = -vectors[j][i];
        }
    }
    lp.b.assign(c.begin(), c.end());
    lp.c.assign(2 * k, 1.0);
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::infeasible)
        throw std::invalid_argument("c_optimal_design: target vector is not in the span of the actions");
    if (sol.status != LpStatus::optimal)
        throw std::runtime_error(std::string("c_optimal_design: LP ended with status ") + to_string(sol.status));

    CDesignResult out;
    out.iterations = sol.pivots;
    out.beta.resize(k);
    double l1 = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        out.beta[j] = sol.x[j] - sol.x[k + j];
        l1 += std::abs(out.beta[j]);
    }
    out.design.kind = DesignKind::probability;
    out.design.weights.resize(k);
    for (std::size_t j = 0; j < k; ++j) out.design.weights[j] = std::abs(out.beta[j]) / l1;
    out.variance = l1 * l1;
    return out;
}

CDesignResult c_optimal_design(const ActionSet& a, std::span<const double> c) {
    if (c.size() != a.lifted_dim()) throw std::invalid_argument("c_optimal_design: target has wrong dimension");
    const std::vector<Vector> lifted = a.lifted_all();
    return c_optimal_design(lifted, c);
}

DeltaDesignResult delta_optimal_design(const ActionSet& a, std::span<const double> gaps) {
    if (gaps.size() != a.size()) throw std::invalid_argument("delta_optimal_design: gap vector has wrong length");
    std::vector<Vector> scaled = a.lifted_all();
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        if (!(gaps[i] > 0.0) || !std::isfinite(gaps[i]))
            throw std::invalid_argument("delta_optimal_design: gap at index " + std::to_string(i) +
                                        " is not a positive finite number");
        const double f = 1.0 / std::sqrt(gaps[i]);
        for (double& v : scaled[i]) v *= f;
    }
    const Vector e = basis_vector(a.lifted_dim(), a.d);
    const CDesignResult c = c_optimal_design(scaled, e);
    DeltaDesignResult out;
    out.kappa = c.variance;
    out.iterations = c.iterations;
    out.measure.kind = DesignKind::measure;
    out.measure.weights.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.measure.weights[i] = c.variance * c.design.weights[i] / gaps[i];
    return out;
}

Allocation round_allocation(const Design& dsn, double m) {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("round_allocation: m must be positive");
    Allocation out;
    out.counts.assign(dsn.weights.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < dsn.weights.size(); ++i) {
        if (dsn.weights[i] < 0.0) throw std::invalid_argument("round_allocation: negative weight");
        if (dsn.weights[i] > 0.0) {
            out.counts[i] = static_cast<std::int64_t>(std::ceil(m * dsn.weights[i]));
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("round_allocation: design has empty support");
    return out;
}

}  // namespace debias
