#include "budgetsvm/oracle/reference.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace budgetsvm::oracle {

namespace {

double dense_sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

double dense_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// Gradient of the minimization form f = 1/2 a^T Q a - 1^T a.
void gradient(const std::vector<double>& q, std::size_t n, const std::vector<double>& a,
              std::vector<double>& g) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = -1.0;
        const double* row = &q[i * n];
        for (std::size_t j = 0; j < n; ++j) s += row[j] * a[j];
        g[i] = s;
    }
}

double stationarity(const std::vector<double>& a, const std::vector<double>& g, double C) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        r = std::max(r, std::abs(a[i] - std::clamp(a[i] - g[i], 0.0, C)));
    return r;
}

// Solves the free block exactly for the bound pattern suggested by (a, g).
std::vector<double> active_set_polish(const std::vector<double>& q, std::size_t n, double C,
                                      const std::vector<double>& a, const std::vector<double>& g) {
    std::vector<std::size_t> free_idx;
    std::vector<bool> is_free(n, false);
    std::vector<double> out(a);
    for (std::size_t i = 0; i < n; ++i) {
        const bool at_lower = a[i] <= 0.0 && g[i] >= 0.0;
        const bool at_upper = a[i] >= C && g[i] <= 0.0;
        if (at_lower)
            out[i] = 0.0;
        else if (at_upper)
            out[i] = C;
        else {
            free_idx.push_back(i);
            is_free[i] = true;
        }
    }
    if (free_idx.empty()) return out;
    const auto m = static_cast<Eigen::Index>(free_idx.size());
    Eigen::MatrixXd qff(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const std::size_t i = free_idx[static_cast<std::size_t>(r)];
        double b = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (!is_free[j] && out[j] == C)
                b -= q[i * n + j] * C;
        rhs(r) = b;
        for (Eigen::Index c = 0; c < m; ++c) qff(r, c) = q[i * n + free_idx[static_cast<std::size_t>(c)]];
    }
    const Eigen::VectorXd sol = qff.ldlt().solve(rhs);
    for (Eigen::Index r = 0; r < m; ++r)
        out[free_idx[static_cast<std::size_t>(r)]] = std::clamp(sol(r), 0.0, C);
    return out;
}

double min_objective(const std::vector<double>& q, std::size_t n, const std::vector<double>& a) {
    return -dense_dual_objective(q, n, a);
}

}  // namespace

std::vector<double> dense_q(const SparseDataset& ds, const KernelSpec& spec) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dimension();
    std::vector<std::vector<double>> dense;
    dense.reserve(n);
    for (std::size_t i = 0; i < n; ++i) dense.push_back(ds.x(i).to_dense(d));
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double k = spec.kind == KernelKind::gaussian
                                 ? std::exp(-spec.gamma * dense_sq_dist(dense[i], dense[j]))
                                 : dense_dot(dense[i], dense[j]);
            q[i * n + j] = ds.y(i) * ds.y(j) * k;
        }
    }
    return q;
}

double dense_dual_objective(const std::vector<double>& q, std::size_t n, const std::vector<double>& alpha) {
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lin += alpha[i];
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += q[i * n + j] * alpha[j];
        quad += alpha[i] * row;
    }
    return lin - 0.5 * quad;
}

QpSolution solve_box_qp(const std::vector<double>& q, std::size_t n, double C, double tol,
                        std::size_t max_iterations) {
    if (q.size() != n * n) throw std::invalid_argument("solve_box_qp: bad matrix size");
    double lipschitz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(q[i * n + j]);
        lipschitz = std::max(lipschitz, s);
    }
    const double step = 1.0 / lipschitz;

    std::vector<double> a(n, 0.0), y(n, 0.0), a_next(n), g(n), ga(n);
    double t = 1.0;
    double f_a = 0.0;

    QpSolution sol;
    sol.stationarity = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        gradient(q, n, y, g);
        for (std::size_t i = 0; i < n; ++i) a_next[i] = std::clamp(y[i] - step * g[i], 0.0, C);
        const double f_next = min_objective(q, n, a_next);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (f_next > f_a) {
            // restart momentum from the last iterate
            y = a;
            t = 1.0;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                y[i] = a_next[i] + ((t - 1.0) / t_next) * (a_next[i] - a[i]);
            a.swap(a_next);
            f_a = f_next;
            t = t_next;
        }

        if (it % 25 == 0) {
            gradient(q, n, a, ga);
            double r = stationarity(a, ga, C);
            if (r > tol) {
                auto cand = active_set_polish(q, n, C, a, ga);
                std::vector<double> gc(n);
                gradient(q, n, cand, gc);
                const double rc = stationarity(cand, gc, C);
                if (rc < r) {
                    a = cand;
                    y = cand;
                    t = 1.0;
                    f_a = min_objective(q, n, a);
                    r = rc;
                }
            }
            sol.iterations = it;
            if (r <= tol) {
                sol.converged = true;
                sol.stationarity = r;
                break;
            }
            sol.stationarity = r;
        }
    }
    sol.alpha = a;
    sol.objective = dense_dual_objective(q, n, a);
    return sol;
}

QpSolution solve_svm_dual(const SparseDataset& ds, const KernelSpec& spec, double C, double tol) {
    return solve_box_qp(dense_q(ds, spec), ds.size(), C, tol);
}

std::vector<double> symmetric_eigenvalues(const std::vector<double>& a, std::size_t n) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
    return out;
}

GridMerge grid_merge(double beta_i, double beta_j, const SparseVector& x_i, const SparseVector& x_j,
                     double gamma, std::size_t h_points) {
    const std::size_t d = std::max(x_i.dimension(), x_j.dimension());
    const auto a = x_i.to_dense(d);
    const auto b = x_j.to_dense(d);
    const double k_ij = std::exp(-gamma * dense_sq_dist(a, b));
    const double base = beta_i * beta_i + beta_j * beta_j + 2.0 * beta_i * beta_j * k_ij;

    std::vector<double> xp(d);
    GridMerge best;
    best.weight_degradation = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < h_points; ++k) {
        const double h = static_cast<double>(k) / static_cast<double>(h_points - 1);
        for (std::size_t c = 0; c < d; ++c) xp[c] = (1.0 - h) * a[c] + h * b[c];
        const double k_ip = std::exp(-gamma * dense_sq_dist(a, xp));
        const double k_jp = std::exp(-gamma * dense_sq_dist(b, xp));
        const double bp = beta_i * k_ip + beta_j * k_jp;  // k(x', x') = 1
        const double wd = base - bp * bp;
        if (wd < best.weight_degradation) {
            best.weight_degradation = wd;
            best.h = h;
            best.beta_prime = bp;
        }
    }
    best.weight_degradation = std::max(0.0, best.weight_degradation);
    return best;
}

double grid_beta_prime(double beta_i, double beta_j, const SparseVector& x_i, const SparseVector& x_j,
                       const SparseVector& x_prime, double gamma, double lo, double hi,
                       std::size_t points) {
    const std::size_t d = std::max({x_i.dimension(), x_j.dimension(), x_prime.dimension()});
    const auto a = x_i.to_dense(d);
    const auto b = x_j.to_dense(d);
    const auto p = x_prime.to_dense(d);
    const double k_ij = std::exp(-gamma * dense_sq_dist(a, b));
    const double k_ip = std::exp(-gamma * dense_sq_dist(a, p));
    const double k_jp = std::exp(-gamma * dense_sq_dist(b, p));
    const double base = beta_i * beta_i + beta_j * beta_j + 2.0 * beta_i * beta_j * k_ij;
    double best_bp = lo;
    double best_wd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points; ++k) {
        const double bp = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
        const double wd = base - 2.0 * bp * (beta_i * k_ip + beta_j * k_jp) + bp * bp;
        if (wd < best_wd) {
            best_wd = wd;
            best_bp = bp;
        }
    }
    return best_bp;
}

}  // namespace budgetsvm::oracle
