#pragma once

// Reference computations that share no code path with the solvers: dense
// linear algebra and brute-force searches used to check them.

#include "budgetsvm/data_io.hpp"
#include "budgetsvm/kernel.hpp"

#include <cstddef>
#include <vector>

namespace budgetsvm::oracle {

/// Dense Q_ij = y_i y_j k(x_i, x_j) evaluated on dense copies of the points.
std::vector<double> dense_q(const SparseDataset& ds, const KernelSpec& spec);

struct QpSolution {
    std::vector<double> alpha;
    double objective = 0.0;    // D(alpha)
    double stationarity = 0.0; // || alpha - P(alpha + grad D) ||_inf
    std::size_t iterations = 0;
    bool converged = false;
};

/**
 * Maximizes 1^T a - 1/2 a^T Q a over [0, C]^n by accelerated projected
 * gradient (with restarts) and active-set linear solves for polishing, until
 * the projected-gradient stationarity drops below `tol`.
 */
QpSolution solve_box_qp(const std::vector<double>& q, std::size_t n, double C, double tol = 1e-10,
                        std::size_t max_iterations = 2'000'000);

QpSolution solve_svm_dual(const SparseDataset& ds, const KernelSpec& spec, double C, double tol = 1e-10);

/// D(alpha) from a dense Q.
double dense_dual_objective(const std::vector<double>& q, std::size_t n, const std::vector<double>& alpha);

/// All eigenvalues (ascending) of a dense symmetric matrix.
std::vector<double> symmetric_eigenvalues(const std::vector<double>& a, std::size_t n);

struct GridMerge {
    double h = 0.0;            // argmin of WD over the h grid
    double weight_degradation = 0.0;
    double beta_prime = 0.0;   // argmin of WD over a beta' grid at that h
};

/**
 * Exhaustive merge search for a gaussian kernel: WD(h) on `h_points` equally
 * spaced h in [0,1], each with the least-squares beta' of the materialized
 * point. Dense arithmetic throughout.
 */
GridMerge grid_merge(double beta_i, double beta_j, const SparseVector& x_i, const SparseVector& x_j,
                     double gamma, std::size_t h_points = 100'001);

/// Argmin over a uniform beta' grid on [lo, hi] of the three-term WD at fixed x'.
double grid_beta_prime(double beta_i, double beta_j, const SparseVector& x_i, const SparseVector& x_j,
                       const SparseVector& x_prime, double gamma, double lo, double hi,
                       std::size_t points = 100'001);

}  // namespace budgetsvm::oracle
