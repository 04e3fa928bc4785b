#pragma once

#include "budgetsvm/data_io.hpp"
#include "budgetsvm/kernel.hpp"
#include "budgetsvm/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace budgetsvm {

/// One CSV row of training diagnostics.
struct EpochRecord {
    std::size_t epoch = 0;
    double wall_time_s = 0.0;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double test_accuracy = 0.0;
    std::size_t sv_count = 0;
    double merge_fraction = 0.0;
    double violation_fraction = 0.0;
    double nonzero_step_fraction = 0.0;
};

inline constexpr std::string_view kEpochCsvHeader =
    "epoch,wall_time_s,primal_obj,dual_obj,test_accuracy,sv_count,merge_fraction,"
    "violation_fraction,nonzero_step_fraction";

void write_epoch_csv_header(std::ostream& out);
void write_epoch_csv_row(const EpochRecord& r, std::ostream& out);
/// Header plus one row per record; reals use 17 significant digits.
void write_epoch_csv(std::span<const EpochRecord> records, std::ostream& out);
std::vector<EpochRecord> read_epoch_csv(std::istream& in);

/// P(w~) = (lambda/2)||w~||^2 + mean hinge loss, lambda = 1/(nC).
double primal_objective(const BudgetModel& m, const SparseDataset& ds, double C);

/// D(alpha) = sum alpha - 1/2 alpha^T Q alpha over the nonzero coordinates.
double dual_objective(std::span<const double> alpha, const SparseDataset& ds, const KernelSpec& spec);
double dual_objective(const AlphaState& alpha, const SparseDataset& ds, const KernelSpec& spec);

/// (Q alpha)_i, summed over nonzero alpha.
double q_row_dot(std::span<const double> alpha, const SparseDataset& ds, const KernelSpec& spec,
                 std::size_t i);

/**
 * Change of the dual objective when coordinate i moves by delta:
 *   J = (Q_ii/2) ((g/Q_ii)^2 - (delta - g/Q_ii)^2),  g = 1 - (Q alpha)_i.
 */
double progress_J(std::span<const double> alpha, const SparseDataset& ds, const KernelSpec& spec,
                  std::size_t i, double delta);

/// Same expression given g and Q_ii directly.
double progress_J_from_gradient(double gradient, double q_ii, double delta);

/// Clipped coordinate step [alpha_i + (1 - y f)/Q_ii]_0^C - alpha_i.
double clipped_step(double alpha_i, double y_times_margin, double q_ii, double C);

/**
 * E(w, w~) = 1 - max_i J(delta~_i) / J(delta_i), with delta_i computed from
 * the exact margins and delta~_i from the budgeted margins. Indices whose
 * denominator vanishes are skipped; returns 0 when all are skipped.
 */
double relative_approx_error(std::span<const double> alpha, std::span<const double> exact_margins,
                             std::span<const double> budget_margins, const SparseDataset& ds,
                             double C, const KernelSpec& spec);

inline constexpr std::size_t kMaxDenseDiagnosticsSize = 500;
inline constexpr double kKappaDegenerate = 1e-10;

struct EigenResult {
    double kappa = 0.0;
    bool degenerate = false;  // kappa <= kKappaDegenerate: Q is not strictly positive definite
};

/// Dense Q_ij = y_i y_j k(x_i, x_j).
std::vector<double> dense_q_matrix(const SparseDataset& ds, const KernelSpec& spec);

/// Smallest eigenvalue of a symmetric row-major matrix by cyclic Jacobi rotations.
double smallest_eigenvalue_symmetric(std::vector<double> a, std::size_t n);

/// Smallest eigenvalue of Q. Refuses n > kMaxDenseDiagnosticsSize.
EigenResult smallest_eigenvalue_Q(const SparseDataset& ds, const KernelSpec& spec);

struct Lemma2Prediction {
    double p_sgd = 0.0;
    double p_sca = 0.0;
};

/// p_sgd = mean(alpha*)/C, p_sca = fraction of free alpha* (tolerance 1e-6 C from the bounds).
Lemma2Prediction lemma2_predictions(std::span<const double> alpha_star, double C);

/**
 * Right-hand side of the budgeted linear-rate bound. Element t is
 * (D* + nC^2/2) prod_{tau<t} (1 - 2 kappa (1 - E_tau) / ((1 + kappa) n)),
 * so the result has E_trace.size() + 1 elements. E values are clamped to [0, 1].
 */
std::vector<double> theorem1_bound(double d_star, std::size_t n, double C, double kappa,
                                   std::span<const double> e_trace);

/// Fraction of test points classified correctly. Throws on an empty set.
double test_accuracy(const BudgetModel& m, const SparseDataset& test);

/// Margins of `m` on every training point.
std::vector<double> model_margins(const BudgetModel& m, const SparseDataset& ds);

}  // namespace budgetsvm
