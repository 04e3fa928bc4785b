#pragma once

#include "budgetsvm/data_io.hpp"
#include "budgetsvm/kernel.hpp"
#include "budgetsvm/model.hpp"

#include <cstddef>
#include <optional>

namespace budgetsvm {

/// Tolerance on the final bracket width of the search over h.
inline constexpr double kGoldenTolerance = 1e-3;

/// beta' = (beta_i k_i + beta_j k_j) / k_self, the least-squares coefficient for a fixed x'.
double merged_beta_closed_form(double beta_i, double beta_j, double k_i, double k_j, double k_self);

/**
 * ||beta_i phi(x_i) + beta_j phi(x_j) - beta' phi(x')||^2 with beta' from
 * merged_beta_closed_form, clamped at 0.
 */
double weight_degradation(double beta_i, double beta_j, const SparseVector& x_i,
                          const SparseVector& x_j, const SparseVector& x_prime,
                          const KernelSpec& spec);

struct GoldenResult {
    double h = 0.0;
    double merged_beta = 0.0;
    double weight_degradation = 0.0;
};

/**
 * Finds h in [0,1] maximizing |beta'(h)| for x' = (1-h) x_i + h x_j under a
 * gaussian kernel. A 21-point scan brackets the best mode, golden-section
 * search narrows it to kGoldenTolerance, and the result is never worse than
 * the scanned points (including both endpoints).
 *
 * Throws ContractViolation for betas of opposite sign or a non-gaussian kernel.
 */
GoldenResult golden_section_h(double beta_i, double beta_j, const SparseVector& x_i,
                              const SparseVector& x_j, const KernelSpec& spec);

struct MergeCandidate {
    std::size_t i = 0;
    std::size_t j = 0;
    double h = 0.0;
    SparseVector merged_point;
    double merged_beta = 0.0;  // effective coefficient
    double weight_degradation = 0.0;
};

enum class MaintenanceKind { merge, remove };

struct MaintenanceReport {
    MaintenanceKind kind = MaintenanceKind::merge;
    std::size_t i = 0;                  // slot with the smallest |coefficient|
    std::optional<std::size_t> j;       // merge partner (merge only)
    double h = 0.0;
    double weight_degradation = 0.0;    // in effective (scaled) units
};

/// Best same-sign partner for slot i, or nothing if no partner exists.
std::optional<MergeCandidate> best_merge_partner(const BudgetModel& m, std::size_t i);

/**
 * Shrinks a model holding capacity+1 entries back to capacity.
 *
 * The entry with the smallest |effective coefficient| (lowest slot on ties)
 * is merged with the same-sign partner of least weight degradation; the
 * merged entry takes the lower of the two slots. Without a same-sign partner
 * the entry is removed instead.
 */
MaintenanceReport select_and_merge(BudgetModel& m);

const char* to_string(MaintenanceKind kind);

}  // namespace budgetsvm
