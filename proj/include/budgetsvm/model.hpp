#pragma once

#include "budgetsvm/data_io.hpp"
#include "budgetsvm/kernel.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace budgetsvm {

/// One basis function of the budgeted expansion. `source` is the training
/// index of a pristine (never merged) copy, empty once the entry was merged.
struct ModelEntry {
    double beta = 0.0;
    SparseVector point;
    std::optional<std::size_t> source;
};

/**
 * Budgeted weight vector  w~ = scale * sum_j beta_j phi(x~_j).
 *
 * The global scale lets SGD-style shrinkage run in O(1); it is folded into
 * the betas once it drops below `fold_threshold`. Entries whose effective
 * coefficient magnitude falls below `drop_threshold` are removed. The model
 * may hold capacity+1 entries between an insertion and budget maintenance.
 */
class BudgetModel {
public:
    static constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();
    static constexpr double fold_threshold = 1e-6;
    static constexpr double drop_threshold = 1e-12;

    BudgetModel() = default;
    BudgetModel(KernelSpec spec, std::size_t capacity);

    const KernelSpec& kernel() const noexcept { return spec_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool over_budget() const noexcept { return entries_.size() > capacity_; }
    double scale() const noexcept { return scale_; }

    std::span<const ModelEntry> entries() const noexcept { return entries_; }
    const ModelEntry& entry(std::size_t slot) const { return entries_[slot]; }
    double effective_beta(std::size_t slot) const { return scale_ * entries_[slot].beta; }

    /**
     * Adds `effective_beta * phi(point)` to the model and returns the new size.
     *
     * With `coalesce` on and a pristine entry for `source` present, the
     * coefficient is folded into that entry instead of appending (the entry is
     * dropped if the result vanishes). Never runs budget maintenance.
     */
    std::size_t add_entry(double effective_beta, const SparseVector& point, bool coalesce,
                          std::optional<std::size_t> source = std::nullopt);

    /// Multiplies every coefficient by factor >= 0 in O(1). A zero factor clears the model.
    void scale_by(double factor);

    /// Moves the scale into the betas and resets it to 1.
    void fold_scale();

    /// Slot `keep` becomes the merged entry, slot `drop` is erased. Other entries keep their values.
    void merge_into(std::size_t keep, std::size_t drop, double effective_beta, SparseVector point);

    void remove_entry(std::size_t slot);

    /// Builds a model from stored entries (used by the loader and tests).
    static BudgetModel from_entries(KernelSpec spec, std::size_t capacity, double scale,
                                    std::vector<ModelEntry> entries);

private:
    void rebuild_index();

    KernelSpec spec_{};
    std::size_t capacity_ = unbounded;
    double scale_ = 1.0;
    std::vector<ModelEntry> entries_;
    std::unordered_map<std::size_t, std::size_t> pristine_;
};

/// scale * sum_j beta_j k(x, x~_j)
double predict_margin(const BudgetModel& m, const SparseVector& x);

/// ||w~||^2, O(B^2) kernel evaluations, tiny negative rounding clamped to 0.
double model_norm_sq(const BudgetModel& m);

/// sign(margin) with 0 -> +1.
int classify(const BudgetModel& m, const SparseVector& x);

void save_model(const BudgetModel& m, std::ostream& out);
BudgetModel load_model(std::istream& in);
void save_model(const BudgetModel& m, const std::filesystem::path& path);
BudgetModel load_model(const std::filesystem::path& path);

/// Dual coefficients alpha in the box [0, C]^n.
class AlphaState {
public:
    AlphaState() = default;
    AlphaState(std::size_t n, double C);

    std::size_t size() const noexcept { return alpha_.size(); }
    double C() const noexcept { return C_; }
    double operator[](std::size_t i) const { return alpha_[i]; }
    std::span<const double> values() const noexcept { return alpha_; }

    /// Requires 0 <= value <= C (asserted in debug builds).
    void set(std::size_t i, double value);

private:
    std::vector<double> alpha_;
    double C_ = 1.0;
};

}  // namespace budgetsvm
