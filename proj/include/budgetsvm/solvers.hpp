#pragma once

#include "budgetsvm/budget_maintenance.hpp"
#include "budgetsvm/data_io.hpp"
#include "budgetsvm/diagnostics.hpp"
#include "budgetsvm/kernel.hpp"
#include "budgetsvm/model.hpp"
#include "budgetsvm/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace budgetsvm {

enum class Algorithm { bsca, bsgd, sca, sgd };

Algorithm parse_algorithm(const std::string& name);
const char* to_string(Algorithm algo);

/// True for the coordinate-ascent solvers (bsca, sca).
constexpr bool is_dual(Algorithm a) { return a == Algorithm::bsca || a == Algorithm::sca; }
/// True for the solvers that enforce the budget (bsca, bsgd).
constexpr bool is_budgeted(Algorithm a) { return a == Algorithm::bsca || a == Algorithm::bsgd; }

struct TrainConfig {
    Algorithm algo = Algorithm::bsca;
    double C = 1.0;
    KernelSpec kernel{};
    std::size_t budget = 500;  // ignored by sca/sgd
    std::size_t epochs = 1;
    std::uint64_t seed = 1;
    bool coalesce = true;
    std::size_t log_every = 1;
    /// Skip the O(s^2) dual objective in epoch records (written as NaN).
    bool skip_dual_objective = false;

    /// Throws ConfigError: C <= 0, budget < 2, epochs == 0, log_every == 0, bad kernel,
    /// or a budgeted run without a gaussian kernel.
    void validate() const;
};

struct StepCounters {
    std::size_t steps = 0;
    std::size_t violations = 0;     // y f~(x_i) < 1
    std::size_t nonzero_steps = 0;  // delta != 0 (dual) / coefficient added (primal)
    std::size_t maintenance_events = 0;

    StepCounters& operator+=(const StepCounters& o);
};

struct StepReport {
    std::size_t index = 0;
    double margin = 0.0;  // f~(x_i) before the update
    double delta = 0.0;   // change of alpha_i (dual) or added coefficient / y_i (primal)
    bool violation = false;
    std::optional<MaintenanceReport> maintenance;
};

/**
 * Mutable state of one training run.
 *
 * Dual solvers keep alpha in the box [0, C]^n. Primal solvers keep the
 * coefficients of the unbudgeted SGD iterate in `primal_alpha` scaled by
 * `primal_scale`, so the dual objective can be reported for them as well.
 */
class SolverState {
public:
    SolverState(const TrainConfig& config, std::size_t n);

    const TrainConfig& config() const noexcept { return config_; }

    BudgetModel model;
    AlphaState alpha;
    std::uint64_t t = 1;
    Rng rng;
    StepCounters epoch_counters;

    /// Coefficient vector alpha(w) of the current iterate (dual: alpha, primal: SGD coefficients).
    std::vector<double> alpha_vector() const;

    void scale_primal(double factor);
    void add_primal(std::size_t i, double amount);

private:
    TrainConfig config_;
    std::vector<double> primal_alpha_;
    double primal_scale_ = 1.0;
};

/// Clipped coordinate step on alpha_i using the budgeted margin; merges when over budget.
StepReport bsca_step(SolverState& state, const SparseDataset& ds, std::size_t i);
/// Same step without a budget: the model holds every accumulated entry.
StepReport sca_step(SolverState& state, const SparseDataset& ds, std::size_t i);
/// Pegasos step: shrink by (1 - 1/t), add y_i nC/t on a margin violation, merge when over budget.
StepReport bsgd_step(SolverState& state, const SparseDataset& ds, std::size_t i);
StepReport sgd_step(SolverState& state, const SparseDataset& ds, std::size_t i);

/// Dispatches on the configured algorithm.
StepReport solver_step(SolverState& state, const SparseDataset& ds, std::size_t i);

/// Optional instrumentation. Callbacks run on the training thread.
struct TrainObserver {
    std::function<void(const SolverState&, const StepReport&)> on_step;
    std::function<void(const SolverState&, std::size_t epoch)> on_epoch_end;
};

struct TrainResult {
    BudgetModel model;
    std::vector<EpochRecord> records;
    std::vector<double> alpha;  // final alpha(w)
    StepCounters totals;
};

/**
 * Runs epochs * n steps with indices drawn i.i.d. uniformly. Every
 * `log_every` epochs an EpochRecord is appended; its fractions cover the
 * steps since the previous record. Identical config and data give
 * bit-identical models and records (except wall_time_s).
 */
TrainResult train(const TrainConfig& config, const SparseDataset& train_set,
                  const SparseDataset& test_set, const TrainObserver& observer = {});

}  // namespace budgetsvm
