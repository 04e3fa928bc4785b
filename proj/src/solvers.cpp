#include "budgetsvm/solvers.hpp"

#include "budgetsvm/errors.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>

namespace budgetsvm {

Algorithm parse_algorithm(const std::string& name) {
    if (name == "bsca") return Algorithm::bsca;
    if (name == "bsgd") return Algorithm::bsgd;
    if (name == "sca") return Algorithm::sca;
    if (name == "sgd") return Algorithm::sgd;
    throw ConfigError("unknown algorithm '" + name + "'");
}

const char* to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::bsca: return "bsca";
        case Algorithm::bsgd: return "bsgd";
        case Algorithm::sca: return "sca";
        case Algorithm::sgd: return "sgd";
    }
    return "?";
}

void TrainConfig::validate() const {
    if (!(C > 0.0)) throw ConfigError("C must be positive");
    if (budget < 2) throw ConfigError("budget must be at least 2");
    if (epochs == 0) throw ConfigError("epochs must be at least 1");
    if (log_every == 0) throw ConfigError("log_every must be at least 1");
    kernel.validate();
    if (is_budgeted(algo) && kernel.kind != KernelKind::gaussian)
        throw ConfigError("budget maintenance by merging needs a gaussian kernel");
}

StepCounters& StepCounters::operator+=(const StepCounters& o) {
    steps += o.steps;
    violations += o.violations;
    nonzero_steps += o.nonzero_steps;
    maintenance_events += o.maintenance_events;
    return *this;
}

SolverState::SolverState(const TrainConfig& config, std::size_t n)
    : model(config.kernel, is_budgeted(config.algo) ? config.budget : BudgetModel::unbounded),
      alpha(n, config.C),
      rng(config.seed, RngStream::training),
      config_(config),
      primal_alpha_(is_dual(config.algo) ? 0 : n, 0.0) {}

std::vector<double> SolverState::alpha_vector() const {
    if (is_dual(config_.algo)) return {alpha.values().begin(), alpha.values().end()};
    std::vector<double> out(primal_alpha_);
    for (double& a : out) a *= primal_scale_;
    return out;
}

void SolverState::scale_primal(double factor) {
    if (factor == 0.0) {
        std::fill(primal_alpha_.begin(), primal_alpha_.end(), 0.0);
        primal_scale_ = 1.0;
        return;
    }
    primal_scale_ *= factor;
    if (primal_scale_ < BudgetModel::fold_threshold) {
        for (double& a : primal_alpha_) a *= primal_scale_;
        primal_scale_ = 1.0;
    }
}

void SolverState::add_primal(std::size_t i, double amount) { primal_alpha_[i] += amount / primal_scale_; }

namespace {

double diagonal_q(const KernelSpec& spec, const SparseVector& x) {
    const double q = kernel_eval(spec, x, x);
    assert(spec.kind != KernelKind::gaussian || q == 1.0);
    return q;
}

StepReport coordinate_step(SolverState& state, const SparseDataset& ds, std::size_t i, bool budgeted) {
    const auto& cfg = state.config();
    const auto& x = ds.x(i);
    const double y = ds.y(i);

    StepReport r;
    r.index = i;
    r.margin = predict_margin(state.model, x);
    r.violation = y * r.margin < 1.0;

    const double a = state.alpha[i];
    const double q_ii = diagonal_q(cfg.kernel, x);
    const double target = std::clamp(a + (1.0 - y * r.margin) / q_ii, 0.0, cfg.C);
    r.delta = target - a;

    auto& c = state.epoch_counters;
    ++c.steps;
    if (r.violation) ++c.violations;
    if (r.delta != 0.0) {
        ++c.nonzero_steps;
        state.alpha.set(i, target);
        state.model.add_entry(y * r.delta, x, cfg.coalesce, i);
        if (budgeted && state.model.over_budget()) {
            r.maintenance = select_and_merge(state.model);
            ++c.maintenance_events;
        }
    }
    ++state.t;
    return r;
}

StepReport gradient_step(SolverState& state, const SparseDataset& ds, std::size_t i, bool budgeted) {
    const auto& cfg = state.config();
    const auto& x = ds.x(i);
    const double y = ds.y(i);
    const double t = static_cast<double>(state.t);

    StepReport r;
    r.index = i;
    r.margin = predict_margin(state.model, x);
    r.violation = y * r.margin < 1.0;

    const double shrink = 1.0 - 1.0 / t;
    state.model.scale_by(shrink);
    state.scale_primal(shrink);

    auto& c = state.epoch_counters;
    ++c.steps;
    if (r.violation) {
        ++c.violations;
        ++c.nonzero_steps;
        const double step = static_cast<double>(ds.size()) * cfg.C / t;
        r.delta = step;
        state.add_primal(i, step);
        state.model.add_entry(y * step, x, cfg.coalesce, i);
        if (budgeted && state.model.over_budget()) {
            r.maintenance = select_and_merge(state.model);
            ++c.maintenance_events;
        }
    }
    ++state.t;
    return r;
}

}  // namespace

StepReport bsca_step(SolverState& state, const SparseDataset& ds, std::size_t i) {
    return coordinate_step(state, ds, i, true);
}

StepReport sca_step(SolverState& state, const SparseDataset& ds, std::size_t i) {
    return coordinate_step(state, ds, i, false);
}

StepReport bsgd_step(SolverState& state, const SparseDataset& ds, std::size_t i) {
    return gradient_step(state, ds, i, true);
}

StepReport sgd_step(SolverState& state, const SparseDataset& ds, std::size_t i) {
    return gradient_step(state, ds, i, false);
}

StepReport solver_step(SolverState& state, const SparseDataset& ds, std::size_t i) {
    switch (state.config().algo) {
        case Algorithm::bsca: return bsca_step(state, ds, i);
        case Algorithm::sca: return sca_step(state, ds, i);
        case Algorithm::bsgd: return bsgd_step(state, ds, i);
        case Algorithm::sgd: return sgd_step(state, ds, i);
    }
    throw ContractViolation("unknown algorithm");
}

TrainResult train(const TrainConfig& config, const SparseDataset& train_set,
                  const SparseDataset& test_set, const TrainObserver& observer) {
    config.validate();
    if (train_set.size() == 0) throw ConfigError("training set is empty");
    if (test_set.size() == 0) throw ConfigError("test set is empty");

    const std::size_t n = train_set.size();
    SolverState state(config, n);
    TrainResult result;

    using clock = std::chrono::steady_clock;
    clock::duration training_time{};
    StepCounters window;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        state.epoch_counters = {};
        const auto start = clock::now();
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t i = state.rng.uniform_index(n);
            const auto report = solver_step(state, train_set, i);
            if (observer.on_step) observer.on_step(state, report);
        }
        training_time += clock::now() - start;
        window += state.epoch_counters;
        result.totals += state.epoch_counters;
        if (observer.on_epoch_end) observer.on_epoch_end(state, epoch);

        if (epoch % config.log_every != 0) continue;
        EpochRecord rec;
        rec.epoch = epoch;
        rec.wall_time_s = std::chrono::duration<double>(training_time).count();
        rec.primal_obj = primal_objective(state.model, train_set, config.C);
        rec.dual_obj = config.skip_dual_objective
                           ? std::numeric_limits<double>::quiet_NaN()
                           : dual_objective(state.alpha_vector(), train_set, config.kernel);
        rec.test_accuracy = test_accuracy(state.model, test_set);
        rec.sv_count = state.model.size();
        const double steps = static_cast<double>(std::max<std::size_t>(window.steps, 1));
        rec.merge_fraction = static_cast<double>(window.maintenance_events) / steps;
        rec.violation_fraction = static_cast<double>(window.violations) / steps;
        rec.nonzero_step_fraction = static_cast<double>(window.nonzero_steps) / steps;
        result.records.push_back(rec);
        window = {};
    }

    result.alpha = state.alpha_vector();
    result.model = std::move(state.model);
    return result;
}

}  // namespace budgetsvm
