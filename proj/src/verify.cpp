#include "budgetsvm/verify.hpp"

#include "budgetsvm/budget_maintenance.hpp"
#include "budgetsvm/diagnostics.hpp"
#include "budgetsvm/oracle/reference.hpp"
#include "budgetsvm/rng.hpp"
#include "budgetsvm/solvers.hpp"
#include "budgetsvm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace budgetsvm::verify {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + rng.uniform_index(hi - lo + 1);
}

std::vector<double> random_box_alpha(Rng& rng, std::size_t n, double C) {
    std::vector<double> a(n);
    for (auto& v : a) {
        const double u = rng.uniform01();
        v = u < 0.3 ? 0.0 : (u < 0.5 ? C : rng.uniform(0.0, C));
    }
    return a;
}

SparseVector random_point(Rng& rng, std::size_t d) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.uniform01() < 0.3 ? 0.0 : rng.uniform(-1.5, 1.5);
    return SparseVector::from_dense(v);
}

}  // namespace

CheckResult qp_oracle(const QpOracleOptions& opt) {
    CheckResult res{"qp-oracle", true, false, {}};
    Rng master(opt.seed, RngStream::verification);
    double worst = 0.0;
    double worst_stat = 0.0;
    bool all_converged = true;
    for (std::size_t inst = 0; inst < opt.instances; ++inst) {
        const std::size_t n = draw_between(master, std::min<std::size_t>(10, opt.max_n), opt.max_n);
        const auto ds = make_two_blobs(n, 5, master());
        TrainConfig cfg;
        cfg.algo = Algorithm::sca;
        cfg.C = master.uniform(0.5, 32.0);
        cfg.kernel = KernelSpec::gaussian(master.uniform(0.2, 1.0));
        cfg.epochs = opt.epochs;
        cfg.log_every = opt.epochs;
        cfg.seed = master();
        const auto run = train(cfg, ds, ds);

        const auto q = oracle::dense_q(ds, cfg.kernel);
        const auto ref = oracle::solve_box_qp(q, n, cfg.C);
        all_converged = all_converged && ref.converged;
        worst_stat = std::max(worst_stat, ref.stationarity);
        const double gap = std::abs(ref.objective - oracle::dense_dual_objective(q, n, run.alpha));
        worst = std::max(worst, gap);
    }
    res.passed = all_converged && worst < opt.tolerance;
    res.detail = "max |D_sca - D*| = " + sci(worst) + " (tol " + sci(opt.tolerance) +
                 "), oracle stationarity <= " + sci(worst_stat) +
                 (all_converged ? "" : ", ORACLE NOT CONVERGED");
    return res;
}

CheckResult lemma1(const Lemma1Options& opt) {
    CheckResult res{"lemma1", true, false, {}};
    Rng rng(opt.seed, RngStream::verification);
    double worst = 0.0;
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
        const std::size_t n = draw_between(rng, 1, opt.max_n);
        const auto ds = make_two_blobs(n, 5, rng());
        const auto spec = KernelSpec::gaussian(rng.uniform(0.1, 2.0));
        const double C = rng.uniform(0.1, 2.0);
        auto alpha = random_box_alpha(rng, n, C);
        const std::size_t i = rng.uniform_index(n);
        const double delta = rng.uniform(-alpha[i], C - alpha[i]);

        const double before = dual_objective(alpha, ds, spec);
        const double j = progress_J(alpha, ds, spec, i, delta);
        alpha[i] += delta;
        const double after = dual_objective(alpha, ds, spec);
        worst = std::max(worst, std::abs((after - before) - j));
    }
    res.passed = worst < opt.tolerance;
    res.detail = "max |dD - J| = " + sci(worst) + " over " + std::to_string(opt.trials) +
                 " triples (tol " + sci(opt.tolerance) + ")";
    return res;
}

CheckResult step_optimality(const StepOptimalityOptions& opt) {
    CheckResult res{"step-optimality", true, false, {}};
    Rng rng(opt.seed, RngStream::verification);
    double worst = 0.0;
    std::size_t exact_zero = 0;
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
        const std::size_t n = draw_between(rng, 1, opt.max_n);
        const auto ds = make_two_blobs(n, 5, rng());
        TrainConfig cfg;
        cfg.algo = Algorithm::sca;
        cfg.C = rng.uniform(0.1, 10.0);
        cfg.kernel = KernelSpec::gaussian(rng.uniform(0.1, 2.0));
        SolverState state(cfg, n);
        const auto alpha = random_box_alpha(rng, n, cfg.C);
        for (std::size_t j = 0; j < n; ++j) {
            state.alpha.set(j, alpha[j]);
            if (alpha[j] != 0.0) state.model.add_entry(ds.y(j) * alpha[j], ds.x(j), true, j);
        }
        const std::size_t i = rng.uniform_index(n);
        sca_step(state, ds, i);
        const auto again = sca_step(state, ds, i);
        worst = std::max(worst, std::abs(again.delta));
        if (again.delta == 0.0) ++exact_zero;
    }
    res.passed = worst <= opt.tolerance;
    res.detail = "max |delta_2| = " + sci(worst) + " (tol " + sci(opt.tolerance) + "), exactly zero in " +
                 std::to_string(exact_zero) + "/" + std::to_string(opt.trials);
    return res;
}

CheckResult merge_oracle(const MergeOracleOptions& opt) {
    CheckResult res{"merge-oracle", true, false, {}};
    Rng rng(opt.seed, RngStream::verification);
    double worst_h = 0.0;
    double worst_beta = 0.0;
    double min_wd = 0.0;
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
        const auto xi = random_point(rng, 5);
        const auto xj = random_point(rng, 5);
        const double gamma = rng.uniform(0.05, 1.0);
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        const double bi = sign * rng.uniform(0.05, 1.0);
        const double bj = sign * rng.uniform(0.05, 1.0);
        const auto spec = KernelSpec::gaussian(gamma);

        const auto golden = golden_section_h(bi, bj, xi, xj, spec);
        const auto grid = oracle::grid_merge(bi, bj, xi, xj, gamma, opt.grid_points);
        worst_h = std::max(worst_h, std::abs(golden.h - grid.h));

        const auto xp = linear_combination(1.0 - golden.h, xi, golden.h, xj);
        const double closed = merged_beta_closed_form(bi, bj, kernel_eval(spec, xi, xp),
                                                      kernel_eval(spec, xj, xp), kernel_eval(spec, xp, xp));
        const double span = std::abs(bi) + std::abs(bj);
        const double grid_bp =
            oracle::grid_beta_prime(bi, bj, xi, xj, xp, gamma, -span, span, opt.grid_points);
        worst_beta = std::max(worst_beta, std::abs(closed - grid_bp));

        min_wd = std::min({min_wd, golden.weight_degradation, weight_degradation(bi, bj, xi, xj, xp, spec)});
    }
    res.passed = worst_h <= opt.h_tolerance && worst_beta <= opt.beta_tolerance && min_wd >= 0.0;
    res.detail = "max |h - h_grid| = " + sci(worst_h) + " (tol " + sci(opt.h_tolerance) +
                 "), max |beta' - beta'_grid| = " + sci(worst_beta) + " (tol " + sci(opt.beta_tolerance) +
                 "), min WD = " + sci(min_wd);
    return res;
}

CheckResult theorem1(const Theorem1Options& opt) {
    CheckResult res{"theorem1", true, false, {}};
    Rng master(opt.seed, RngStream::verification);
    const auto ds = make_two_blobs(opt.n, 5, master());
    const auto spec = KernelSpec::gaussian(opt.gamma);
    const std::size_t n = ds.size();

    const auto eig = smallest_eigenvalue_Q(ds, spec);
    if (eig.degenerate) {
        res.passed = false;
        res.detail = "Q not positive definite, kappa = " + sci(eig.kappa);
        return res;
    }
    const auto q = oracle::dense_q(ds, spec);
    const auto ref = oracle::solve_box_qp(q, n, opt.C);
    const double d_star = ref.objective;

    std::vector<double> gram(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) gram[a * n + b] = kernel_eval(spec, ds.x(a), ds.x(b));

    const std::size_t checkpoints = opt.epochs;
    std::vector<double> mean_subopt(checkpoints + 1, 0.0);
    std::vector<double> mean_bound(checkpoints + 1, 0.0);
    double max_e = 0.0;

    for (std::size_t run = 0; run < opt.runs; ++run) {
        TrainConfig cfg;
        cfg.algo = Algorithm::bsca;
        cfg.C = opt.C;
        cfg.kernel = spec;
        cfg.budget = opt.budget;
        cfg.epochs = opt.epochs;
        cfg.seed = master();
        SolverState state(cfg, n);
        std::vector<double> exact(n, 0.0);
        std::vector<double> budget_margins(n);
        std::vector<double> e_trace;
        e_trace.reserve(n * opt.epochs);

        mean_subopt[0] += d_star - dual_objective(state.alpha, ds, spec);
        for (std::size_t epoch = 1; epoch <= opt.epochs; ++epoch) {
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t k = 0; k < n; ++k) budget_margins[k] = predict_margin(state.model, ds.x(k));
                const double e = relative_approx_error(state.alpha.values(), exact, budget_margins, ds, opt.C, spec);
                e_trace.push_back(e);
                max_e = std::max(max_e, e);
                const std::size_t i = state.rng.uniform_index(n);
                const auto r = bsca_step(state, ds, i);
                if (r.delta != 0.0)
                    for (std::size_t k = 0; k < n; ++k) exact[k] += r.delta * ds.y(i) * gram[k * n + i];
            }
            mean_subopt[epoch] += d_star - dual_objective(state.alpha, ds, spec);
        }
        const auto bound = theorem1_bound(d_star, n, opt.C, eig.kappa, e_trace);
        for (std::size_t c = 0; c <= checkpoints; ++c) mean_bound[c] += bound[c * n];
    }

    std::size_t violations = 0;
    double tightest = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c <= checkpoints; ++c) {
        mean_subopt[c] /= static_cast<double>(opt.runs);
        mean_bound[c] /= static_cast<double>(opt.runs);
        if (mean_subopt[c] > mean_bound[c] + opt.slack) ++violations;
        tightest = std::min(tightest, mean_bound[c] - mean_subopt[c]);
    }
    res.passed = violations == 0 && ref.converged;
    res.detail = "kappa = " + sci(eig.kappa) + ", D* = " + sci(d_star) + ", violations " +
                 std::to_string(violations) + "/" + std::to_string(checkpoints + 1) +
                 ", min (bound - subopt) = " + sci(tightest) + ", final mean subopt = " +
                 sci(mean_subopt.back()) + ", max E = " + sci(max_e);
    return res;
}

CheckResult lemma2(const Lemma2Options& opt) {
    CheckResult res{"lemma2", true, false, {}};
    Rng master(opt.seed, RngStream::verification);
    const auto ds = make_two_blobs(opt.n, 2, master());
    const auto spec = KernelSpec::gaussian(opt.gamma);
    const auto ref = oracle::solve_svm_dual(ds, spec, opt.C);
    const auto pred = lemma2_predictions(ref.alpha, opt.C);

    TrainConfig cfg;
    cfg.C = opt.C;
    cfg.kernel = spec;
    cfg.epochs = opt.epochs;
    cfg.log_every = opt.window_epochs;
    cfg.seed = master();
    cfg.skip_dual_objective = true;

    cfg.algo = Algorithm::sgd;
    const auto sgd = train(cfg, ds, ds);
    cfg.algo = Algorithm::sca;
    const auto sca = train(cfg, ds, ds);

    const double measured_sgd = sgd.records.back().violation_fraction;
    const double measured_sca = sca.records.back().nonzero_step_fraction;
    const double err_sgd = std::abs(measured_sgd - pred.p_sgd);
    const double err_sca = std::abs(measured_sca - pred.p_sca);
    res.passed = ref.converged && err_sgd <= opt.tolerance && err_sca <= opt.tolerance;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "p_SGD pred %.4f meas %.4f | p_SCA pred %.4f meas %.4f (last %zu epochs, tol %.2f)",
                  pred.p_sgd, measured_sgd, pred.p_sca, measured_sca, opt.window_epochs, opt.tolerance);
    res.detail = buf;
    if (!ref.converged) res.detail += ", ORACLE NOT CONVERGED";
    return res;
}

CheckResult budget_inactive_equivalence(const EquivalenceOptions& opt) {
    CheckResult res{"budget-inactive-equivalence", true, false, {}};
    Rng master(opt.seed, RngStream::verification);
    std::size_t identical = 0;
    std::size_t total_steps = 0;
    for (std::size_t inst = 0; inst < opt.instances; ++inst) {
        const auto ds = make_two_blobs(opt.n, 3, master());
        TrainConfig cfg;
        cfg.C = master.uniform(0.5, 32.0);
        cfg.kernel = KernelSpec::gaussian(master.uniform(0.2, 2.0));
        cfg.budget = ds.size();
        cfg.epochs = opt.epochs;
        cfg.log_every = opt.epochs;
        cfg.seed = master();
        cfg.coalesce = true;

        auto record = [&](Algorithm algo) {
            std::vector<StepReport> steps;
            TrainObserver obs;
            obs.on_step = [&steps](const SolverState&, const StepReport& r) { steps.push_back(r); };
            cfg.algo = algo;
            auto run = train(cfg, ds, ds, obs);
            return std::pair{std::move(steps), std::move(run)};
        };
        const auto [bsca_steps, bsca_run] = record(Algorithm::bsca);
        const auto [sca_steps, sca_run] = record(Algorithm::sca);

        bool same = bsca_steps.size() == sca_steps.size() && bsca_run.alpha == sca_run.alpha &&
                    bsca_run.model.size() == sca_run.model.size();
        for (std::size_t s = 0; same && s < bsca_steps.size(); ++s) {
            const auto& a = bsca_steps[s];
            const auto& b = sca_steps[s];
            same = a.index == b.index && a.margin == b.margin && a.delta == b.delta && !a.maintenance;
        }
        for (std::size_t e = 0; same && e < bsca_run.model.size(); ++e)
            same = bsca_run.model.entry(e).beta == sca_run.model.entry(e).beta &&
                   bsca_run.model.entry(e).point == sca_run.model.entry(e).point;
        total_steps += bsca_steps.size();
        if (same) ++identical;
    }
    res.passed = identical == opt.instances;
    res.detail = std::to_string(identical) + "/" + std::to_string(opt.instances) +
                 " instances bit-identical (" + std::to_string(total_steps) + " steps compared)";
    return res;
}

CheckResult merge_fraction(const MergeFractionOptions& opt) {
    CheckResult res{"merge-fraction", true, false, {}};
    Rng master(opt.seed, RngStream::verification);
    const auto ds = make_two_blobs(opt.n, 2, master());
    TrainConfig cfg;
    cfg.C = opt.C;
    cfg.kernel = KernelSpec::gaussian(opt.gamma);
    cfg.budget = opt.budget;
    cfg.epochs = opt.epochs;
    cfg.log_every = 1;
    cfg.seed = master();
    cfg.skip_dual_objective = true;

    auto tail_stats = [&](const std::vector<EpochRecord>& recs) {
        const std::size_t k = std::min(opt.tail_epochs, recs.size());
        double mean = 0.0;
        for (std::size_t r = recs.size() - k; r < recs.size(); ++r) mean += recs[r].merge_fraction;
        mean /= static_cast<double>(k);
        double var = 0.0;
        for (std::size_t r = recs.size() - k; r < recs.size(); ++r)
            var += (recs[r].merge_fraction - mean) * (recs[r].merge_fraction - mean);
        return std::pair{mean, std::sqrt(var / static_cast<double>(k))};
    };
    cfg.algo = Algorithm::bsca;
    const auto [bsca_mean, bsca_sd] = tail_stats(train(cfg, ds, ds).records);
    cfg.algo = Algorithm::bsgd;
    const auto [bsgd_mean, bsgd_sd] = tail_stats(train(cfg, ds, ds).records);

    res.passed = bsca_sd < opt.max_tail_stddev && bsca_mean < bsgd_mean;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "last %zu epochs: BSCA merge fraction %.4f (sd %.4f), BSGD %.4f (sd %.4f), B=%zu",
                  opt.tail_epochs, bsca_mean, bsca_sd, bsgd_mean, bsgd_sd, opt.budget);
    res.detail = buf;
    return res;
}

CheckResult replication(const ReplicationOptions& opt) {
    CheckResult res{"replication", true, false, {}};
    struct Target {
        const char* name;
        const char* train_file;
        const char* test_file;
        double C;
        double gamma;
        double accuracy;
        double tolerance;
    };
    const Target targets[] = {
        {"ADULT", "a9a", "a9a.t", 32.0, 0.0078125, 0.8482, 0.010},
        {"IJCNN", "ijcnn1", "ijcnn1.t", 32.0, 2.0, 0.9877, 0.015},
    };
    std::ostringstream detail;
    for (const auto& t : targets) {
        const auto train_path = opt.data_dir / t.train_file;
        const auto test_path = opt.data_dir / t.test_file;
        if (opt.data_dir.empty() || !std::filesystem::exists(train_path) || !std::filesystem::exists(test_path)) {
            res.skipped = true;
            res.detail = std::string("dataset files not found (") + t.train_file + ", " + t.test_file +
                         ") in '" + opt.data_dir.string() + "'";
            return res;
        }
        const auto train_set = load_dataset(train_path);
        const auto test_set = load_dataset(test_path);
        TrainConfig cfg;
        cfg.C = t.C;
        cfg.kernel = KernelSpec::gaussian(t.gamma);
        cfg.budget = opt.budget;
        cfg.epochs = opt.epochs;
        cfg.log_every = 1;
        cfg.seed = 1;
        cfg.skip_dual_objective = true;

        auto plateau_epoch = [](const std::vector<EpochRecord>& recs) {
            const double final_acc = recs.back().test_accuracy;
            std::size_t epoch = recs.back().epoch;
            for (std::size_t r = recs.size(); r-- > 0;) {
                if (std::abs(recs[r].test_accuracy - final_acc) > 0.005) break;
                epoch = recs[r].epoch;
            }
            return epoch;
        };
        cfg.algo = Algorithm::bsca;
        const auto bsca = train(cfg, train_set, test_set);
        cfg.algo = Algorithm::bsgd;
        const auto bsgd = train(cfg, train_set, test_set);
        const double acc = bsca.records.back().test_accuracy;
        const bool acc_ok = std::abs(acc - t.accuracy) <= t.tolerance;
        const auto p_bsca = plateau_epoch(bsca.records);
        const auto p_bsgd = plateau_epoch(bsgd.records);
        const bool faster = p_bsca < p_bsgd;
        res.passed = res.passed && acc_ok && faster;
        detail << t.name << ": BSCA acc " << acc << " (target " << t.accuracy << " +- " << t.tolerance
               << "), plateau epoch BSCA " << p_bsca << " vs BSGD " << p_bsgd << "; ";
    }
    res.detail = detail.str();
    return res;
}

}  // namespace budgetsvm::verify
