#pragma once

// Numerical checks of the solvers against independent references. Shared by
// the `verify` CLI command and the acceptance test binary.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace budgetsvm::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;  // measured quantities
};

struct QpOracleOptions {
    std::uint64_t seed = 1;
    std::size_t instances = 20;
    std::size_t max_n = 50;
    std::size_t epochs = 500;
    double tolerance = 1e-6;
};
/// Exact SCA vs the projected-gradient QP oracle on random instances with C in [0.5, 32].
CheckResult qp_oracle(const QpOracleOptions& opt = {});

struct Lemma1Options {
    std::uint64_t seed = 1;
    std::size_t trials = 1000;
    std::size_t max_n = 30;
    double tolerance = 1e-10;
};
/// |[D(a + d e_i) - D(a)] - J(a, i, d)| over random (a, i, d).
CheckResult lemma1(const Lemma1Options& opt = {});

struct StepOptimalityOptions {
    std::uint64_t seed = 1;
    std::size_t trials = 1000;
    std::size_t max_n = 30;
    double tolerance = 1e-12;
};
/// Re-applying the coordinate step at the same index moves alpha_i by at most `tolerance`.
CheckResult step_optimality(const StepOptimalityOptions& opt = {});

struct MergeOracleOptions {
    std::uint64_t seed = 1;
    std::size_t trials = 1000;
    std::size_t grid_points = 100'001;
    double h_tolerance = 2e-3;
    double beta_tolerance = 1e-4;
};
/// Golden-section h and closed-form beta' vs exhaustive grids; WD >= 0.
CheckResult merge_oracle(const MergeOracleOptions& opt = {});

struct Theorem1Options {
    std::uint64_t seed = 1;
    std::size_t n = 50;
    std::size_t budget = 20;
    std::size_t runs = 100;
    std::size_t epochs = 20;
    double C = 1.0;
    double gamma = 0.5;
    double slack = 1e-9;
};
/// Mean suboptimality of BSCA over seeds vs the seed-averaged budgeted rate bound.
CheckResult theorem1(const Theorem1Options& opt = {});

struct Lemma2Options {
    std::uint64_t seed = 1;
    std::size_t n = 500;
    std::size_t epochs = 500;
    std::size_t window_epochs = 100;
    double C = 1.0;
    double gamma = 1.0;
    double tolerance = 0.05;
};
/// Long-run SGD violation and SCA nonzero-step fractions vs predictions from alpha*.
CheckResult lemma2(const Lemma2Options& opt = {});

struct EquivalenceOptions {
    std::uint64_t seed = 1;
    std::size_t instances = 5;
    std::size_t n = 60;
    std::size_t epochs = 10;
};
/// BSCA with coalescing and B >= n reproduces exact SCA bit for bit.
CheckResult budget_inactive_equivalence(const EquivalenceOptions& opt = {});

struct MergeFractionOptions {
    std::uint64_t seed = 1;
    std::size_t n = 500;
    std::size_t budget = 50;
    std::size_t epochs = 150;
    std::size_t tail_epochs = 10;
    double C = 1.0;
    double gamma = 1.0;
    double max_tail_stddev = 0.02;
};
/// BSCA merge fraction stabilizes and stays below BSGD's at equal budget.
CheckResult merge_fraction(const MergeFractionOptions& opt = {});

struct ReplicationOptions {
    std::filesystem::path data_dir;  // holds a9a/a9a.t (ADULT) and ijcnn1/ijcnn1.t
    std::size_t budget = 500;
    std::size_t epochs = 10;
};
/// Benchmark-scale accuracy targets; skipped when the dataset files are absent.
CheckResult replication(const ReplicationOptions& opt);

}  // namespace budgetsvm::verify
