#include "budgetsvm/diagnostics.hpp"
#include "budgetsvm/oracle/reference.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace budgetsvm;
using budgetsvm::testing::random_dataset;

namespace {

// Solves A x = b by Gaussian elimination with partial pivoting; false if singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n, std::vector<double>& x) {
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (std::abs(a[piv * n + c]) < 1e-14) return false;
        for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return true;
}

// Maximum of the box QP by enumerating every face of the box.
double enumerate_faces(const std::vector<double>& q, std::size_t n, double C) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t faces = 1;
    for (std::size_t k = 0; k < n; ++k) faces *= 3;
    for (std::size_t code = 0; code < faces; ++code) {
        std::vector<int> state(n);
        std::size_t c = code;
        for (auto& s : state) {
            s = static_cast<int>(c % 3);
            c /= 3;
        }
        std::vector<double> alpha(n, 0.0);
        std::vector<std::size_t> free;
        for (std::size_t k = 0; k < n; ++k) {
            if (state[k] == 1) alpha[k] = C;
            if (state[k] == 2) free.push_back(k);
        }
        const std::size_t m = free.size();
        std::vector<double> a(m * m), b(m), x;
        for (std::size_t r = 0; r < m; ++r) {
            b[r] = 1.0;
            for (std::size_t k = 0; k < n; ++k) b[r] -= q[free[r] * n + k] * alpha[k];
            for (std::size_t s = 0; s < m; ++s) a[r * m + s] = q[free[r] * n + free[s]];
        }
        if (m > 0 && !solve_dense(a, b, m, x)) continue;
        bool feasible = true;
        for (std::size_t r = 0; r < m; ++r) {
            feasible = feasible && x[r] >= 0.0 && x[r] <= C;
            alpha[free[r]] = x[r];
        }
        if (feasible) best = std::max(best, oracle::dense_dual_objective(q, n, alpha));
    }
    return best;
}

}  // namespace

TEST_CASE("box QP solver matches face enumeration") {
    Rng rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(5);
        const auto ds = random_dataset(rng, n, 3);
        const double C = rng.uniform(0.1, 5.0);
        const auto q = oracle::dense_q(ds, KernelSpec::gaussian(rng.uniform(0.2, 2.0)));
        const auto sol = oracle::solve_box_qp(q, n, C);
        CHECK(sol.converged);
        CHECK(std::abs(sol.objective - enumerate_faces(q, n, C)) <= 1e-9);
        for (double a : sol.alpha) {
            CHECK(a >= 0.0);
            CHECK(a <= C);
        }
    }
}

TEST_CASE("eigenvalue references agree") {
    const std::vector<double> two{2.0, 1.0, 1.0, 2.0};
    const auto ev = oracle::symmetric_eigenvalues(two, 2);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(smallest_eigenvalue_symmetric(two, 2) == doctest::Approx(1.0).epsilon(1e-14));

    Rng rng(72);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + rng.uniform_index(40);
        std::vector<double> a(n * n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c <= r; ++c) a[r * n + c] = a[c * n + r] = rng.uniform(-1, 1);
        CHECK(std::abs(smallest_eigenvalue_symmetric(a, n) - oracle::symmetric_eigenvalues(a, n).front()) <= 1e-10);
    }
}

TEST_CASE("grid merge on identical points") {
    const auto x = SparseVector::from_dense(std::vector<double>{1.0, -1.0});
    const auto g = oracle::grid_merge(0.2, 0.3, x, x, 1.0, 101);
    CHECK(g.weight_degradation <= 1e-14);
    CHECK(g.beta_prime == doctest::Approx(0.5).epsilon(1e-4));
}
