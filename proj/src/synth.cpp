#include "budgetsvm/synth.hpp"

#include "budgetsvm/errors.hpp"
#include "budgetsvm/rng.hpp"

#include <cmath>
#include <random>

namespace budgetsvm {

SparseDataset make_two_blobs(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0 || d == 0) throw ConfigError("synthetic data needs n >= 1 and d >= 1");
    Rng rng(seed, RngStream::synthetic);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double offset = 1.0 / std::sqrt(static_cast<double>(d));

    std::vector<SparseVector> xs;
    std::vector<double> ys;
    xs.reserve(n);
    ys.reserve(n);
    std::vector<double> dense(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        for (auto& v : dense) v = y * offset + noise(rng);
        xs.push_back(SparseVector::from_dense(dense));
        ys.push_back(y);
    }
    return SparseDataset(std::move(xs), std::move(ys));
}

}  // namespace budgetsvm
