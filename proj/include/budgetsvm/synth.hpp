#pragma once

#include "budgetsvm/data_io.hpp"

#include <cstddef>
#include <cstdint>

namespace budgetsvm {

/**
 * Two Gaussian blobs in R^d with means +-1/sqrt(d) * (1,...,1) and identity
 * covariance; each label is a fair coin flip and picks the blob. Fully
 * determined by (n, d, seed).
 */
SparseDataset make_two_blobs(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace budgetsvm
