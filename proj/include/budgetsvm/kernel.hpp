#pragma once

#include "budgetsvm/data_io.hpp"

#include <span>
#include <string>
#include <vector>

namespace budgetsvm {

enum class KernelKind { gaussian, linear };

/// k(a,b) = exp(-gamma ||a-b||^2) for gaussian, <a,b> for linear.
struct KernelSpec {
    KernelKind kind = KernelKind::gaussian;
    double gamma = 1.0;

    static KernelSpec gaussian(double gamma);
    static KernelSpec linear() { return {KernelKind::linear, 1.0}; }

    /// Throws ConfigError when gamma <= 0 for a gaussian kernel.
    void validate() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) noexcept;

/// Element j equals kernel_eval(spec, x, points[j]) bit for bit.
std::vector<double> kernel_row(const KernelSpec& spec, const SparseVector& x,
                               std::span<const SparseVector> points);

std::string to_string(const KernelSpec& spec);

}  // namespace budgetsvm
