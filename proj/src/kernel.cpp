#include "budgetsvm/kernel.hpp"

#include "budgetsvm/errors.hpp"

#include <cmath>

namespace budgetsvm {

KernelSpec KernelSpec::gaussian(double gamma) {
    KernelSpec spec{KernelKind::gaussian, gamma};
    spec.validate();
    return spec;
}

void KernelSpec::validate() const {
    if (kind == KernelKind::gaussian && !(gamma > 0.0))
        throw ConfigError("gaussian kernel needs gamma > 0");
}

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) noexcept {
    switch (spec.kind) {
        case KernelKind::gaussian:
            return std::exp(-spec.gamma * squared_distance(a, b));
        case KernelKind::linear:
            return sparse_dot(a, b);
    }
    return 0.0;
}

std::vector<double> kernel_row(const KernelSpec& spec, const SparseVector& x,
                               std::span<const SparseVector> points) {
    std::vector<double> row;
    row.reserve(points.size());
    for (const auto& p : points) row.push_back(kernel_eval(spec, x, p));
    return row;
}

std::string to_string(const KernelSpec& spec) {
    if (spec.kind == KernelKind::linear) return "linear";
    return "gaussian gamma=" + format_double(spec.gamma);
}

}  // namespace budgetsvm
