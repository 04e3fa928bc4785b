#include "budgetsvm/budget_maintenance.hpp"

#include "budgetsvm/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace budgetsvm {

double merged_beta_closed_form(double beta_i, double beta_j, double k_i, double k_j, double k_self) {
    return (beta_i * k_i + beta_j * k_j) / k_self;
}

double weight_degradation(double beta_i, double beta_j, const SparseVector& x_i,
                          const SparseVector& x_j, const SparseVector& x_prime,
                          const KernelSpec& spec) {
    const double k_ii = kernel_eval(spec, x_i, x_i);
    const double k_jj = kernel_eval(spec, x_j, x_j);
    const double k_ij = kernel_eval(spec, x_i, x_j);
    const double k_ip = kernel_eval(spec, x_i, x_prime);
    const double k_jp = kernel_eval(spec, x_j, x_prime);
    const double k_pp = kernel_eval(spec, x_prime, x_prime);
    const double beta_p = merged_beta_closed_form(beta_i, beta_j, k_ip, k_jp, k_pp);
    const double wd = beta_i * beta_i * k_ii + beta_j * beta_j * k_jj + 2.0 * beta_i * beta_j * k_ij -
                      beta_p * beta_p * k_pp;
    return wd > 0.0 ? wd : 0.0;
}

namespace {

// Gaussian kernel along the segment: k(x_i, x') = exp(-g d2 h^2), k(x_j, x') = exp(-g d2 (1-h)^2).
struct SegmentObjective {
    double beta_i;
    double beta_j;
    double gd2;  // gamma * ||x_i - x_j||^2

    double merged_beta(double h) const {
        return beta_i * std::exp(-gd2 * h * h) + beta_j * std::exp(-gd2 * (1.0 - h) * (1.0 - h));
    }
    double operator()(double h) const { return std::abs(merged_beta(h)); }
};

}  // namespace

GoldenResult golden_section_h(double beta_i, double beta_j, const SparseVector& x_i,
                              const SparseVector& x_j, const KernelSpec& spec) {
    if (spec.kind != KernelKind::gaussian)
        throw ContractViolation("golden_section_h requires a gaussian kernel");
    if (beta_i * beta_j < 0.0)
        throw ContractViolation("golden_section_h requires coefficients of equal sign");

    const SegmentObjective f{beta_i, beta_j, spec.gamma * squared_distance(x_i, x_j)};

    constexpr int kScan = 20;
    double best_h = 0.0;
    double best_val = f(0.0);
    for (int k = 1; k <= kScan; ++k) {
        const double h = static_cast<double>(k) / kScan;
        const double v = f(h);
        if (v > best_val) {
            best_val = v;
            best_h = h;
        }
    }

    double a = std::max(0.0, best_h - 1.0 / kScan);
    double b = std::min(1.0, best_h + 1.0 / kScan);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double p = b - ratio * (b - a);
    double q = a + ratio * (b - a);
    double fp = f(p);
    double fq = f(q);
    while (b - a >= kGoldenTolerance) {
        if (fp >= fq) {
            b = q;
            q = p;
            fq = fp;
            p = b - ratio * (b - a);
            fp = f(p);
        } else {
            a = p;
            p = q;
            fp = fq;
            q = a + ratio * (b - a);
            fq = f(q);
        }
    }
    const double mid = 0.5 * (a + b);
    if (f(mid) > best_val) best_h = mid;

    GoldenResult r;
    r.h = best_h;
    r.merged_beta = f.merged_beta(best_h);
    const double k_ij = std::exp(-f.gd2);
    const double wd = beta_i * beta_i + beta_j * beta_j + 2.0 * beta_i * beta_j * k_ij -
                      r.merged_beta * r.merged_beta;
    r.weight_degradation = wd > 0.0 ? wd : 0.0;
    return r;
}

std::optional<MergeCandidate> best_merge_partner(const BudgetModel& m, std::size_t i) {
    const auto entries = m.entries();
    const double beta_i = entries[i].beta;
    std::optional<std::size_t> best_j;
    GoldenResult best;
    for (std::size_t j = 0; j < entries.size(); ++j) {
        if (j == i || !(beta_i * entries[j].beta > 0.0)) continue;
        const auto r = golden_section_h(beta_i, entries[j].beta, entries[i].point, entries[j].point,
                                        m.kernel());
        if (!best_j || r.weight_degradation < best.weight_degradation) {
            best_j = j;
            best = r;
        }
    }
    if (!best_j) return std::nullopt;

    const auto& xi = entries[i].point;
    const auto& xj = entries[*best_j].point;
    const double bj = entries[*best_j].beta;
    MergeCandidate c;
    c.i = i;
    c.j = *best_j;
    c.h = best.h;
    c.merged_point = linear_combination(1.0 - best.h, xi, best.h, xj);
    // Coefficient and degradation are recomputed against the materialized point.
    const auto& spec = m.kernel();
    const double raw_beta = merged_beta_closed_form(
        beta_i, bj, kernel_eval(spec, xi, c.merged_point), kernel_eval(spec, xj, c.merged_point),
        kernel_eval(spec, c.merged_point, c.merged_point));
    c.merged_beta = m.scale() * raw_beta;
    c.weight_degradation =
        m.scale() * m.scale() * weight_degradation(beta_i, bj, xi, xj, c.merged_point, spec);
    return c;
}

MaintenanceReport select_and_merge(BudgetModel& m) {
    if (m.capacity() == BudgetModel::unbounded || m.size() != m.capacity() + 1)
        throw ContractViolation("select_and_merge needs exactly capacity+1 entries");

    const auto entries = m.entries();
    std::size_t i_star = 0;
    for (std::size_t s = 1; s < entries.size(); ++s)
        if (std::abs(entries[s].beta) < std::abs(entries[i_star].beta)) i_star = s;

    MaintenanceReport report;
    report.i = i_star;
    auto cand = best_merge_partner(m, i_star);
    if (!cand) {
        const auto& e = entries[i_star];
        const double eff = m.effective_beta(i_star);
        report.kind = MaintenanceKind::remove;
        report.weight_degradation = eff * eff * kernel_eval(m.kernel(), e.point, e.point);
        m.remove_entry(i_star);
        return report;
    }
    report.kind = MaintenanceKind::merge;
    report.j = cand->j;
    report.h = cand->h;
    report.weight_degradation = cand->weight_degradation;
    const std::size_t keep = std::min(cand->i, cand->j);
    const std::size_t drop = std::max(cand->i, cand->j);
    m.merge_into(keep, drop, cand->merged_beta, std::move(cand->merged_point));
    return report;
}

const char* to_string(MaintenanceKind kind) {
    return kind == MaintenanceKind::merge ? "merge" : "remove";
}

}  // namespace budgetsvm
