#include "budgetsvm/diagnostics.hpp"

#include "budgetsvm/errors.hpp"
#include "budgetsvm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace budgetsvm {

namespace {

constexpr std::size_t kChunk = 64;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::size_t> nonzero_indices(std::span<const double> alpha) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] != 0.0) idx.push_back(i);
    return idx;
}

}  // namespace

void write_epoch_csv_header(std::ostream& out) { out << kEpochCsvHeader << '\n'; }

void write_epoch_csv_row(const EpochRecord& r, std::ostream& out) {
    out << r.epoch << ',' << fmt17(r.wall_time_s) << ',' << fmt17(r.primal_obj) << ','
        << fmt17(r.dual_obj) << ',' << fmt17(r.test_accuracy) << ',' << r.sv_count << ','
        << fmt17(r.merge_fraction) << ',' << fmt17(r.violation_fraction) << ','
        << fmt17(r.nonzero_step_fraction) << '\n';
}

void write_epoch_csv(std::span<const EpochRecord> records, std::ostream& out) {
    write_epoch_csv_header(out);
    for (const auto& r : records) write_epoch_csv_row(r, out);
}

std::vector<EpochRecord> read_epoch_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kEpochCsvHeader) throw FormatError("bad epoch CSV header");
    std::vector<EpochRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f[9];
        for (auto& field : f)
            if (!std::getline(ss, field, ',')) throw ParseError(line_no, "expected 9 CSV fields");
        try {
            EpochRecord r;
            r.epoch = std::stoull(f[0]);
            r.wall_time_s = std::stod(f[1]);
            r.primal_obj = std::stod(f[2]);
            r.dual_obj = std::stod(f[3]);
            r.test_accuracy = std::stod(f[4]);
            r.sv_count = std::stoull(f[5]);
            r.merge_fraction = std::stod(f[6]);
            r.violation_fraction = std::stod(f[7]);
            r.nonzero_step_fraction = std::stod(f[8]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw ParseError(line_no, "non-numeric CSV field");
        }
    }
    return out;
}

std::vector<double> model_margins(const BudgetModel& m, const SparseDataset& ds) {
    std::vector<double> out(ds.size());
    chunked_sum(ds.size(), kChunk, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = predict_margin(m, ds.x(i));
        return 0.0;
    });
    return out;
}

double primal_objective(const BudgetModel& m, const SparseDataset& ds, double C) {
    const double n = static_cast<double>(ds.size());
    const double lambda = 1.0 / (n * C);
    const double hinge = chunked_sum(ds.size(), kChunk, [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i)
            s += std::max(0.0, 1.0 - ds.y(i) * predict_margin(m, ds.x(i)));
        return s;
    });
    return 0.5 * lambda * model_norm_sq(m) + hinge / n;
}

double dual_objective(std::span<const double> alpha, const SparseDataset& ds, const KernelSpec& spec) {
    const auto nz = nonzero_indices(alpha);
    double linear = 0.0;
    for (auto i : nz) linear += alpha[i];
    // Upper triangle plus diagonal, row-chunked.
    const double quad = chunked_sum(nz.size(), 16, [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t a = b; a < e; ++a) {
            const std::size_t i = nz[a];
            const double ai = alpha[i] * ds.y(i);
            double row = 0.5 * ai * kernel_eval(spec, ds.x(i), ds.x(i));
            for (std::size_t c = a + 1; c < nz.size(); ++c) {
                const std::size_t j = nz[c];
                row += alpha[j] * ds.y(j) * kernel_eval(spec, ds.x(i), ds.x(j));
            }
            s += ai * row;
        }
        return s;
    });
    // quad = 1/2 sum_i a_i^2 Q_ii + sum_{i<j} a_i a_j Q_ij = 1/2 alpha^T Q alpha
    return linear - quad;
}

double dual_objective(const AlphaState& alpha, const SparseDataset& ds, const KernelSpec& spec) {
    return dual_objective(alpha.values(), ds, spec);
}

double q_row_dot(std::span<const double> alpha, const SparseDataset& ds, const KernelSpec& spec,
                 std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (alpha[j] != 0.0) s += alpha[j] * ds.y(j) * kernel_eval(spec, ds.x(i), ds.x(j));
    return ds.y(i) * s;
}

double progress_J_from_gradient(double gradient, double q_ii, double delta) {
    const double newton = gradient / q_ii;
    return 0.5 * q_ii * (newton * newton - (delta - newton) * (delta - newton));
}

double progress_J(std::span<const double> alpha, const SparseDataset& ds, const KernelSpec& spec,
                  std::size_t i, double delta) {
    const double g = 1.0 - q_row_dot(alpha, ds, spec, i);
    return progress_J_from_gradient(g, kernel_eval(spec, ds.x(i), ds.x(i)), delta);
}

double clipped_step(double alpha_i, double y_times_margin, double q_ii, double C) {
    const double target = std::clamp(alpha_i + (1.0 - y_times_margin) / q_ii, 0.0, C);
    return target - alpha_i;
}

double relative_approx_error(std::span<const double> alpha, std::span<const double> exact_margins,
                             std::span<const double> budget_margins, const SparseDataset& ds,
                             double C, const KernelSpec& spec) {
    bool any = false;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double q_ii = kernel_eval(spec, ds.x(i), ds.x(i));
        const double yf = ds.y(i) * exact_margins[i];
        const double delta = clipped_step(alpha[i], yf, q_ii, C);
        const double delta_b = clipped_step(alpha[i], ds.y(i) * budget_margins[i], q_ii, C);
        const double g = 1.0 - yf;
        const double den = progress_J_from_gradient(g, q_ii, delta);
        if (!(den > 0.0)) continue;
        const double ratio = progress_J_from_gradient(g, q_ii, delta_b) / den;
        if (!any || ratio > best_ratio) best_ratio = ratio;
        any = true;
    }
    return any ? 1.0 - best_ratio : 0.0;
}

std::vector<double> dense_q_matrix(const SparseDataset& ds, const KernelSpec& spec) {
    const std::size_t n = ds.size();
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            q[i * n + j] = q[j * n + i] = ds.y(i) * ds.y(j) * kernel_eval(spec, ds.x(i), ds.x(j));
    return q;
}

double smallest_eigenvalue_symmetric(std::vector<double> a, std::size_t n) {
    if (n == 0) throw ContractViolation("empty matrix");
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };
    double frob = 0.0;
    for (double v : a) frob += v * v;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        if (off <= 1e-32 * frob) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                at(p, p) -= t * apq;
                at(q, q) += t * apq;
                at(p, q) = at(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = at(p, k) = c * akp - s * akq;
                    at(k, q) = at(q, k) = s * akp + c * akq;
                }
            }
        }
    }
    double lo = at(0, 0);
    for (std::size_t k = 1; k < n; ++k) lo = std::min(lo, at(k, k));
    return lo;
}

EigenResult smallest_eigenvalue_Q(const SparseDataset& ds, const KernelSpec& spec) {
    if (ds.size() > kMaxDenseDiagnosticsSize)
        throw ContractViolation("smallest_eigenvalue_Q: n = " + std::to_string(ds.size()) +
                                " exceeds " + std::to_string(kMaxDenseDiagnosticsSize));
    EigenResult r;
    r.kappa = smallest_eigenvalue_symmetric(dense_q_matrix(ds, spec), ds.size());
    r.degenerate = r.kappa <= kKappaDegenerate;
    return r;
}

Lemma2Prediction lemma2_predictions(std::span<const double> alpha_star, double C) {
    Lemma2Prediction p;
    if (alpha_star.empty()) return p;
    const double eps = 1e-6 * C;
    double sum = 0.0;
    std::size_t free = 0;
    for (double a : alpha_star) {
        sum += a;
        if (a > eps && a < C - eps) ++free;
    }
    const double n = static_cast<double>(alpha_star.size());
    p.p_sgd = std::clamp(sum / (n * C), 0.0, 1.0);
    p.p_sca = static_cast<double>(free) / n;
    return p;
}

std::vector<double> theorem1_bound(double d_star, std::size_t n, double C, double kappa,
                                   std::span<const double> e_trace) {
    if (!(kappa > 0.0)) throw ContractViolation("theorem1_bound requires kappa > 0");
    const double nd = static_cast<double>(n);
    const double rate = 2.0 * kappa / ((1.0 + kappa) * nd);
    std::vector<double> out;
    out.reserve(e_trace.size() + 1);
    double bound = d_star + 0.5 * nd * C * C;
    out.push_back(bound);
    for (double e : e_trace) {
        const double ec = std::clamp(e, 0.0, 1.0);
        bound *= 1.0 - rate * (1.0 - ec);
        out.push_back(bound);
    }
    return out;
}

double test_accuracy(const BudgetModel& m, const SparseDataset& test) {
    if (test.size() == 0) throw FormatError("test set is empty");
    const double correct = chunked_sum(test.size(), kChunk, [&](std::size_t b, std::size_t e) {
        double c = 0.0;
        for (std::size_t i = b; i < e; ++i)
            if (classify(m, test.x(i)) == static_cast<int>(test.y(i))) c += 1.0;
        return c;
    });
    return correct / static_cast<double>(test.size());
}

}  // namespace budgetsvm
