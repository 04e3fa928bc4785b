#include "budgetsvm/model.hpp"

#include "budgetsvm/errors.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace budgetsvm {

BudgetModel::BudgetModel(KernelSpec spec, std::size_t capacity) : spec_(spec), capacity_(capacity) {
    spec_.validate();
    if (capacity_ == 0) throw ConfigError("model capacity must be positive");
}

BudgetModel BudgetModel::from_entries(KernelSpec spec, std::size_t capacity, double scale,
                                      std::vector<ModelEntry> entries) {
    if (!(scale > 0.0)) throw ConfigError("model scale must be positive");
    BudgetModel m(spec, capacity);
    m.scale_ = scale;
    m.entries_ = std::move(entries);
    std::erase_if(m.entries_, [](const ModelEntry& e) { return e.beta == 0.0; });
    m.rebuild_index();
    return m;
}

void BudgetModel::rebuild_index() {
    pristine_.clear();
    for (std::size_t slot = 0; slot < entries_.size(); ++slot)
        if (entries_[slot].source) pristine_.try_emplace(*entries_[slot].source, slot);
}

std::size_t BudgetModel::add_entry(double effective_beta, const SparseVector& point, bool coalesce,
                                   std::optional<std::size_t> source) {
    if (coalesce && source) {
        if (auto it = pristine_.find(*source); it != pristine_.end()) {
            const std::size_t slot = it->second;
            entries_[slot].beta += effective_beta / scale_;
            if (std::abs(scale_ * entries_[slot].beta) < drop_threshold) remove_entry(slot);
            return entries_.size();
        }
    }
    if (std::abs(effective_beta) < drop_threshold) return entries_.size();
    entries_.push_back({effective_beta / scale_, point, source});
    if (source) pristine_.try_emplace(*source, entries_.size() - 1);
    return entries_.size();
}

void BudgetModel::scale_by(double factor) {
    if (factor == 0.0) {
        entries_.clear();
        pristine_.clear();
        scale_ = 1.0;
        return;
    }
    scale_ *= factor;
    if (scale_ < fold_threshold) fold_scale();
}

void BudgetModel::fold_scale() {
    for (auto& e : entries_) e.beta *= scale_;
    scale_ = 1.0;
    std::erase_if(entries_, [](const ModelEntry& e) { return std::abs(e.beta) < drop_threshold; });
    rebuild_index();
}

void BudgetModel::merge_into(std::size_t keep, std::size_t drop, double effective_beta,
                             SparseVector point) {
    if (keep == drop || keep >= entries_.size() || drop >= entries_.size())
        throw ContractViolation("merge_into: invalid slots");
    entries_[keep] = ModelEntry{effective_beta / scale_, std::move(point), std::nullopt};
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(drop));
    const std::size_t merged = keep > drop ? keep - 1 : keep;
    if (std::abs(scale_ * entries_[merged].beta) < drop_threshold)
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(merged));
    rebuild_index();
}

void BudgetModel::remove_entry(std::size_t slot) {
    if (slot >= entries_.size()) throw ContractViolation("remove_entry: invalid slot");
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(slot));
    rebuild_index();
}

double predict_margin(const BudgetModel& m, const SparseVector& x) {
    double s = 0.0;
    for (const auto& e : m.entries()) s += e.beta * kernel_eval(m.kernel(), x, e.point);
    return m.scale() * s;
}

double model_norm_sq(const BudgetModel& m) {
    const auto entries = m.entries();
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t a = 0; a < entries.size(); ++a) {
        const auto& ea = entries[a];
        diag += ea.beta * ea.beta * kernel_eval(m.kernel(), ea.point, ea.point);
        for (std::size_t b = a + 1; b < entries.size(); ++b)
            off += ea.beta * entries[b].beta * kernel_eval(m.kernel(), ea.point, entries[b].point);
    }
    const double s = m.scale() * m.scale() * (diag + 2.0 * off);
    return s > 0.0 ? s : 0.0;
}

int classify(const BudgetModel& m, const SparseVector& x) {
    return predict_margin(m, x) >= 0.0 ? 1 : -1;
}

// Header: budgetsvm-model <gaussian|linear> <gamma> <scale> <capacity|inf> <entries>
void save_model(const BudgetModel& m, std::ostream& out) {
    out << "budgetsvm-model " << (m.kernel().kind == KernelKind::gaussian ? "gaussian" : "linear")
        << ' ' << format_double(m.kernel().gamma) << ' ' << format_double(m.scale()) << ' '
        << (m.capacity() == BudgetModel::unbounded ? std::string("inf") : std::to_string(m.capacity()))
        << ' ' << m.size() << '\n';
    for (const auto& e : m.entries()) {
        out << format_double(e.beta);
        if (!e.point.empty()) out << ' ' << format_sparse(e.point);
        out << '\n';
    }
}

namespace {

double parse_number(const std::string& tok, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(line, "bad number '" + tok + "'");
    return v;
}

}  // namespace

BudgetModel load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty model file");
    std::istringstream header(line);
    std::string magic, kind, gamma_tok, scale_tok, cap_tok;
    std::size_t count = 0;
    if (!(header >> magic >> kind >> gamma_tok >> scale_tok >> cap_tok >> count) ||
        magic != "budgetsvm-model")
        throw FormatError("bad model header");
    KernelSpec spec;
    if (kind == "gaussian")
        spec = KernelSpec{KernelKind::gaussian, parse_number(gamma_tok, 1)};
    else if (kind == "linear")
        spec = KernelSpec{KernelKind::linear, parse_number(gamma_tok, 1)};
    else
        throw FormatError("unknown kernel '" + kind + "'");
    const double scale = parse_number(scale_tok, 1);
    const std::size_t capacity =
        cap_tok == "inf" ? BudgetModel::unbounded : static_cast<std::size_t>(std::stoull(cap_tok));

    std::vector<ModelEntry> entries;
    entries.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        if (!std::getline(in, line)) throw FormatError("model file truncated");
        const std::size_t line_no = k + 2;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        const auto sp = view.find(' ');
        const std::string beta_tok(view.substr(0, sp));
        const auto rest = sp == std::string_view::npos ? std::string_view{} : view.substr(sp + 1);
        entries.push_back({parse_number(beta_tok, line_no), parse_sparse_tokens(rest, line_no), std::nullopt});
    }
    return BudgetModel::from_entries(spec, capacity, scale, std::move(entries));
}

void save_model(const BudgetModel& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    save_model(m, out);
}

BudgetModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load_model(in);
}

AlphaState::AlphaState(std::size_t n, double C) : alpha_(n, 0.0), C_(C) {
    if (!(C > 0.0)) throw ConfigError("C must be positive");
}

void AlphaState::set(std::size_t i, double value) {
    assert(value >= 0.0 && value <= C_);
    alpha_[i] = value;
}

}  // namespace budgetsvm
