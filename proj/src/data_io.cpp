#include "budgetsvm/data_io.hpp"

#include "budgetsvm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

namespace budgetsvm {

namespace {

double norm_sq_of(const std::vector<Feature>& entries) {
    double s = 0.0;
    for (const auto& f : entries) s += f.value * f.value;
    return s;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Splits off the next whitespace-delimited token; empty when exhausted.
std::string_view next_token(std::string_view& rest) {
    while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
    std::size_t end = 0;
    while (end < rest.size() && !is_space(rest[end])) ++end;
    auto tok = rest.substr(0, end);
    rest.remove_prefix(end);
    return tok;
}

bool parse_real(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return false;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace

SparseVector::SparseVector(std::vector<Feature> sorted)
    : entries_(std::move(sorted)), norm_sq_(norm_sq_of(entries_)) {}

SparseVector SparseVector::from_entries(std::vector<Feature> entries) {
    std::erase_if(entries, [](const Feature& f) { return f.value == 0.0; });
    if (!std::is_sorted(entries.begin(), entries.end(),
                        [](const Feature& a, const Feature& b) { return a.index < b.index; })) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Feature& a, const Feature& b) { return a.index < b.index; });
    }
    for (std::size_t k = 1; k < entries.size(); ++k) {
        if (entries[k].index == entries[k - 1].index)
            throw std::invalid_argument("duplicate feature index " +
                                        std::to_string(entries[k].index + 1));
    }
    return SparseVector(std::move(entries));
}

SparseVector SparseVector::from_dense(std::span<const double> values) {
    std::vector<Feature> out;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (values[k] != 0.0) out.push_back({static_cast<std::uint32_t>(k), values[k]});
    return SparseVector(std::move(out));
}

std::vector<double> SparseVector::to_dense(std::size_t dim) const {
    std::vector<double> out(std::max(dim, dimension()), 0.0);
    for (const auto& f : entries_) out[f.index] = f.value;
    return out;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) noexcept {
    auto ea = a.entries();
    auto eb = b.entries();
    std::size_t i = 0, j = 0;
    double s = 0.0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].index == eb[j].index) {
            s += ea[i].value * eb[j].value;
            ++i;
            ++j;
        } else if (ea[i].index < eb[j].index) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) noexcept {
    const double d = a.norm_sq() + b.norm_sq() - 2.0 * sparse_dot(a, b);
    return d > 0.0 ? d : 0.0;
}

SparseVector linear_combination(double ca, const SparseVector& a, double cb, const SparseVector& b) {
    auto ea = a.entries();
    auto eb = b.entries();
    std::vector<Feature> out;
    out.reserve(ea.size() + eb.size());
    std::size_t i = 0, j = 0;
    auto push = [&out](std::uint32_t idx, double v) {
        if (v != 0.0) out.push_back({idx, v});
    };
    while (i < ea.size() || j < eb.size()) {
        if (j == eb.size() || (i < ea.size() && ea[i].index < eb[j].index)) {
            push(ea[i].index, ca * ea[i].value);
            ++i;
        } else if (i == ea.size() || eb[j].index < ea[i].index) {
            push(eb[j].index, cb * eb[j].value);
            ++j;
        } else {
            push(ea[i].index, ca * ea[i].value + cb * eb[j].value);
            ++i;
            ++j;
        }
    }
    return SparseVector::from_entries(std::move(out));
}

SparseDataset::SparseDataset(std::vector<SparseVector> examples, std::vector<double> labels)
    : examples_(std::move(examples)), labels_(std::move(labels)) {
    if (examples_.empty()) throw FormatError("dataset is empty");
    if (examples_.size() != labels_.size())
        throw FormatError("example/label count mismatch");
    for (double y : labels_)
        if (y != 1.0 && y != -1.0) throw FormatError("labels must be -1 or +1");
    for (const auto& x : examples_) dimension_ = std::max(dimension_, x.dimension());
}

SparseVector parse_sparse_tokens(std::string_view text, std::size_t line_no) {
    std::vector<Feature> entries;
    std::string_view rest = text;
    for (auto tok = next_token(rest); !tok.empty(); tok = next_token(rest)) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
        const auto idx_tok = tok.substr(0, colon);
        const auto val_tok = tok.substr(colon + 1);
        std::uint64_t idx = 0;
        auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
        if (ec != std::errc{} || ptr != idx_tok.data() + idx_tok.size() || idx_tok.empty())
            throw ParseError(line_no, "bad feature index '" + std::string(idx_tok) + "'");
        if (idx == 0 || idx > std::numeric_limits<std::uint32_t>::max())
            throw ParseError(line_no, "feature index out of range: " + std::string(idx_tok));
        double val = 0.0;
        if (!parse_real(val_tok, val))
            throw ParseError(line_no, "bad feature value '" + std::string(val_tok) + "'");
        entries.push_back({static_cast<std::uint32_t>(idx - 1), val});
    }
    try {
        return SparseVector::from_entries(std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
    }
}

SparseDataset parse_dataset(std::istream& in) {
    std::vector<SparseVector> examples;
    std::vector<double> raw_labels;
    std::set<double> distinct;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;

        auto label_tok = next_token(view);
        double label = 0.0;
        if (!parse_real(label_tok, label))
            throw ParseError(line_no, "bad label '" + std::string(label_tok) + "'");
        distinct.insert(label);
        if (distinct.size() > 2)
            throw FormatError("more than two distinct labels (line " + std::to_string(line_no) + ")");
        raw_labels.push_back(label);
        examples.push_back(parse_sparse_tokens(view, line_no));
    }
    if (examples.empty()) throw FormatError("no examples in input");

    std::vector<double> labels;
    labels.reserve(raw_labels.size());
    const double hi = *distinct.rbegin();
    for (double raw : raw_labels) {
        if (distinct.size() == 2)
            labels.push_back(raw == hi ? 1.0 : -1.0);
        else
            labels.push_back(raw > 0.0 ? 1.0 : -1.0);
    }
    return SparseDataset(std::move(examples), std::move(labels));
}

SparseDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_dataset(in);
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_sparse(const SparseVector& v) {
    std::string out;
    for (const auto& f : v.entries()) {
        if (!out.empty()) out += ' ';
        out += std::to_string(std::uint64_t{f.index} + 1);
        out += ':';
        out += format_double(f.value);
    }
    return out;
}

void serialize_dataset(const SparseDataset& ds, std::ostream& out) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << (ds.y(i) > 0 ? "+1" : "-1");
        if (!ds.x(i).empty()) out << ' ' << format_sparse(ds.x(i));
        out << '\n';
    }
}

void save_dataset(const SparseDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    serialize_dataset(ds, out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace budgetsvm
