#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace budgetsvm {

/// One stored coordinate of a sparse vector. `index` is 0-based.
struct Feature {
    std::uint32_t index;
    double value;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/**
 * Sparse real vector with strictly increasing indices and no stored zeros.
 *
 * The squared Euclidean norm is cached at construction since every Gaussian
 * kernel evaluation needs it.
 */
class SparseVector {
public:
    SparseVector() = default;

    /// Takes entries in any order; sorts them, drops zeros, rejects duplicate indices.
    static SparseVector from_entries(std::vector<Feature> entries);

    /// Dense view -> sparse (zeros skipped).
    static SparseVector from_dense(std::span<const double> values);

    std::span<const Feature> entries() const noexcept { return entries_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double norm_sq() const noexcept { return norm_sq_; }

    /// One past the largest stored index (0 for the zero vector).
    std::size_t dimension() const noexcept {
        return entries_.empty() ? 0 : std::size_t{entries_.back().index} + 1;
    }

    std::vector<double> to_dense(std::size_t dim) const;

    friend bool operator==(const SparseVector& a, const SparseVector& b) {
        return a.entries_ == b.entries_;
    }

private:
    explicit SparseVector(std::vector<Feature> sorted);

    std::vector<Feature> entries_;
    double norm_sq_ = 0.0;
};

/// Sum over shared indices; two-cursor merge.
double sparse_dot(const SparseVector& a, const SparseVector& b) noexcept;

/// ||a||^2 + ||b||^2 - 2<a,b>, clamped at 0.
double squared_distance(const SparseVector& a, const SparseVector& b) noexcept;

/// ca * a + cb * b, exact zeros removed.
SparseVector linear_combination(double ca, const SparseVector& a, double cb, const SparseVector& b);

/**
 * Labeled examples with labels in {-1, +1}. Immutable once built; safe to
 * share between threads for reading.
 */
class SparseDataset {
public:
    SparseDataset() = default;

    /// Validates equal lengths, n >= 1 and labels in {-1, +1}.
    SparseDataset(std::vector<SparseVector> examples, std::vector<double> labels);

    std::size_t size() const noexcept { return examples_.size(); }
    /// Largest 1-based feature index seen.
    std::size_t dimension() const noexcept { return dimension_; }

    const SparseVector& x(std::size_t i) const { return examples_[i]; }
    double y(std::size_t i) const { return labels_[i]; }

    std::span<const SparseVector> examples() const noexcept { return examples_; }
    std::span<const double> labels() const noexcept { return labels_; }

    friend bool operator==(const SparseDataset&, const SparseDataset&) = default;

private:
    std::vector<SparseVector> examples_;
    std::vector<double> labels_;
    std::size_t dimension_ = 0;
};

/**
 * Reads the `<label> <idx>:<val> ...` text format.
 *
 * Blank lines and lines starting with '#' are skipped, CRLF is accepted.
 * Two distinct raw labels map larger -> +1, smaller -> -1. A file holding a
 * single raw label maps it by sign (positive -> +1). Out-of-order indices are
 * re-sorted; duplicate indices are a ParseError. No feature scaling is done.
 */
SparseDataset parse_dataset(std::istream& in);
SparseDataset load_dataset(const std::filesystem::path& path);

/// Writes labels as "+1"/"-1" and values in shortest round-trip form.
void serialize_dataset(const SparseDataset& ds, std::ostream& out);
void save_dataset(const SparseDataset& ds, const std::filesystem::path& path);

/// `idx:val idx:val ...` with 1-based indices, shortest round-trip values.
std::string format_sparse(const SparseVector& v);
std::string format_double(double value);

/// Parses the `idx:val` tokens of a line tail; `line_no` is used for errors.
SparseVector parse_sparse_tokens(std::string_view text, std::size_t line_no);

}  // namespace budgetsvm
