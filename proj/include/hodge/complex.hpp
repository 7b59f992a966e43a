#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hodge/types.hpp"

namespace hodge {

/// Simplicial complex with a monotone filtration value on every simplex.
///
/// Simplices of each dimension are stored lexicographically sorted by their ascending vertex
/// tuple; the position in that list is the simplex's index. Construction validates strict
/// vertex ordering, duplicates, closure under faces and monotonicity of values; a constructed
/// object is immutable.
class FilteredComplex {
public:
    /// Validate and build. When no 0-simplex is listed at all, vertices are implied by the
    /// higher simplices (value 0). As soon as one vertex is listed explicitly, every vertex face
    /// must be listed. `points` (one row per vertex id) is optional geometry for rendering.
    static FilteredComplex from_simplices(std::vector<Simplex> simplices, std::vector<double> values,
                                          std::optional<MatrixXd> points = std::nullopt);

    int max_dim() const { return static_cast<int>(simplices_.size()) - 1; }
    Index size(int k) const;
    Index total_size() const;

    const std::vector<Simplex>& simplices(int k) const;
    const std::vector<double>& values(int k) const;
    const Simplex& simplex(int k, Index i) const { return simplices(k)[static_cast<std::size_t>(i)]; }
    double value(int k, Index i) const { return values(k)[static_cast<std::size_t>(i)]; }

    /// Index of `s` among the simplices of dimension |s|-1, if present.
    std::optional<Index> find(const Simplex& s) const;

    const std::optional<MatrixXd>& points() const { return points_; }

    /// Ascending, deduplicated filtration values over all simplices.
    std::vector<double> distinct_values() const;
    double max_value() const;

private:
    FilteredComplex() = default;

    std::vector<std::vector<Simplex>> simplices_;
    std::vector<std::vector<double>> values_;
    std::optional<MatrixXd> points_;
};

/// Sublevel set {σ : f(σ) ≤ t} of a filtered complex, as index lists into the parent.
class ComplexSlice {
public:
    ComplexSlice(std::shared_ptr<const FilteredComplex> parent, double threshold);

    const FilteredComplex& parent() const { return *parent_; }
    const std::shared_ptr<const FilteredComplex>& parent_ptr() const { return parent_; }
    double threshold() const { return threshold_; }
    int max_dim() const { return parent_->max_dim(); }

    /// Number of k-simplices in the slice; 0 for k outside [0, max_dim].
    Index size(int k) const;
    const Simplex& simplex(int k, Index i) const;
    double value(int k, Index i) const;

    /// Parent indices of the slice's k-simplices, ascending.
    std::span<const Index> parent_indices(int k) const;
    /// Slice index of parent simplex `parent_index`, or -1 when it lies above the threshold.
    Index slice_index(int k, Index parent_index) const;
    /// Slice index of a simplex given by its vertices, or -1.
    Index find(const Simplex& s) const;

private:
    std::shared_ptr<const FilteredComplex> parent_;
    double threshold_;
    std::vector<std::vector<Index>> members_;
    std::vector<std::vector<Index>> positions_;
};

ComplexSlice sublevel(std::shared_ptr<const FilteredComplex> complex, double t);

/// Sparse ±1 matrix stored as column-sorted triplets.
struct SignEntry {
    Index row;
    Index col;
    std::int8_t sign;

    friend bool operator==(const SignEntry&, const SignEntry&) = default;
};

class SparseSignMatrix {
public:
    SparseSignMatrix(Index rows, Index cols, std::vector<SignEntry> entries);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    std::span<const SignEntry> entries() const { return entries_; }

    template <typename Scalar = double>
    Eigen::SparseMatrix<Scalar> to_sparse() const
    {
        std::vector<Eigen::Triplet<Scalar>> triplets;
        triplets.reserve(entries_.size());
        for (const auto& e : entries_) {
            triplets.emplace_back(e.row, e.col, static_cast<Scalar>(e.sign));
        }
        Eigen::SparseMatrix<Scalar> m(rows_, cols_);
        m.setFromTriplets(triplets.begin(), triplets.end());
        return m;
    }

    template <typename Scalar = double>
    Matrix<Scalar> to_dense() const
    {
        Matrix<Scalar> m = Matrix<Scalar>::Zero(rows_, cols_);
        for (const auto& e : entries_) {
            m(e.row, e.col) = static_cast<Scalar>(e.sign);
        }
        return m;
    }

    /// Multiply rows and columns by ±1 signs (orientation changes); empty spans mean no change.
    SparseSignMatrix reoriented(std::span<const std::int8_t> row_signs,
                                std::span<const std::int8_t> col_signs) const;

    /// `row,col,sign` lines, one per entry, column-sorted.
    void write_csv(const std::filesystem::path& path) const;

    friend bool operator==(const SparseSignMatrix&, const SparseSignMatrix&) = default;

private:
    Index rows_;
    Index cols_;
    std::vector<SignEntry> entries_;
};

/// B_k: rows are the (k-1)-simplices of the slice, columns its k-simplices. For σ = [v0<…<vk]
/// the entry at face σ∖{vi} is (-1)^i. B_0 is the 0 × |S_0| matrix, and B_{K+1} the
/// |S_K| × 0 matrix. Valid k: 0 ≤ k ≤ max_dim + 1.
SparseSignMatrix boundary_matrix(const ComplexSlice& slice, int k);

/// Injective map from the k-simplex indices of a smaller slice into those of a larger slice of
/// the same complex. Both slices orient simplices by ascending vertex id, so the induced map on
/// signals is pure zero-padding.
class InclusionMap {
public:
    InclusionMap(Index target_size, std::vector<Index> targets);

    Index source_size() const { return static_cast<Index>(targets_.size()); }
    Index target_size() const { return target_size_; }
    Index operator[](Index i) const { return targets_[static_cast<std::size_t>(i)]; }
    std::span<const Index> targets() const { return targets_; }

    template <typename Derived>
    Vector<typename Derived::Scalar> apply(const Eigen::MatrixBase<Derived>& signal) const
    {
        Vector<typename Derived::Scalar> out = Vector<typename Derived::Scalar>::Zero(target_size_);
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            out(targets_[i]) = signal(static_cast<Index>(i));
        }
        return out;
    }

    /// Row-wise embedding of a matrix whose columns are signals.
    template <typename Derived>
    Matrix<typename Derived::Scalar> apply_columns(const Eigen::MatrixBase<Derived>& signals) const
    {
        Matrix<typename Derived::Scalar> out =
            Matrix<typename Derived::Scalar>::Zero(target_size_, signals.cols());
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            out.row(targets_[i]) = signals.row(static_cast<Index>(i));
        }
        return out;
    }

    friend bool operator==(const InclusionMap&, const InclusionMap&) = default;

private:
    Index target_size_;
    std::vector<Index> targets_;
};

InclusionMap inclusion_map(const ComplexSlice& small, const ComplexSlice& large, int k);

/// `second ∘ first`.
InclusionMap compose(const InclusionMap& first, const InclusionMap& second);

/// Complex JSON: {"simplices": [[...], ...], "values": [...], "points": [[x,y], ...]?}.
FilteredComplex import_complex(const std::filesystem::path& path);
FilteredComplex parse_complex_json(const std::string& text);
std::string complex_to_json(const FilteredComplex& complex);

}  // namespace hodge
