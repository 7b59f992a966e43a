#include "hodge/complex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hodge/errors.hpp"

namespace hodge {

namespace {

std::string format_simplex(const Simplex& s)
{
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << (i ? "," : "") << s[i];
    }
    out << ']';
    return out.str();
}

Simplex drop_vertex(const Simplex& s, std::size_t i)
{
    Simplex face;
    face.reserve(s.size() - 1);
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (j != i) face.push_back(s[j]);
    }
    return face;
}

}  // namespace

FilteredComplex FilteredComplex::from_simplices(std::vector<Simplex> simplices, std::vector<double> values,
                                                std::optional<MatrixXd> points)
{
    if (simplices.size() != values.size()) {
        throw InputError("complex: " + std::to_string(simplices.size()) + " simplices but " +
                         std::to_string(values.size()) + " values");
    }

    std::map<Simplex, double> table;
    bool explicit_vertices = false;
    std::size_t top = 0;
    for (std::size_t i = 0; i < simplices.size(); ++i) {
        const Simplex& s = simplices[i];
        if (s.empty()) throw InputError("complex: empty simplex at position " + std::to_string(i));
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] < 0) throw InputError("complex: negative vertex id in " + format_simplex(s));
            if (j > 0 && s[j] <= s[j - 1]) {
                throw InputError("complex: vertex ids not strictly ascending in " + format_simplex(s));
            }
        }
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw InputError("complex: invalid filtration value for " + format_simplex(s));
        }
        if (!table.emplace(s, values[i]).second) {
            throw InputError("complex: duplicate simplex " + format_simplex(s));
        }
        explicit_vertices = explicit_vertices || s.size() == 1;
        top = std::max(top, s.size());
    }

    if (!explicit_vertices) {
        for (const auto& s : simplices) {
            for (VertexId v : s) table.emplace(Simplex{v}, 0.0);
        }
    }
    if (points) {
        for (const auto& [s, value] : table) {
            if (s.back() >= points->rows()) {
                throw InputError("complex: vertex id " + std::to_string(s.back()) + " has no coordinates");
            }
        }
        if (!explicit_vertices) {
            for (Index v = 0; v < points->rows(); ++v) table.emplace(Simplex{static_cast<VertexId>(v)}, 0.0);
        }
    }

    for (const auto& [s, value] : table) {
        if (s.size() < 2) continue;
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex face = drop_vertex(s, i);
            auto it = table.find(face);
            if (it == table.end()) {
                throw InputError("complex: closure violated, face " + format_simplex(face) + " of " +
                                 format_simplex(s) + " is missing");
            }
            if (it->second > value) {
                std::ostringstream msg;
                msg << "complex: monotonicity violated, f(" << format_simplex(face) << ") = " << it->second
                    << " > f(" << format_simplex(s) << ") = " << value;
                throw InputError(msg.str());
            }
        }
    }

    FilteredComplex fc;
    std::size_t dims = std::max<std::size_t>(top, 1);
    fc.simplices_.resize(dims);
    fc.values_.resize(dims);
    // std::map iterates in lexicographic order; lists per dimension stay sorted.
    for (const auto& [s, value] : table) {
        fc.simplices_[s.size() - 1].push_back(s);
        fc.values_[s.size() - 1].push_back(value);
    }
    fc.points_ = std::move(points);
    return fc;
}

Index FilteredComplex::size(int k) const
{
    if (k < 0 || k > max_dim()) return 0;
    return static_cast<Index>(simplices_[static_cast<std::size_t>(k)].size());
}

Index FilteredComplex::total_size() const
{
    Index n = 0;
    for (int k = 0; k <= max_dim(); ++k) n += size(k);
    return n;
}

const std::vector<Simplex>& FilteredComplex::simplices(int k) const
{
    if (k < 0 || k > max_dim()) throw InputError("complex: dimension " + std::to_string(k) + " out of range");
    return simplices_[static_cast<std::size_t>(k)];
}

const std::vector<double>& FilteredComplex::values(int k) const
{
    if (k < 0 || k > max_dim()) throw InputError("complex: dimension " + std::to_string(k) + " out of range");
    return values_[static_cast<std::size_t>(k)];
}

std::optional<Index> FilteredComplex::find(const Simplex& s) const
{
    int k = static_cast<int>(s.size()) - 1;
    if (k < 0 || k > max_dim()) return std::nullopt;
    const auto& list = simplices_[static_cast<std::size_t>(k)];
    auto it = std::lower_bound(list.begin(), list.end(), s);
    if (it == list.end() || *it != s) return std::nullopt;
    return static_cast<Index>(it - list.begin());
}

std::vector<double> FilteredComplex::distinct_values() const
{
    std::vector<double> all;
    for (const auto& v : values_) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

double FilteredComplex::max_value() const
{
    double m = 0.0;
    for (const auto& v : values_) {
        for (double x : v) m = std::max(m, x);
    }
    return m;
}

ComplexSlice::ComplexSlice(std::shared_ptr<const FilteredComplex> parent, double threshold)
    : parent_(std::move(parent)), threshold_(threshold)
{
    if (!parent_) throw InputError("slice: null complex");
    if (!(threshold >= 0.0)) throw InputError("slice: threshold must be nonnegative");
    const int dims = parent_->max_dim() + 1;
    members_.resize(static_cast<std::size_t>(dims));
    positions_.resize(static_cast<std::size_t>(dims));
    for (int k = 0; k < dims; ++k) {
        const auto& values = parent_->values(k);
        auto& members = members_[static_cast<std::size_t>(k)];
        auto& positions = positions_[static_cast<std::size_t>(k)];
        positions.assign(values.size(), -1);
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] <= threshold) {
                positions[i] = static_cast<Index>(members.size());
                members.push_back(static_cast<Index>(i));
            }
        }
    }
}

Index ComplexSlice::size(int k) const
{
    if (k < 0 || k > max_dim()) return 0;
    return static_cast<Index>(members_[static_cast<std::size_t>(k)].size());
}

const Simplex& ComplexSlice::simplex(int k, Index i) const
{
    return parent_->simplex(k, members_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
}

double ComplexSlice::value(int k, Index i) const
{
    return parent_->value(k, members_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
}

std::span<const Index> ComplexSlice::parent_indices(int k) const
{
    if (k < 0 || k > max_dim()) return {};
    return members_[static_cast<std::size_t>(k)];
}

Index ComplexSlice::slice_index(int k, Index parent_index) const
{
    if (k < 0 || k > max_dim()) return -1;
    return positions_[static_cast<std::size_t>(k)][static_cast<std::size_t>(parent_index)];
}

Index ComplexSlice::find(const Simplex& s) const
{
    auto idx = parent_->find(s);
    if (!idx) return -1;
    return slice_index(static_cast<int>(s.size()) - 1, *idx);
}

ComplexSlice sublevel(std::shared_ptr<const FilteredComplex> complex, double t)
{
    return ComplexSlice(std::move(complex), t);
}

SparseSignMatrix::SparseSignMatrix(Index rows, Index cols, std::vector<SignEntry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries))
{
    std::sort(entries_.begin(), entries_.end(), [](const SignEntry& a, const SignEntry& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_ || (e.sign != 1 && e.sign != -1)) {
            throw InputError("sign matrix: invalid entry");
        }
        if (i > 0 && entries_[i - 1].row == e.row && entries_[i - 1].col == e.col) {
            throw InputError("sign matrix: duplicate entry");
        }
    }
}

SparseSignMatrix SparseSignMatrix::reoriented(std::span<const std::int8_t> row_signs,
                                              std::span<const std::int8_t> col_signs) const
{
    std::vector<SignEntry> out(entries_.begin(), entries_.end());
    for (auto& e : out) {
        int s = e.sign;
        if (!row_signs.empty()) s *= row_signs[static_cast<std::size_t>(e.row)];
        if (!col_signs.empty()) s *= col_signs[static_cast<std::size_t>(e.col)];
        e.sign = static_cast<std::int8_t>(s);
    }
    return SparseSignMatrix(rows_, cols_, std::move(out));
}

void SparseSignMatrix::write_csv(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    for (const auto& e : entries_) {
        out << e.row << ',' << e.col << ',' << static_cast<int>(e.sign) << '\n';
    }
    if (!out) throw InputError("write failed: " + path.string());
}

SparseSignMatrix boundary_matrix(const ComplexSlice& slice, int k)
{
    if (k < 0 || k > slice.max_dim() + 1) {
        throw InputError("boundary matrix: dimension " + std::to_string(k) + " out of range [0, " +
                         std::to_string(slice.max_dim() + 1) + "]");
    }
    if (k == 0) return SparseSignMatrix(0, slice.size(0), {});
    if (k == slice.max_dim() + 1) return SparseSignMatrix(slice.size(k - 1), 0, {});

    const FilteredComplex& parent = slice.parent();
    std::vector<SignEntry> entries;
    entries.reserve(static_cast<std::size_t>(slice.size(k) * (k + 1)));
    for (Index col = 0; col < slice.size(k); ++col) {
        const Simplex& s = slice.simplex(k, col);
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex face = drop_vertex(s, i);
            auto parent_face = parent.find(face);
            Index row = parent_face ? slice.slice_index(k - 1, *parent_face) : -1;
            if (row < 0) throw InputError("boundary matrix: slice not closed at " + format_simplex(s));
            entries.push_back({row, col, static_cast<std::int8_t>(i % 2 == 0 ? 1 : -1)});
        }
    }
    return SparseSignMatrix(slice.size(k - 1), slice.size(k), std::move(entries));
}

InclusionMap::InclusionMap(Index target_size, std::vector<Index> targets)
    : target_size_(target_size), targets_(std::move(targets))
{
    std::vector<bool> hit(static_cast<std::size_t>(target_size_), false);
    for (Index t : targets_) {
        if (t < 0 || t >= target_size_ || hit[static_cast<std::size_t>(t)]) {
            throw InputError("inclusion map: not injective or out of range");
        }
        hit[static_cast<std::size_t>(t)] = true;
    }
}

InclusionMap inclusion_map(const ComplexSlice& small, const ComplexSlice& large, int k)
{
    if (small.parent_ptr() != large.parent_ptr()) {
        throw InputError("inclusion map: slices come from different complexes");
    }
    if (small.threshold() > large.threshold()) {
        throw InputError("inclusion map: source threshold exceeds target threshold");
    }
    std::vector<Index> targets;
    targets.reserve(static_cast<std::size_t>(small.size(k)));
    for (Index parent_index : small.parent_indices(k)) {
        targets.push_back(large.slice_index(k, parent_index));
    }
    return InclusionMap(large.size(k), std::move(targets));
}

InclusionMap compose(const InclusionMap& first, const InclusionMap& second)
{
    if (first.target_size() != second.source_size()) {
        throw InputError("inclusion map: incompatible composition");
    }
    std::vector<Index> targets;
    targets.reserve(static_cast<std::size_t>(first.source_size()));
    for (Index t : first.targets()) targets.push_back(second[t]);
    return InclusionMap(second.target_size(), std::move(targets));
}

}  // namespace hodge
