#pragma once

// Fixtures and independent oracles shared by the test suites. Nothing here calls into the
// library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "hodge/complex.hpp"
#include "hodge/geometry.hpp"
#include "hodge/random.hpp"

namespace hodge::test {

inline std::shared_ptr<const FilteredComplex> make_complex(std::vector<Simplex> simplices,
                                                           std::vector<double> values = {})
{
    if (values.empty()) {
        for (const auto& s : simplices) values.push_back(static_cast<double>(s.size() - 1));
    }
    return std::make_shared<const FilteredComplex>(
        FilteredComplex::from_simplices(std::move(simplices), std::move(values)));
}

inline std::shared_ptr<const FilteredComplex> hollow_triangle()
{
    return make_complex({{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}});
}

inline std::shared_ptr<const FilteredComplex> filled_triangle()
{
    return make_complex({{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}});
}

inline std::shared_ptr<const FilteredComplex> path_graph(int n)
{
    std::vector<Simplex> s;
    for (int i = 0; i < n; ++i) s.push_back({i});
    for (int i = 0; i + 1 < n; ++i) s.push_back({i, i + 1});
    return make_complex(std::move(s));
}

inline std::shared_ptr<const FilteredComplex> cycle_graph(int n)
{
    std::vector<Simplex> s;
    for (int i = 0; i < n; ++i) s.push_back({i});
    for (int i = 0; i + 1 < n; ++i) s.push_back({i, i + 1});
    s.push_back({0, n - 1});
    return make_complex(std::move(s));
}

inline PointCloud random_cloud(Index n, std::uint64_t seed, double scale = 1.0)
{
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.resize(n, 2);
    for (Index i = 0; i < n; ++i) {
        cloud.points(i, 0) = rng.uniform(0.0, scale);
        cloud.points(i, 1) = rng.uniform(0.0, scale);
    }
    return cloud;
}

inline std::shared_ptr<const FilteredComplex> alpha_complex(const PointCloud& cloud)
{
    return std::make_shared<const FilteredComplex>(filtration_values(delaunay_2d(cloud), cloud));
}

/// Rank over Q by exact rational Gaussian elimination on a dense copy.
inline Index rational_rank(const SparseSignMatrix& m)
{
    using boost::multiprecision::cpp_rational;
    const Index rows = m.rows(), cols = m.cols();
    std::vector<std::vector<cpp_rational>> a(static_cast<std::size_t>(rows),
                                             std::vector<cpp_rational>(static_cast<std::size_t>(cols)));
    for (const auto& e : m.entries()) a[static_cast<std::size_t>(e.row)][static_cast<std::size_t>(e.col)] = e.sign;
    Index rank = 0;
    for (Index c = 0; c < cols && rank < rows; ++c) {
        Index pivot = -1;
        for (Index r = rank; r < rows; ++r) {
            if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(a[static_cast<std::size_t>(pivot)], a[static_cast<std::size_t>(rank)]);
        const auto& prow = a[static_cast<std::size_t>(rank)];
        for (Index r = rank + 1; r < rows; ++r) {
            auto& row = a[static_cast<std::size_t>(r)];
            if (row[static_cast<std::size_t>(c)] == 0) continue;
            const cpp_rational f = row[static_cast<std::size_t>(c)] / prow[static_cast<std::size_t>(c)];
            for (Index j = c; j < cols; ++j) row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
        }
        ++rank;
    }
    return rank;
}

/// Circumcentre and radius from the perpendicular-bisector formula.
inline std::pair<Eigen::Vector2d, double> circumcircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                                       const Eigen::Vector2d& c)
{
    const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
    const double ux = (a.squaredNorm() * (b.y() - c.y()) + b.squaredNorm() * (c.y() - a.y()) +
                       c.squaredNorm() * (a.y() - b.y())) / d;
    const double uy = (a.squaredNorm() * (c.x() - b.x()) + b.squaredNorm() * (a.x() - c.x()) +
                       c.squaredNorm() * (b.x() - a.x())) / d;
    const Eigen::Vector2d centre(ux, uy);
    return {centre, (a - centre).norm()};
}

/// Number of (triangle, point) pairs with the point strictly inside the circumcircle.
inline Index incircle_violations(const Triangulation& tri, const PointCloud& cloud, double rel_tol = 1e-9)
{
    Index violations = 0;
    for (const auto& t : tri.triangles) {
        const Eigen::Vector2d a = cloud.points.row(t[0]).transpose();
        const Eigen::Vector2d b = cloud.points.row(t[1]).transpose();
        const Eigen::Vector2d c = cloud.points.row(t[2]).transpose();
        const auto [centre, radius] = circumcircle(a, b, c);
        for (Index p = 0; p < cloud.size(); ++p) {
            if (p == t[0] || p == t[1] || p == t[2]) continue;
            const double dist = (cloud.points.row(p).transpose() - centre).norm();
            if (dist < radius * (1.0 - rel_tol)) ++violations;
        }
    }
    return violations;
}

/// Every face of every slice simplex lies in the slice.
inline bool slice_closed(const ComplexSlice& slice)
{
    for (int k = 1; k <= slice.max_dim(); ++k) {
        for (Index i = 0; i < slice.size(k); ++i) {
            const Simplex& s = slice.simplex(k, i);
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex face;
                for (std::size_t j = 0; j < s.size(); ++j) {
                    if (j != drop) face.push_back(s[j]);
                }
                if (slice.find(face) < 0) return false;
            }
        }
    }
    return true;
}

/// Minimal XML well-formedness: balanced, properly nested tags under a single root, quoted
/// attributes. Enough for the SVG emitters, which write no comments or CDATA.
inline bool xml_well_formed(const std::string& text, std::string* root = nullptr)
{
    std::vector<std::string> stack;
    int roots = 0;
    std::size_t i = 0;
    while ((i = text.find('<', i)) != std::string::npos) {
        if (text.compare(i, 2, "<?") == 0) {
            i = text.find("?>", i);
            if (i == std::string::npos) return false;
            continue;
        }
        std::size_t j = i + 1;
        char quote = 0;
        while (j < text.size() && (quote || text[j] != '>')) {
            if (quote && text[j] == quote) quote = 0;
            else if (!quote && (text[j] == '"' || text[j] == '\'')) quote = text[j];
            else if (!quote && text[j] == '<') return false;
            ++j;
        }
        if (j >= text.size()) return false;
        std::string tag = text.substr(i + 1, j - i - 1);
        i = j + 1;
        if (tag.empty()) return false;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        const bool self_closing = tag.back() == '/';
        const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
        if (stack.empty()) {
            ++roots;
            if (root) *root = name;
        }
        if (!self_closing) stack.push_back(name);
    }
    return stack.empty() && roots == 1;
}

/// Number of non-overlapping occurrences of `needle`.
inline Index count_of(const std::string& text, const std::string& needle)
{
    Index n = 0;
    for (std::size_t i = text.find(needle); i != std::string::npos; i = text.find(needle, i + needle.size())) ++n;
    return n;
}

/// A fresh temporary directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("hodge_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace hodge::test
