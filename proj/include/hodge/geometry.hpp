#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hodge/complex.hpp"
#include "hodge/errors.hpp"
#include "hodge/types.hpp"

namespace hodge {

/// Points in R^2 or R^3, one per row; the row index is the point id.
struct PointCloud {
    MatrixXd points;

    Index size() const { return points.rows(); }
    int dim() const { return static_cast<int>(points.cols()); }
};

/// Headerless CSV, one `x,y` or `x,y,z` row per point. Rejects malformed rows (with line
/// number), mixed dimensions and duplicate points.
PointCloud load_point_cloud(const std::filesystem::path& path);
PointCloud parse_point_cloud_csv(const std::string& text);
std::string point_cloud_to_csv(const PointCloud& cloud);

/// Throws InputError when two points coincide.
void check_distinct(const PointCloud& cloud);

struct Triangulation {
    Index num_vertices = 0;
    std::vector<Simplex> edges;
    std::vector<Simplex> triangles;
};

/// Delaunay triangulation of the convex hull of a planar point set. Incremental insertion with a
/// walking point location; cocircular configurations resolve to the lexicographically smallest
/// diagonal. Throws DegeneracyError when all points are collinear.
Triangulation delaunay_2d(const PointCloud& cloud);

/// Relative width of the in-circle / orientation tie band.
inline constexpr double kPredicateBand = 1e-12;

/// Orientation of (a, b, c): positive when counter-clockwise.
double orient_2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

/// Positive when `d` lies strictly inside the circumcircle of the counter-clockwise triangle (a, b, c).
double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                 const Eigen::Vector2d& d);

/// Radius of the sphere through all rows of `vertices` inside their affine hull.
/// Throws DegeneracyError when the rows are affinely dependent.
template <typename Derived>
typename Derived::Scalar circumradius(const Eigen::MatrixBase<Derived>& vertices)
{
    using Scalar = typename Derived::Scalar;
    const Index n = vertices.rows();
    if (n < 1) throw DegeneracyError("circumradius: no vertices");
    if (n == 1) return Scalar(0);
    if (n - 1 > vertices.cols()) throw DegeneracyError("circumradius: too many vertices for the ambient dimension");

    // Centre = p0 + E^T λ with E the edge vectors from p0; solving 2 E E^T λ = |E_i|^2.
    Matrix<Scalar> edges = vertices.bottomRows(n - 1).rowwise() - vertices.row(0);
    Matrix<Scalar> gram = Scalar(2) * edges * edges.transpose();
    Vector<Scalar> rhs = edges.rowwise().squaredNorm();

    Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(gram);
    qr.setThreshold(Scalar(1e-12));
    if (qr.rank() < n - 1) throw DegeneracyError("circumradius: affinely dependent vertices");
    Vector<Scalar> lambda = qr.solve(rhs);
    return (edges.transpose() * lambda).norm();
}

/// Circumradius filtration on a triangulation: f(σ) = circumradius(σ) raised to the maximum of
/// its faces' values, vertices at 0. The cloud's coordinates are carried along.
FilteredComplex filtration_values(const Triangulation& tri, const PointCloud& cloud);

}  // namespace hodge
