#include "hodge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "hodge/errors.hpp"

namespace hodge {

std::string_view to_string(EigenType type)
{
    switch (type) {
    case EigenType::Harmonic: return "harmonic";
    case EigenType::Gradient: return "gradient";
    case EigenType::Curl: return "curl";
    }
    return "unknown";
}

EigenType parse_eigen_type(std::string_view name)
{
    if (name == "harmonic") return EigenType::Harmonic;
    if (name == "gradient") return EigenType::Gradient;
    if (name == "curl") return EigenType::Curl;
    throw InputError("unknown eigenvector type '" + std::string(name) + "'");
}

Tolerances Tolerances::for_scale(double lambda_max)
{
    const double scale = std::max(1.0, lambda_max);
    return {1e-9 * scale, 1e-7 * scale};
}

std::array<Index, 3> TypedSpectrum::counts() const
{
    std::array<Index, 3> c{0, 0, 0};
    for (const auto& p : pairs) ++c[static_cast<std::size_t>(p.type)];
    return c;
}

MatrixXd TypedSpectrum::vectors() const
{
    MatrixXd out(dimension, size());
    for (Index i = 0; i < size(); ++i) out.col(i) = pairs[static_cast<std::size_t>(i)].vector;
    return out;
}

HodgeOperators hodge_operators(const ComplexSlice& slice, int k, const OrientationFlips& flips)
{
    if (k < 0 || k > slice.max_dim()) {
        throw InputError("hodge operators: degree " + std::to_string(k) + " out of range [0, " +
                         std::to_string(slice.max_dim()) + "]");
    }
    HodgeOperators ops;
    ops.degree = k;
    ops.threshold = slice.threshold();
    ops.boundary = boundary_matrix(slice, k).reoriented(flips.at(k - 1), flips.at(k)).to_sparse<double>();
    ops.coboundary = boundary_matrix(slice, k + 1).reoriented(flips.at(k), flips.at(k + 1)).to_sparse<double>();
    ops.down = SparseMatrixXd(ops.boundary.transpose() * ops.boundary);
    ops.up = SparseMatrixXd(ops.coboundary * ops.coboundary.transpose());
    ops.laplacian = ops.down + ops.up;
    ops.down.makeCompressed();
    ops.up.makeCompressed();
    ops.laplacian.makeCompressed();
    return ops;
}

namespace {

struct Residuals {
    double up;
    double down;
};

Residuals residuals_of(const VectorXd& v, const HodgeOperators& ops)
{
    double up = ops.coboundary.cols() > 0 ? (ops.coboundary.transpose() * v).norm() : 0.0;
    double down = ops.boundary.rows() > 0 ? (ops.boundary * v).norm() : 0.0;
    return {up, down};
}

bool is_mixed(const TypedEigenpair& p, const Tolerances& tol)
{
    return p.lambda > tol.zero && p.residual_up > tol.residual && p.residual_down > tol.residual;
}

// Rayleigh–Ritz inside span(basis); returns (values, vectors) ascending.
std::pair<VectorXd, MatrixXd> ritz_pairs(const MatrixXd& basis, const SparseMatrixXd& l)
{
    const MatrixXd h = basis.transpose() * (l * basis);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (h + h.transpose()));
    return {es.eigenvalues(), basis * es.eigenvectors()};
}

// Split a (near-)degenerate eigenspace into its curl-free and gradient-free parts. The right
// singular vectors of B_{k+1}^T V with vanishing singular value span the gradient directions;
// the others lie in the curl space.
void rotate_cluster(TypedSpectrum& spectrum, std::size_t first, std::size_t last, const HodgeOperators& ops)
{
    const Index n = spectrum.dimension;
    const Index c = static_cast<Index>(last - first);
    MatrixXd basis(n, c);
    double smallest = spectrum.pairs[first].lambda;
    for (Index j = 0; j < c; ++j) basis.col(j) = spectrum.pairs[first + static_cast<std::size_t>(j)].vector;

    const MatrixXd image = MatrixXd(ops.coboundary.transpose() * basis);
    Eigen::JacobiSVD<MatrixXd> svd(image, Eigen::ComputeFullV);
    const VectorXd sigma = svd.singularValues();
    const double split = 0.5 * std::sqrt(smallest);

    std::vector<Index> curl_cols, grad_cols;
    for (Index j = 0; j < c; ++j) {
        const double s = j < sigma.size() ? sigma(j) : 0.0;
        (s > split ? curl_cols : grad_cols).push_back(j);
    }

    std::vector<TypedEigenpair> rotated;
    for (const auto* cols : {&grad_cols, &curl_cols}) {
        if (cols->empty()) continue;
        MatrixXd sub(n, static_cast<Index>(cols->size()));
        for (std::size_t j = 0; j < cols->size(); ++j) sub.col(static_cast<Index>(j)) = basis * svd.matrixV().col((*cols)[j]);
        auto [values, vectors] = ritz_pairs(sub, ops.laplacian);
        for (Index j = 0; j < values.size(); ++j) {
            TypedEigenpair p;
            p.lambda = std::max(0.0, values(j));
            p.vector = vectors.col(j).normalized();
            canonicalize_sign(p.vector);
            rotated.push_back(std::move(p));
        }
    }
    std::stable_sort(rotated.begin(), rotated.end(),
                     [](const TypedEigenpair& a, const TypedEigenpair& b) { return a.lambda < b.lambda; });
    for (std::size_t j = 0; j < rotated.size(); ++j) spectrum.pairs[first + j] = std::move(rotated[j]);
}

}  // namespace

EigenType classify(const TypedEigenpair& pair, const HodgeOperators& ops, const Tolerances& tol)
{
    if (pair.lambda <= tol.zero) return EigenType::Harmonic;
    const auto [up, down] = residuals_of(pair.vector, ops);
    const bool up_zero = up <= tol.residual;
    const bool down_zero = down <= tol.residual;
    if (up_zero && !down_zero) return EigenType::Gradient;
    if (down_zero && !up_zero) return EigenType::Curl;
    std::ostringstream msg;
    msg << "classify: eigenpair with lambda = " << pair.lambda << " has residuals up = " << up << ", down = " << down
        << " against tolerance " << tol.residual;
    throw SolverError(msg.str());
}

void classify_spectrum(TypedSpectrum& spectrum, const HodgeOperators& ops)
{
    const Tolerances tol = Tolerances::for_scale(spectrum.lambda_max);
    spectrum.tolerances = tol;
    auto refresh = [&](TypedEigenpair& p) {
        const auto [up, down] = residuals_of(p.vector, ops);
        p.residual_up = up;
        p.residual_down = down;
    };
    for (auto& p : spectrum.pairs) refresh(p);

    // Clusters of consecutive non-harmonic eigenvalues closer than the gap tolerance; any cluster
    // holding a mixed vector is rotated as a whole.
    const double gap = 1e-6 * std::max(1.0, spectrum.lambda_max);
    std::size_t i = 0;
    while (i < spectrum.pairs.size()) {
        std::size_t j = i + 1;
        while (j < spectrum.pairs.size() && spectrum.pairs[j].lambda - spectrum.pairs[j - 1].lambda <= gap) ++j;
        bool mixed = false;
        for (std::size_t q = i; q < j; ++q) mixed = mixed || is_mixed(spectrum.pairs[q], tol);
        if (mixed) {
            std::size_t start = i;
            while (start < j && spectrum.pairs[start].lambda <= tol.zero) ++start;
            if (j - start > 1) {
                rotate_cluster(spectrum, start, j, ops);
                for (std::size_t q = start; q < j; ++q) refresh(spectrum.pairs[q]);
            }
        }
        i = j;
    }

    for (auto& p : spectrum.pairs) p.type = classify(p, ops, tol);
    spectrum.typed = true;
}

namespace {

// Orthogonal projection of v onto the column space of A: A x with A^T A x = A^T v. The normal
// matrix is singular, so factor A^T A + eps I and refine; A^T v lies in the row space, where each
// refinement step shrinks the error by eps / (sigma^2 + eps).
VectorXd range_projection(const SparseMatrixXd& a, const VectorXd& v)
{
    if (a.cols() == 0 || a.rows() == 0) return VectorXd::Zero(v.size());
    SparseMatrixXd normal = SparseMatrixXd(a.transpose() * a);
    double scale = 1.0;
    for (Index j = 0; j < normal.cols(); ++j) scale = std::max(scale, normal.coeff(j, j));
    const double eps = 1e-10 * scale;
    SparseMatrixXd shifted = normal;
    for (Index j = 0; j < shifted.cols(); ++j) shifted.coeffRef(j, j) += eps;
    Eigen::SimplicialLDLT<SparseMatrixXd> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw SolverError("hodge projection: factorization failed");
    const VectorXd rhs = a.transpose() * v;
    VectorXd x = VectorXd::Zero(normal.cols());
    for (int step = 0; step < 8; ++step) {
        const VectorXd r = rhs - normal * x;
        if (r.norm() <= 1e-15 * std::max(1.0, rhs.norm())) break;
        x += ldlt.solve(r);
    }
    return a * x;
}

}  // namespace

HodgeComponents hodge_project(const VectorXd& v, const HodgeOperators& ops)
{
    if (v.size() != ops.size()) throw InputError("hodge_project: signal length does not match the operator");
    HodgeComponents out;
    const SparseMatrixXd boundary_t = ops.boundary.transpose();
    out.gradient = range_projection(boundary_t, v);
    out.curl = range_projection(ops.coboundary, v);
    out.harmonic = v - out.gradient - out.curl;
    return out;
}

Index boundary_rank(const SparseSignMatrix& b)
{
    using u64 = std::uint64_t;
    using u128 = unsigned __int128;
    constexpr u64 p = (u64{1} << 61) - 1;
    auto mul = [](u64 x, u64 y) { return static_cast<u64>((static_cast<u128>(x) * y) % p); };
    auto pow = [&](u64 x, u64 e) {
        u64 r = 1;
        while (e) {
            if (e & 1) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    };

    // Column reduction by lowest nonzero row: each pivot row owns one reduced column.
    using Column = std::vector<std::pair<Index, u64>>;  // ascending rows, nonzero values
    std::vector<Column> pivots(static_cast<std::size_t>(b.rows()));
    std::vector<Column> columns(static_cast<std::size_t>(b.cols()));
    for (const auto& e : b.entries()) {
        columns[static_cast<std::size_t>(e.col)].emplace_back(e.row, e.sign > 0 ? u64{1} : p - 1);
    }
    Index rank = 0;
    for (auto& col : columns) {
        std::sort(col.begin(), col.end());
        while (!col.empty()) {
            const auto [low, value] = col.back();
            Column& pivot = pivots[static_cast<std::size_t>(low)];
            if (pivot.empty()) {
                pivot = std::move(col);
                ++rank;
                break;
            }
            // col -= (value / pivot_low) * pivot
            const u64 factor = mul(value, pow(pivot.back().second, p - 2));
            Column merged;
            merged.reserve(col.size() + pivot.size());
            std::size_t a = 0, c = 0;
            while (a < col.size() || c < pivot.size()) {
                if (c == pivot.size() || (a < col.size() && col[a].first < pivot[c].first)) {
                    merged.push_back(col[a++]);
                } else {
                    const u64 sub = mul(factor, pivot[c].second);
                    u64 base = 0;
                    if (a < col.size() && col[a].first == pivot[c].first) base = col[a++].second;
                    const u64 r = (base + p - sub) % p;
                    if (r != 0) merged.emplace_back(pivot[c].first, r);
                    ++c;
                }
            }
            col = std::move(merged);
        }
    }
    return rank;
}

Index betti_number(const ComplexSlice& slice, int k)
{
    return slice.size(k) - boundary_rank(boundary_matrix(slice, k)) - boundary_rank(boundary_matrix(slice, k + 1));
}

TypedSpectrum spectrum_at(const ComplexSlice& slice, int k, std::optional<Index> m, const SolverOptions& options,
                          const OrientationFlips& flips)
{
    const HodgeOperators ops = hodge_operators(slice, k, flips);
    const Index n = ops.size();
    const Index want = m ? std::min(*m, n) : n;
    if (m && *m < 0) throw InputError("spectrum: negative eigenpair count");

    // Solve with a margin so degenerate eigenspaces at the cut are classified whole.
    const Index solve_count = n <= options.dense_limit ? n : std::min(n, want + 8);
    TypedSpectrum spectrum = eigendecompose(ops, solve_count, options);
    classify_spectrum(spectrum, ops);
    spectrum.pairs.resize(static_cast<std::size_t>(want));

    const Index betti = betti_number(slice, k);
    const Index harmonic = spectrum.count(EigenType::Harmonic);
    const bool complete = want == n || (want > 0 && spectrum.pairs.back().type != EigenType::Harmonic);
    if (complete ? harmonic != betti : harmonic > betti) {
        std::ostringstream msg;
        msg << "spectrum: " << harmonic << " harmonic eigenpairs at t = " << slice.threshold() << " but the rank formula gives "
            << betti;
        throw SolverError(msg.str());
    }
    return spectrum;
}

TypedSpectrum spectrum_at(std::shared_ptr<const FilteredComplex> complex, double t, int k, std::optional<Index> m,
                          const SolverOptions& options)
{
    return spectrum_at(sublevel(std::move(complex), t), k, m, options);
}

std::string spectrum_to_json(const TypedSpectrum& spectrum, bool include_vectors)
{
    using nlohmann::json;
    json doc;
    doc["degree"] = spectrum.degree;
    doc["threshold"] = spectrum.threshold;
    doc["dimension"] = spectrum.dimension;
    doc["lambda_max"] = spectrum.lambda_max;
    doc["tolerances"] = {{"zero", spectrum.tolerances.zero}, {"residual", spectrum.tolerances.residual}};
    const auto c = spectrum.counts();
    doc["counts"] = {{"harmonic", c[0]}, {"gradient", c[1]}, {"curl", c[2]}};
    json pairs = json::array();
    for (const auto& p : spectrum.pairs) {
        json item;
        item["lambda"] = p.lambda;
        item["type"] = std::string(to_string(p.type));
        item["residual_up"] = p.residual_up;
        item["residual_down"] = p.residual_down;
        if (include_vectors) item["vector"] = std::vector<double>(p.vector.data(), p.vector.data() + p.vector.size());
        pairs.push_back(std::move(item));
    }
    doc["pairs"] = std::move(pairs);
    return doc.dump(2) + "\n";
}

}  // namespace hodge
