#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "hodge/errors.hpp"
#include "hodge/random.hpp"
#include "hodge/spectral.hpp"

namespace hodge {

namespace {

constexpr double kResidualFactor = 1e-8;

double residual_bound(double lambda_max) { return kResidualFactor * std::max(1.0, lambda_max); }

TypedSpectrum make_spectrum(const HodgeOperators& ops, const Eigen::Ref<const VectorXd>& values,
                            const Eigen::Ref<const MatrixXd>& vectors, Index m, double lambda_max)
{
    TypedSpectrum out;
    out.degree = ops.degree;
    out.threshold = ops.threshold;
    out.dimension = ops.size();
    out.lambda_max = lambda_max;
    out.tolerances = Tolerances::for_scale(lambda_max);
    out.pairs.reserve(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        TypedEigenpair pair;
        pair.lambda = std::max(0.0, values(i));
        pair.vector = vectors.col(i).normalized();
        canonicalize_sign(pair.vector);
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

void check_residuals(const HodgeOperators& ops, const TypedSpectrum& spectrum)
{
    const double bound = residual_bound(spectrum.lambda_max);
    for (std::size_t i = 0; i < spectrum.pairs.size(); ++i) {
        const auto& p = spectrum.pairs[i];
        const double r = (ops.laplacian * p.vector - p.lambda * p.vector).norm();
        if (r > bound) {
            std::ostringstream msg;
            msg << "eigensolver: pair " << i << " (lambda = " << p.lambda << ") has residual " << r
                << " above " << bound;
            throw SolverError(msg.str());
        }
    }
}

TypedSpectrum dense_solve(const HodgeOperators& ops, Index m)
{
    const MatrixXd dense = MatrixXd(ops.laplacian);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) throw SolverError("eigensolver: dense tridiagonal QR did not converge");
    const double lambda_max = solver.eigenvalues().maxCoeff();
    return make_spectrum(ops, solver.eigenvalues(), solver.eigenvectors(), m, lambda_max);
}

MatrixXd random_block(Index rows, Index cols, Rng& rng)
{
    MatrixXd x(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) x(i, j) = rng.normal();
    }
    return x;
}

// Orthonormalize the columns of `block` against `basis` and among themselves (two passes of
// Gram–Schmidt); columns that collapse are dropped.
MatrixXd orthonormalize(const MatrixXd& basis, MatrixXd block)
{
    MatrixXd out(block.rows(), block.cols());
    Index kept = 0;
    for (Index j = 0; j < block.cols(); ++j) {
        VectorXd v = block.col(j);
        const double original = v.norm();
        if (original == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
            if (kept > 0) v -= out.leftCols(kept) * (out.leftCols(kept).transpose() * v);
        }
        const double norm = v.norm();
        if (norm <= 1e-10 * original) continue;
        out.col(kept++) = v / norm;
    }
    return out.leftCols(kept);
}

double estimate_lambda_max(const SparseMatrixXd& l, Rng& rng)
{
    VectorXd v = random_block(l.rows(), 1, rng).col(0).normalized();
    double estimate = 0.0;
    for (int it = 0; it < 200; ++it) {
        VectorXd w = l * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const double next = v.dot(w);
        v = w / norm;
        if (it > 10 && std::abs(next - estimate) <= 1e-6 * std::abs(next)) return std::max(next, norm);
        estimate = next;
    }
    return estimate;
}

// Shift-invert block Krylov with thick restarts: Krylov blocks of (L + σI)^{-1}, Rayleigh–Ritz
// against L itself, and restart from the best Ritz vectors until the m smallest converge.
TypedSpectrum krylov_solve(const HodgeOperators& ops, Index m, const SolverOptions& options)
{
    const SparseMatrixXd& l = ops.laplacian;
    const Index n = l.rows();
    Rng rng(options.seed);
    const double lambda_max = estimate_lambda_max(l, rng);
    const double bound = 0.1 * residual_bound(lambda_max);

    SparseMatrixXd shifted = l;
    SparseMatrixXd identity(n, n);
    identity.setIdentity();
    const double shift = 1e-6 * std::max(1.0, lambda_max);
    shifted += shift * identity;
    Eigen::SimplicialLDLT<SparseMatrixXd> factor(shifted);
    if (factor.info() != Eigen::Success) throw SolverError("eigensolver: factorization of the shifted Laplacian failed");

    const Index block = std::min(n, m + 8);
    const int depth = 3;
    MatrixXd start = random_block(n, block, rng);
    double worst = 0.0;
    for (int restart = 0; restart <= options.max_restarts; ++restart) {
        MatrixXd basis = orthonormalize(MatrixXd(n, 0), start);
        MatrixXd current = basis;
        for (int d = 1; d < depth && basis.cols() < n; ++d) {
            MatrixXd next = factor.solve(current);
            current = orthonormalize(basis, next);
            if (current.cols() == 0) break;
            MatrixXd grown(n, basis.cols() + current.cols());
            grown << basis, current;
            basis = std::move(grown);
        }

        const MatrixXd projected = basis.transpose() * (l * basis);
        Eigen::SelfAdjointEigenSolver<MatrixXd> ritz(0.5 * (projected + projected.transpose()));
        if (ritz.info() != Eigen::Success) throw SolverError("eigensolver: Rayleigh-Ritz step failed");
        const MatrixXd vectors = basis * ritz.eigenvectors();
        const Index have = std::min<Index>(m, vectors.cols());

        worst = 0.0;
        for (Index i = 0; i < have; ++i) {
            const VectorXd v = vectors.col(i);
            worst = std::max(worst, (l * v - ritz.eigenvalues()(i) * v).norm());
        }
        if (have == m && worst <= bound) {
            return make_spectrum(ops, ritz.eigenvalues(), vectors, m, std::max(lambda_max, ritz.eigenvalues().maxCoeff()));
        }
        start = vectors.leftCols(std::min<Index>(block, vectors.cols()));
    }
    std::ostringstream msg;
    msg << "eigensolver: block Krylov did not converge after " << options.max_restarts
        << " restarts (worst residual " << worst << ", target " << bound << ", n = " << n << ", m = " << m << ")";
    throw SolverError(msg.str());
}

}  // namespace

TypedSpectrum eigendecompose(const HodgeOperators& ops, std::optional<Index> m, const SolverOptions& options)
{
    const Index n = ops.size();
    const Index want = m ? *m : n;
    if (want < 0 || want > n) {
        throw InputError("eigendecompose: requested " + std::to_string(want) + " pairs of a " + std::to_string(n) +
                         "-dimensional operator");
    }
    if (n == 0 || want == 0) {
        TypedSpectrum empty;
        empty.degree = ops.degree;
        empty.threshold = ops.threshold;
        empty.dimension = n;
        empty.tolerances = Tolerances::for_scale(0.0);
        return empty;
    }
    TypedSpectrum out = n <= options.dense_limit ? dense_solve(ops, want) : krylov_solve(ops, want, options);
    check_residuals(ops, out);
    return out;
}

}  // namespace hodge
