#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hodge/complex.hpp"
#include "hodge/types.hpp"

namespace hodge {

enum class EigenType { Harmonic, Gradient, Curl };

std::string_view to_string(EigenType type);
EigenType parse_eigen_type(std::string_view name);

/// Per-dimension ±1 orientation flips applied on top of the ascending-vertex orientation.
/// An empty inner vector leaves that dimension unchanged.
struct OrientationFlips {
    std::vector<std::vector<std::int8_t>> signs;

    std::span<const std::int8_t> at(int k) const
    {
        if (k < 0 || k >= static_cast<int>(signs.size())) return {};
        return signs[static_cast<std::size_t>(k)];
    }
};

/// Down/up/full Hodge Laplacians of degree k on one slice.
struct HodgeOperators {
    int degree = 0;
    double threshold = 0.0;
    SparseMatrixXd boundary;     ///< B_k, |S_{k-1}| x |S_k|
    SparseMatrixXd coboundary;   ///< B_{k+1}, |S_k| x |S_{k+1}|
    SparseMatrixXd down;         ///< B_k^T B_k
    SparseMatrixXd up;           ///< B_{k+1} B_{k+1}^T
    SparseMatrixXd laplacian;    ///< down + up

    Index size() const { return laplacian.rows(); }
};

HodgeOperators hodge_operators(const ComplexSlice& slice, int k, const OrientationFlips& flips = {});

/// Scale-relative thresholds: `zero` decides λ = 0, `residual` decides ‖B v‖ = 0.
struct Tolerances {
    double zero = 0.0;
    double residual = 0.0;

    static Tolerances for_scale(double lambda_max);
};

struct TypedEigenpair {
    double lambda = 0.0;
    VectorXd vector;
    EigenType type = EigenType::Harmonic;
    double residual_up = 0.0;    ///< ‖B_{k+1}^T v‖
    double residual_down = 0.0;  ///< ‖B_k v‖
};

struct TypedSpectrum {
    int degree = 0;
    double threshold = 0.0;
    Index dimension = 0;       ///< number of k-simplices
    double lambda_max = 0.0;   ///< largest eigenvalue of the slice's L_k (estimate on the iterative path)
    Tolerances tolerances;
    bool typed = false;
    std::vector<TypedEigenpair> pairs;  ///< ascending eigenvalue

    Index size() const { return static_cast<Index>(pairs.size()); }
    /// Harmonic, gradient, curl counts.
    std::array<Index, 3> counts() const;
    Index count(EigenType type) const { return counts()[static_cast<std::size_t>(type)]; }
    /// Eigenvectors as columns.
    MatrixXd vectors() const;
};

struct SolverOptions {
    Index dense_limit = 3000;  ///< above this many rows the shift-invert block Krylov path runs
    int max_restarts = 60;
    std::uint64_t seed = 0x5eed;
};

/// The m smallest eigenpairs (all when m is empty) with unit, sign-canonical eigenvectors.
/// Types are left unassigned. Throws SolverError when the residual bound
/// ‖Lv − λv‖ ≤ 1e-8·max(1, λ_max) cannot be met.
TypedSpectrum eigendecompose(const HodgeOperators& ops, std::optional<Index> m = std::nullopt,
                             const SolverOptions& options = {});

/// Type of a single eigenpair from its eigenvalue and residuals. Throws SolverError for a mixed
/// vector (both residuals above tolerance); `classify_spectrum` resolves those by rotating
/// degenerate eigenspaces.
EigenType classify(const TypedEigenpair& pair, const HodgeOperators& ops, const Tolerances& tol);

/// Fill residuals and types of every pair. Eigenspaces shared between gradient and curl
/// directions are rotated so each basis vector lies in one subspace.
void classify_spectrum(TypedSpectrum& spectrum, const HodgeOperators& ops);

struct HodgeComponents {
    VectorXd gradient;
    VectorXd harmonic;
    VectorXd curl;
};

/// Orthogonal split v = gradient + harmonic + curl with gradient ∈ Im B_k^T, curl ∈ Im B_{k+1}.
HodgeComponents hodge_project(const VectorXd& v, const HodgeOperators& ops);

/// Rank of a boundary matrix by exact elimination modulo a 61-bit prime.
Index boundary_rank(const SparseSignMatrix& b);

/// |S_k| − rank B_k − rank B_{k+1}.
Index betti_number(const ComplexSlice& slice, int k);

/// sublevel → operators → eigendecompose → classify, with the harmonic count checked against
/// the rank formula. The threshold-only overload slices a shared complex.
TypedSpectrum spectrum_at(const ComplexSlice& slice, int k, std::optional<Index> m,
                          const SolverOptions& options = {}, const OrientationFlips& flips = {});
TypedSpectrum spectrum_at(std::shared_ptr<const FilteredComplex> complex, double t, int k,
                          std::optional<Index> m, const SolverOptions& options = {});

std::string spectrum_to_json(const TypedSpectrum& spectrum, bool include_vectors);

/// Flip the sign so the largest-magnitude entry is positive (ties: lowest index).
template <typename Derived>
void canonicalize_sign(Eigen::MatrixBase<Derived>& v)
{
    if (v.size() == 0) return;
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(best))) best = i;
    }
    if (v(best) < 0) v = -v;
}

}  // namespace hodge
