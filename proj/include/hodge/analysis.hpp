#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hodge/complex.hpp"
#include "hodge/spectral.hpp"
#include "hodge/types.hpp"

namespace hodge {

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 300;
    double tolerance = 1e-10;  ///< on the largest centroid shift
};

struct KMeansResult {
    std::vector<int> labels;  ///< relabelled in order of first appearance
    MatrixXd centroids;       ///< one row per label
    double inertia = 0.0;
    std::vector<double> inertia_trace;  ///< after each assignment step of the winning restart
    int iterations = 0;
    bool reseeded = false;  ///< an empty cluster had to be re-seeded
};

/// Lloyd iterations from greedy k-means++ seeding, best of `restarts` runs by inertia. Rows of
/// `points` are the samples. Throws InputError when c exceeds the number of distinct rows.
KMeansResult kmeans(const MatrixXd& points, int c, std::uint64_t seed, const KMeansOptions& options = {});

enum class ClusterMode { Gradient, Harmonic, Curl, Total };

std::string_view to_string(ClusterMode mode);
ClusterMode parse_cluster_mode(std::string_view name);

struct ClusterAssignment {
    int degree = 1;
    int clusters = 0;
    ClusterMode mode = ClusterMode::Curl;
    std::vector<int> labels;     ///< per n-simplex of the slice
    MatrixXd embedding;          ///< sign-fixed rows v̂(σ)
    std::vector<double> eigenvalues;  ///< of the selected eigenpairs
    double inertia = 0.0;
    bool degenerate = false;     ///< some cluster ended up empty
};

/// The h smallest eigenvectors of one type, as columns, in the ascending-vertex orientation.
struct ClusterBasis {
    int degree = 1;
    ClusterMode mode = ClusterMode::Curl;
    MatrixXd vectors;
    std::vector<double> eigenvalues;
};

ClusterBasis clustering_basis(const ComplexSlice& slice, int n, Index h, ClusterMode mode, const SolverOptions& solver = {});
ClusterAssignment cluster_basis(const ClusterBasis& basis, int c, std::uint64_t seed, const OrientationFlips& flips = {});

/// k-means on sign-fixed rows of the h smallest eigenvectors of the selected type.
///
/// Spectra are computed in the ascending-vertex orientation; `flips` then acts on the eigenvector
/// rows (D v is an eigenvector of D L D), so the stored orientation cannot change the labels.
/// Throws InputError when fewer than h eigenvectors of the type exist.
ClusterAssignment hodge_spectral_clustering(const ComplexSlice& slice, int n, Index h, int c, ClusterMode mode,
                                            std::uint64_t seed, const OrientationFlips& flips = {},
                                            const SolverOptions& solver = {});

/// Row sign fix: multiply by sgn(1ᵀ row); rows summing to zero use the sign of their
/// largest-magnitude entry (ties: lowest column); zero rows stay.
void sign_fix_rows(MatrixXd& embedding);

inline constexpr int kUnassigned = -1;

/// Majority label over incident n-simplices per vertex (ties: smallest label), kUnassigned
/// for vertices with none.
std::vector<int> node_clustering(const ClusterAssignment& assignment, const ComplexSlice& slice);

struct HgcValues {
    int degree = 1;
    Index eigenpairs = 0;
    MatrixXd triples;  ///< rows per n-simplex: H, G, Cu
    double e_max = 0.0;
};

/// Per-simplex maxima of |v[σ]| over the harmonic, gradient and curl members of the k smallest
/// eigenpairs, divided by the largest magnitude over all of them. Throws InputError for k = 0.
HgcValues hgc_values(const ComplexSlice& slice, int n, Index k, const SolverOptions& solver = {});

enum class AnalysisFormat { Csv, Json, Svg };

/// `v0,…,vn,label` rows.
std::string labels_to_csv(const ClusterAssignment& assignment, const ComplexSlice& slice);
/// `vertex,label` rows, labels indexed like the slice's vertices; unassigned vertices carry -1.
std::string vertex_labels_to_csv(const std::vector<int>& vertex_labels, const ComplexSlice& slice);
std::string labels_to_json(const ClusterAssignment& assignment, const ComplexSlice& slice,
                           const std::optional<std::vector<int>>& vertex_labels = std::nullopt);
/// Simplices coloured by cluster id. Needs 2D points on the complex.
std::string labels_to_svg(const ClusterAssignment& assignment, const ComplexSlice& slice,
                          const std::optional<std::vector<int>>& vertex_labels = std::nullopt);

/// `v0,…,vn,H,G,Cu` rows.
std::string hgc_to_csv(const HgcValues& values, const ComplexSlice& slice);
struct HgcTable {
    std::vector<Simplex> simplices;
    MatrixXd triples;
};
HgcTable parse_hgc_csv(const std::string& text);
std::string hgc_to_json(const HgcValues& values, const ComplexSlice& slice);
/// Simplices stroked or filled with rgb(Cu, G, H)·255.
std::string hgc_to_svg(const HgcValues& values, const ComplexSlice& slice);
std::string hgc_colour(double h, double g, double cu);

void export_analysis(const ClusterAssignment& assignment, const ComplexSlice& slice, const std::filesystem::path& path,
                     AnalysisFormat format, const std::optional<std::vector<int>>& vertex_labels = std::nullopt);
void export_analysis(const HgcValues& values, const ComplexSlice& slice, const std::filesystem::path& path,
                     AnalysisFormat format);

}  // namespace hodge
