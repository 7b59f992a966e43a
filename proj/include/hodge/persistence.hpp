#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hodge/complex.hpp"
#include "hodge/spectral.hpp"
#include "hodge/types.hpp"

namespace hodge {

/// Ascending thresholds t_1 < … < t_M at which degree-k spectra of m pairs are taken.
struct FiltrationGrid {
    std::vector<double> thresholds;
    int degree = 1;
    Index per_step = 40;

    Index steps() const { return static_cast<Index>(thresholds.size()); }

    /// Distinct filtration values of the complex, subsampled uniformly by index to at most
    /// `max_steps` (first and last value kept).
    static FiltrationGrid distinct(const FilteredComplex& complex, int degree, Index per_step,
                                   std::optional<Index> max_steps = std::nullopt);
    /// `steps` evenly spaced thresholds from lo to hi inclusive. One step means {hi}.
    static FiltrationGrid uniform(double lo, double hi, Index steps, int degree, Index per_step);
    /// lo·(hi/lo)^(i/(steps-1)); needs 0 < lo < hi.
    static FiltrationGrid geometric(double lo, double hi, Index steps, int degree, Index per_step);
    /// Geometric grid from the smallest positive filtration value to the largest.
    static FiltrationGrid geometric(const FilteredComplex& complex, Index steps, int degree, Index per_step);

    /// Throws InputError unless thresholds are finite, nonnegative and strictly ascending.
    void validate() const;
};

/// |ι(v)ᵀ w| / (‖v‖ ‖w‖). Throws InputError for a zero vector or mismatched lengths.
double pes(const VectorXd& v, const VectorXd& w, const InclusionMap& iota);
double pes(const VectorXd& v, const VectorXd& w);

/// All PES values between the columns of `from` (embedded through ι) and those of `to`.
MatrixXd pes_table(const MatrixXd& from, const MatrixXd& to, const InclusionMap& iota);

struct MatchedPair {
    Index from;
    Index to;
    double similarity;

    friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct Matching {
    std::vector<MatchedPair> pairs;      ///< ascending `from`
    std::vector<Index> unmatched_from;
    std::vector<Index> unmatched_to;
    /// Rows (from) and columns (to) whose best partner had to be picked among PES ties.
    std::vector<Index> tied_from;
    std::vector<Index> tied_to;
};

/// PES values closer than this count as tied.
inline constexpr double kPesTieTolerance = 1e-12;

/// Mutual-best matching on a PES table: (i, j) pairs when j is the best column of row i, i is
/// the best row of column j, and the similarity is at least theta. Ties go to the lower
/// eigenvalue, then the lower index.
Matching mutual_best(const MatrixXd& table, std::span<const double> lambda_from,
                     std::span<const double> lambda_to, double theta = 0.5);

/// PEM between two spectra of one complex at t ≤ t′.
Matching pem(const TypedSpectrum& from, const TypedSpectrum& to, const InclusionMap& iota, double theta = 0.5);

struct TrajectoryPoint {
    Index step = 0;  ///< 1-based grid step
    double t = 0.0;
    double lambda = 0.0;
    EigenType type = EigenType::Harmonic;
    std::optional<double> pes_prev;  ///< empty at birth
    Index pair = 0;                  ///< eigenpair index within its step; not serialized
};

struct Trajectory {
    Index id = 0;
    std::vector<TrajectoryPoint> points;
    bool open = false;  ///< still alive at the last grid step

    Index birth() const { return points.front().step; }
    /// Last step the trajectory is alive at.
    Index death() const { return points.back().step; }
    /// Most frequent type; ties in harmonic, gradient, curl order.
    EigenType dominant_type() const;
};

struct TrajectorySet {
    FiltrationGrid grid;
    double theta = 0.5;
    std::vector<Trajectory> trajectories;  ///< ordered by id
    std::vector<TypedSpectrum> spectra;    ///< one per step
    std::vector<Matching> matchings;       ///< step i → i+1

    /// Harmonic, gradient, curl counts at each step.
    std::vector<std::array<Index, 3>> step_counts() const;
};

struct TrackOptions {
    double theta = 0.5;
    SolverOptions solver;
};

TrajectorySet track(std::shared_ptr<const FilteredComplex> complex, const FiltrationGrid& grid,
                    const TrackOptions& options = {});

enum class DiagramFormat { Csv, Json, Svg };

/// Rows `trajectory_id,step,t,lambda,type,pes_prev` after a header line.
std::string trajectories_to_csv(const TrajectorySet& set);
/// Trajectories only. `open` is inferred from the largest step present, and grid thresholds are
/// recovered when every step appears.
TrajectorySet parse_trajectories_csv(const std::string& text);
std::string trajectories_to_json(const TrajectorySet& set);
/// Eigenvalue chart with one path per trajectory, coloured by dominant type, above a panel of
/// per-step type counts.
std::string trajectories_to_svg(const TrajectorySet& set);

void export_diagram(const TrajectorySet& set, const std::filesystem::path& path, DiagramFormat format);

}  // namespace hodge
