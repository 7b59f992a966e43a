// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hodge/analysis.hpp"
#include "hodge/persistence.hpp"
#include "hodge/spectral.hpp"
#include "hodge/synthetic.hpp"
#include "support.hpp"

using namespace hodge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Report {
    int failures = 0;

    void line(int id, bool pass, const std::string& detail)
    {
        std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

template <typename... Args>
std::string fmt(const char* format, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::vector<double> lambdas(const TypedSpectrum& s)
{
    std::vector<double> out;
    for (const auto& p : s.pairs) out.push_back(p.lambda);
    return out;
}

std::vector<EigenType> types(const TypedSpectrum& s)
{
    std::vector<EigenType> out;
    for (const auto& p : s.pairs) out.push_back(p.type);
    return out;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) return INFINITY;
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Ten thresholds spread over the distinct values, skipping the all-vertices level.
std::vector<double> ten_thresholds(const FilteredComplex& fc)
{
    const auto values = fc.distinct_values();
    std::vector<double> out;
    for (int i = 1; i <= 10; ++i) out.push_back(values[(values.size() - 1) * static_cast<std::size_t>(i) / 10]);
    return out;
}

void exactness(Report& report)
{
    const auto start = Clock::now();
    bool ok = true;
    std::string why;

    const TypedSpectrum hollow = spectrum_at(sublevel(test::hollow_triangle(), INFINITY), 1, std::nullopt);
    ok &= max_diff(lambdas(hollow), {0, 3, 3}) <= 1e-8;
    ok &= types(hollow) == std::vector<EigenType>{EigenType::Harmonic, EigenType::Gradient, EigenType::Gradient};

    const TypedSpectrum filled = spectrum_at(sublevel(test::filled_triangle(), INFINITY), 1, std::nullopt);
    ok &= max_diff(lambdas(filled), {3, 3, 3}) <= 1e-8;
    ok &= filled.count(EigenType::Curl) == 1 && filled.count(EigenType::Gradient) == 2;
    if (!ok && why.empty()) why = " triangle spectra";

    const TypedSpectrum c8 = spectrum_at(sublevel(test::cycle_graph(8), INFINITY), 1, std::nullopt);
    std::vector<double> expected{0.0};
    for (int j = 1; j < 8; ++j) expected.push_back(4.0 * std::pow(std::sin(std::numbers::pi * j / 8.0), 2));
    std::sort(expected.begin(), expected.end());
    const double c8_err = max_diff(lambdas(c8), expected);
    if (c8_err > 1e-8) {
        ok = false;
        why += " C8";
    }
    const double elapsed = seconds_since(start);
    ok &= elapsed < 1.0;
    report.line(1, ok, fmt("C8 max error %.2e, %.3f s%s", c8_err, elapsed, why.c_str()));
}

struct IdentityStats {
    bool chain_ok = true;
    Index betti_mismatches = 0;
    double residual = 0.0;
    double orthogonality = 0.0;
    Index eigenpairs = 0;
    Index classification_errors = 0;
    Index solver_errors = 0;
};

void identity_and_classification(Report& report)
{
    const auto start = Clock::now();
    IdentityStats st;
    Rng rng(2024);
    int signals = 0;
    for (std::uint64_t cloud_seed = 1; cloud_seed <= 20; ++cloud_seed) {
        auto fc = test::alpha_complex(test::random_cloud(60, 1000 + cloud_seed));
        for (double t : ten_thresholds(*fc)) {
            const ComplexSlice slice = sublevel(fc, t);
            for (int k = 1; k <= 2; ++k) {
                const Eigen::SparseMatrix<int> prod =
                    boundary_matrix(slice, k).to_sparse<int>() * boundary_matrix(slice, k + 1).to_sparse<int>();
                for (int o = 0; o < prod.outerSize(); ++o) {
                    for (Eigen::SparseMatrix<int>::InnerIterator it(prod, o); it; ++it) st.chain_ok &= it.value() == 0;
                }
            }
            const Index oracle = slice.size(1) - test::rational_rank(boundary_matrix(slice, 1)) -
                                 test::rational_rank(boundary_matrix(slice, 2));
            try {
                const TypedSpectrum s = spectrum_at(slice, 1, std::nullopt);
                if (s.count(EigenType::Harmonic) != oracle) ++st.betti_mismatches;
                for (const auto& p : s.pairs) {
                    ++st.eigenpairs;
                    const bool up_zero = p.residual_up <= s.tolerances.residual;
                    const bool down_zero = p.residual_down <= s.tolerances.residual;
                    if (p.lambda > s.tolerances.zero) {
                        const bool expect_curl = p.type == EigenType::Curl;
                        if (up_zero == down_zero || (expect_curl ? !down_zero : !up_zero) || p.type == EigenType::Harmonic) {
                            ++st.classification_errors;
                        }
                    } else if (p.type != EigenType::Harmonic) {
                        ++st.classification_errors;
                    }
                }
            } catch (const SolverError&) {
                ++st.solver_errors;
            }
        }
        // Five random signals per cloud on its middle threshold.
        const HodgeOperators ops = hodge_operators(sublevel(fc, ten_thresholds(*fc)[5]), 1);
        for (int r = 0; r < 5; ++r, ++signals) {
            VectorXd v(ops.size());
            for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
            const HodgeComponents c = hodge_project(v, ops);
            st.residual = std::max(st.residual, (v - c.gradient - c.harmonic - c.curl).norm());
            for (const auto& [a, b] : {std::pair{&c.gradient, &c.harmonic}, {&c.gradient, &c.curl}, {&c.harmonic, &c.curl}}) {
                st.orthogonality = std::max(st.orthogonality, std::abs(a->dot(*b)) / v.squaredNorm());
            }
        }
    }
    const double elapsed = seconds_since(start);
    const bool ok2 = st.chain_ok && st.betti_mismatches == 0 && st.residual <= 1e-9 && st.orthogonality <= 1e-9 &&
                     elapsed < 10.0 && signals == 100;
    report.line(2, ok2,
                fmt("B_k B_k+1 = 0: %s, harmonic/rank mismatches %lld, %d signals: residual %.2e, orthogonality %.2e, %.2f s",
                    st.chain_ok ? "yes" : "no", static_cast<long long>(st.betti_mismatches), signals, st.residual,
                    st.orthogonality, elapsed));
    report.line(3, st.classification_errors == 0 && st.solver_errors == 0,
                fmt("%lld eigenpairs over 200 slices, %lld classification errors, %lld solver errors",
                    static_cast<long long>(st.eigenpairs), static_cast<long long>(st.classification_errors),
                    static_cast<long long>(st.solver_errors)));
}

// The four-disks cloud and 30-step run shared by criteria 4-6.
struct FourDisks {
    SyntheticCloud cloud = generate(Preset::FourDisks, 400, 7);
    std::shared_ptr<const FilteredComplex> complex = test::alpha_complex(cloud.cloud);
    FiltrationGrid grid = FiltrationGrid::geometric(*complex, 30, 1, 40);
};

bool check_matching(const MatrixXd& table, const Matching& m, double theta)
{
    std::set<Index> from, to;
    for (const auto& p : m.pairs) {
        if (!from.insert(p.from).second || !to.insert(p.to).second) return false;
        const double v = table(p.from, p.to);
        if (v < theta || std::abs(v - p.similarity) > 1e-15) return false;
        if (table.row(p.from).maxCoeff() > v + kPesTieTolerance) return false;
        if (table.col(p.to).maxCoeff() > v + kPesTieTolerance) return false;
    }
    // Completeness: a strict mutual maximum above theta must be matched.
    for (Index i = 0; i < table.rows(); ++i) {
        Index j = 0;
        table.row(i).maxCoeff(&j);
        Index back = 0;
        table.col(j).maxCoeff(&back);
        if (back != i || table(i, j) < theta) continue;
        int row_ties = 0, col_ties = 0;
        for (Index c = 0; c < table.cols(); ++c) row_ties += table(i, c) >= table(i, j) - kPesTieTolerance;
        for (Index r = 0; r < table.rows(); ++r) col_ties += table(r, j) >= table(i, j) - kPesTieTolerance;
        if (row_ties == 1 && col_ties == 1 && !from.count(i)) return false;
    }
    return true;
}

void pes_pem(Report& report, const FourDisks& fd, const TrajectorySet& run)
{
    const auto start = Clock::now();
    Rng rng(77);
    bool range_ok = true, invariance_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.below(30));
        VectorXd v(n), w(n);
        for (Index i = 0; i < n; ++i) {
            v(i) = rng.normal();
            w(i) = rng.normal();
        }
        const double p = pes(v, w);
        range_ok &= p >= 0.0 && p <= 1.0;
        invariance_ok &= pes(-v, w) == p && pes(v, -w) == p && pes(4.0 * v, w) == p && pes(v, 0.125 * w) == p;
    }

    bool matching_ok = true;
    for (Index s = 0; s + 1 < run.grid.steps(); ++s) {
        const ComplexSlice a = sublevel(fd.complex, run.grid.thresholds[static_cast<std::size_t>(s)]);
        const ComplexSlice b = sublevel(fd.complex, run.grid.thresholds[static_cast<std::size_t>(s + 1)]);
        const auto& sa = run.spectra[static_cast<std::size_t>(s)];
        const auto& sb = run.spectra[static_cast<std::size_t>(s + 1)];
        if (sa.size() == 0 || sb.size() == 0) continue;
        const MatrixXd table = pes_table(sa.vectors(), sb.vectors(), inclusion_map(a, b, 1));
        matching_ok &= check_matching(table, run.matchings[static_cast<std::size_t>(s)], run.theta);
    }

    const std::string first = trajectories_to_csv(run);
    const std::string second = trajectories_to_csv(track(fd.complex, fd.grid));
    const bool deterministic = first == second;
    report.line(4, range_ok && invariance_ok && matching_ok && deterministic,
                fmt("range %s, scale/sign invariance %s, PEM on %lld step pairs %s, rerun CSV identical %s (%.1f s)",
                    range_ok ? "ok" : "bad", invariance_ok ? "exact" : "inexact",
                    static_cast<long long>(run.grid.steps() - 1), matching_ok ? "ok" : "bad",
                    deterministic ? "yes" : "no", seconds_since(start)));
}

void regime(Report& report, const TrajectorySet& run, double run_seconds)
{
    const auto counts = run.step_counts();
    const auto steps = static_cast<Index>(counts.size());
    Index harmonic_step = -1;
    for (Index s = steps / 2; s < steps; ++s) {
        if (counts[static_cast<std::size_t>(s)][0] == 1) {
            harmonic_step = s;
            break;
        }
    }
    const bool a = harmonic_step >= 0;

    Index best_rise = 0;
    for (Index s = 0; s < steps; ++s) {
        for (Index u = s + 1; u < steps; ++u) {
            best_rise = std::max(best_rise, counts[static_cast<std::size_t>(u)][2] - counts[static_cast<std::size_t>(s)][2]);
        }
    }
    const bool b = best_rise >= 10;

    bool c = false;
    std::string gaps;
    if (a) {
        std::vector<double> curl;
        for (const auto& p : run.spectra[static_cast<std::size_t>(harmonic_step)].pairs) {
            if (p.type == EigenType::Curl && curl.size() < 8) curl.push_back(p.lambda);
        }
        if (curl.size() == 8) {
            std::size_t widest = 0;
            for (std::size_t i = 1; i < 7; ++i) {
                if (curl[i + 1] - curl[i] > curl[widest + 1] - curl[widest]) widest = i;
            }
            c = widest == 3;
            gaps = fmt(", widest curl gap after #%zu (4th-5th gap %.4f, widest %.4f)", widest + 1, curl[4] - curl[3],
                       curl[widest + 1] - curl[widest]);
        } else {
            gaps = fmt(", only %zu curl eigenvalues", curl.size());
        }
    }
    const bool fast = run_seconds < 120.0;
    report.line(5, a && b && c && fast,
                fmt("(a) %s at step %lld, (b) curl rise %lld %s, (c) %s%s; run %.1f s", a ? "ok" : "fail",
                    static_cast<long long>(harmonic_step + 1), static_cast<long long>(best_rise), b ? "ok" : "fail",
                    c ? "ok" : "fail", gaps.c_str(), run_seconds));
}

void clustering(Report& report, const FourDisks& fd)
{
    const auto start = Clock::now();
    const double t = 0.3;
    const ComplexSlice slice = sublevel(fd.complex, t);
    const ClusterBasis basis = clustering_basis(slice, 1, 4, ClusterMode::Curl);
    const ClusterAssignment reference = cluster_basis(basis, 4, 7);

    // Majority label per disk over edges with both endpoints in that disk.
    std::array<std::map<int, Index>, 4> votes;
    Index interior = 0;
    for (Index i = 0; i < slice.size(1); ++i) {
        const Simplex& e = slice.simplex(1, i);
        const int g = fd.cloud.group[static_cast<std::size_t>(e[0])];
        if (g != fd.cloud.group[static_cast<std::size_t>(e[1])]) continue;
        ++votes[static_cast<std::size_t>(g)][reference.labels[static_cast<std::size_t>(i)]];
        ++interior;
    }
    Index agreeing = 0;
    for (const auto& v : votes) {
        Index top = 0;
        for (const auto& [label, count] : v) top = std::max(top, count);
        agreeing += top;
    }
    const double accuracy = static_cast<double>(agreeing) / static_cast<double>(std::max<Index>(interior, 1));

    Rng rng(31);
    int identical = 0;
    for (int trial = 0; trial < 100; ++trial) {
        OrientationFlips flips;
        for (int k = 0; k <= slice.max_dim(); ++k) {
            std::vector<std::int8_t> s;
            for (Index i = 0; i < slice.size(k); ++i) s.push_back(rng.uniform() < 0.5 ? -1 : 1);
            flips.signs.push_back(std::move(s));
        }
        identical += cluster_basis(basis, 4, 7, flips).labels == reference.labels;
    }
    const double elapsed = seconds_since(start);
    report.line(6, accuracy >= 0.9 && identical == 100 && elapsed < 30.0,
                fmt("t = %.2f: %.1f%% of %lld disk-interior edges carry their disk's majority label, "
                    "%d/100 flips identical, %.1f s",
                    t, 100.0 * accuracy, static_cast<long long>(interior), identical, elapsed));
}

void hgc_suite(Report& report)
{
    bool range_ok = true, empty_ok = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto fc = test::alpha_complex(test::random_cloud(50, 500 + seed));
        const auto values = fc->distinct_values();
        const HgcValues v = hgc_values(sublevel(fc, values[values.size() / 2]), 1, 15);
        range_ok &= v.triples.minCoeff() >= 0.0 && v.triples.maxCoeff() <= 1.0 &&
                    std::abs(v.triples.maxCoeff() - 1.0) <= 1e-15;

        // Just below the first triangle: edges only.
        double first_triangle = INFINITY;
        for (Index i = 0; i < fc->size(2); ++i) first_triangle = std::min(first_triangle, fc->value(2, i));
        const auto below = std::lower_bound(values.begin(), values.end(), first_triangle);
        const ComplexSlice edges = sublevel(fc, *(below - 1));
        if (edges.size(2) != 0 || edges.size(1) == 0) {
            empty_ok = false;
            continue;
        }
        empty_ok &= (hgc_values(edges, 1, 10).triples.col(2).array() == 0.0).all();
    }
    const HgcValues tri = hgc_values(sublevel(test::filled_triangle(), INFINITY), 1, 3);
    const double spread = tri.triples.col(2).maxCoeff() - tri.triples.col(2).minCoeff();
    report.line(7, range_ok && empty_ok && spread <= 1e-12,
                fmt("range/max on 20 complexes %s, curl without triangles exactly 0 %s, filled-triangle curl spread %.1e",
                    range_ok ? "ok" : "bad", empty_ok ? "ok" : "bad", spread));
}

void geometry_suite(Report& report)
{
    Index violations = 0;
    bool monotone = true, closed = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PointCloud cloud = test::random_cloud(200, 900 + seed);
        const Triangulation tri = delaunay_2d(cloud);
        violations += test::incircle_violations(tri, cloud);
        auto fc = std::make_shared<const FilteredComplex>(filtration_values(tri, cloud));
        for (int k = 1; k <= fc->max_dim(); ++k) {
            for (Index i = 0; i < fc->size(k); ++i) {
                const Simplex& s = fc->simplex(k, i);
                for (std::size_t drop = 0; drop < s.size(); ++drop) {
                    Simplex face = s;
                    face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
                    monotone &= fc->value(k - 1, *fc->find(face)) <= fc->value(k, i);
                }
            }
        }
        Index previous = 0;
        for (double t : fc->distinct_values()) {
            const ComplexSlice slice = sublevel(fc, t);
            closed &= test::slice_closed(slice);
            monotone &= slice.size(0) + slice.size(1) + slice.size(2) >= previous;
            previous = slice.size(0) + slice.size(1) + slice.size(2);
        }
    }
    report.line(8, violations == 0 && monotone && closed,
                fmt("in-circle violations %lld on 10 clouds of 200, monotone %s, closed at every threshold %s",
                    static_cast<long long>(violations), monotone ? "yes" : "no", closed ? "yes" : "no"));
}

}  // namespace

int main()
{
    Report report;
    exactness(report);
    identity_and_classification(report);

    const FourDisks fd;
    const auto start = Clock::now();
    const TrajectorySet run = track(fd.complex, fd.grid);
    const double run_seconds = seconds_since(start);
    pes_pem(report, fd, run);
    regime(report, run, run_seconds);
    clustering(report, fd);
    hgc_suite(report);
    geometry_suite(report);
    std::printf("%d of 8 criteria failed\n", report.failures);
    return report.failures;
}
