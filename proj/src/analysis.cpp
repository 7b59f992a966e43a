#include "hodge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hodge/errors.hpp"
#include "hodge/io.hpp"
#include "hodge/random.hpp"

namespace hodge {

namespace {

Index distinct_rows(const MatrixXd& points)
{
    std::vector<Index> order(static_cast<std::size_t>(points.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    auto less = [&](Index a, Index b) {
        for (Index j = 0; j < points.cols(); ++j) {
            if (points(a, j) != points(b, j)) return points(a, j) < points(b, j);
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    Index count = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i) count += less(order[i - 1], order[i]) ? 1 : 0;
    return count;
}

// Nearest centroid per row (ties: lowest id); returns inertia.
double assign(const MatrixXd& points, const MatrixXd& centroids, std::vector<int>& labels, VectorXd& dist)
{
    double inertia = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < centroids.rows(); ++k) {
            const double d = (points.row(i) - centroids.row(k)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(k);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        dist(i) = best_d;
        inertia += best_d;
    }
    return inertia;
}

// Greedy k-means++: each new centre is the best of 2 + ⌊ln c⌋ D²-weighted candidates.
MatrixXd seed_centroids(const MatrixXd& points, int c, Rng& rng)
{
    const Index n = points.rows();
    MatrixXd centroids(c, points.cols());
    centroids.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
    VectorXd d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    const int trials = 2 + static_cast<int>(std::log(static_cast<double>(c)));
    for (int k = 1; k < c; ++k) {
        const double total = d2.sum();
        Index best = -1;
        double best_potential = std::numeric_limits<double>::infinity();
        VectorXd best_d2;
        for (int trial = 0; trial < trials; ++trial) {
            double target = rng.uniform() * total;
            Index pick = n - 1;
            for (Index i = 0; i < n; ++i) {
                target -= d2(i);
                if (target < 0.0 && d2(i) > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (d2(pick) == 0.0 && pick > 0) --pick;  // rounding fell off the end
            const VectorXd cand = d2.cwiseMin((points.rowwise() - points.row(pick)).rowwise().squaredNorm());
            const double potential = cand.sum();
            if (potential < best_potential) {
                best_potential = potential;
                best = pick;
                best_d2 = cand;
            }
        }
        centroids.row(k) = points.row(best);
        d2 = best_d2;
    }
    return centroids;
}

KMeansResult lloyd(const MatrixXd& points, int c, Rng& rng, const KMeansOptions& options)
{
    KMeansResult run;
    MatrixXd centroids = seed_centroids(points, c, rng);
    std::vector<int> labels(static_cast<std::size_t>(points.rows()));
    VectorXd dist(points.rows());
    for (run.iterations = 1;; ++run.iterations) {
        const double inertia = assign(points, centroids, labels, dist);
        if (!run.inertia_trace.empty() && inertia > run.inertia_trace.back() * (1.0 + 1e-12) + 1e-300) {
            throw SolverError("k-means: inertia increased between Lloyd iterations");
        }
        run.inertia_trace.push_back(inertia);

        MatrixXd next = MatrixXd::Zero(c, points.cols());
        std::vector<Index> sizes(static_cast<std::size_t>(c), 0);
        for (Index i = 0; i < points.rows(); ++i) {
            next.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
            ++sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        for (int k = 0; k < c; ++k) {
            if (sizes[static_cast<std::size_t>(k)] > 0) {
                next.row(k) /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
            } else {
                // Move the empty centre onto the worst-served point.
                Index far = 0;
                dist.maxCoeff(&far);
                next.row(k) = points.row(far);
                dist(far) = 0.0;
                run.reseeded = true;
            }
        }
        const double shift = (next - centroids).rowwise().norm().maxCoeff();
        centroids = std::move(next);
        if (shift < options.tolerance || run.iterations >= options.max_iterations) break;
    }
    run.inertia = assign(points, centroids, labels, dist);
    run.labels = std::move(labels);
    run.centroids = std::move(centroids);
    return run;
}

}  // namespace

KMeansResult kmeans(const MatrixXd& points, int c, std::uint64_t seed, const KMeansOptions& options)
{
    if (c < 1) throw InputError("k-means: need at least one cluster");
    if (options.restarts < 1 || options.max_iterations < 1) throw InputError("k-means: bad options");
    if (!points.allFinite()) throw InputError("k-means: non-finite coordinates");
    const Index distinct = distinct_rows(points);
    if (c > distinct) {
        throw InputError("k-means: " + std::to_string(c) + " clusters requested but only " + std::to_string(distinct) +
                         " distinct points");
    }
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        KMeansResult run = lloyd(points, c, rng, options);
        if (run.inertia < best.inertia) best = std::move(run);
    }

    std::vector<int> relabel(static_cast<std::size_t>(c), -1);
    int next = 0;
    for (int& l : best.labels) {
        int& target = relabel[static_cast<std::size_t>(l)];
        if (target < 0) target = next++;
        l = target;
    }
    MatrixXd centroids(next, points.cols());
    for (int k = 0; k < c; ++k) {
        if (relabel[static_cast<std::size_t>(k)] >= 0) centroids.row(relabel[static_cast<std::size_t>(k)]) = best.centroids.row(k);
    }
    best.centroids = std::move(centroids);
    return best;
}

std::string_view to_string(ClusterMode mode)
{
    switch (mode) {
    case ClusterMode::Gradient: return "gradient";
    case ClusterMode::Harmonic: return "harmonic";
    case ClusterMode::Curl: return "curl";
    case ClusterMode::Total: return "total";
    }
    return "unknown";
}

ClusterMode parse_cluster_mode(std::string_view name)
{
    if (name == "gradient") return ClusterMode::Gradient;
    if (name == "harmonic") return ClusterMode::Harmonic;
    if (name == "curl") return ClusterMode::Curl;
    if (name == "total") return ClusterMode::Total;
    throw InputError("unknown clustering mode '" + std::string(name) + "'");
}

void sign_fix_rows(MatrixXd& embedding)
{
    for (Index i = 0; i < embedding.rows(); ++i) {
        const double sum = embedding.row(i).sum();
        double sign = 1.0;
        if (sum != 0.0) {
            sign = sum > 0.0 ? 1.0 : -1.0;
        } else {
            Index big = 0;
            for (Index j = 1; j < embedding.cols(); ++j) {
                if (std::abs(embedding(i, j)) > std::abs(embedding(i, big))) big = j;
            }
            if (embedding.cols() > 0 && embedding(i, big) < 0.0) sign = -1.0;
        }
        if (sign < 0.0) embedding.row(i) = -embedding.row(i);
    }
}

namespace {

// Smallest eigenpairs of degree n, enough of them to include `want` of the requested kind.
std::vector<TypedEigenpair> select_pairs(const ComplexSlice& slice, int n, Index want, std::optional<EigenType> type,
                                         const SolverOptions& solver, Index& available)
{
    const Index dim = slice.size(n);
    Index m = dim <= solver.dense_limit ? dim : std::min(dim, want + 32);
    for (;;) {
        TypedSpectrum s = spectrum_at(slice, n, m, solver);
        std::vector<TypedEigenpair> out;
        for (auto& p : s.pairs) {
            if (!type || p.type == *type) out.push_back(std::move(p));
        }
        available = static_cast<Index>(out.size());
        if (available >= want || m == dim) {
            if (available > want) out.resize(static_cast<std::size_t>(want));
            return out;
        }
        m = std::min(dim, 2 * m);
    }
}

}  // namespace

ClusterBasis clustering_basis(const ComplexSlice& slice, int n, Index h, ClusterMode mode, const SolverOptions& solver)
{
    if (n < 0 || n > slice.max_dim()) throw InputError("clustering: degree " + std::to_string(n) + " out of range");
    if (h < 1) throw InputError("clustering: need at least one eigenvector");

    std::optional<EigenType> type;
    if (mode == ClusterMode::Gradient) type = EigenType::Gradient;
    if (mode == ClusterMode::Harmonic) type = EigenType::Harmonic;
    if (mode == ClusterMode::Curl) type = EigenType::Curl;
    Index available = 0;
    const auto pairs = select_pairs(slice, n, h, type, solver, available);
    if (available < h) {
        throw InputError("clustering: " + std::to_string(h) + " " + std::string(to_string(mode)) +
                         " eigenvectors requested but only " + std::to_string(available) + " available at degree " +
                         std::to_string(n));
    }
    ClusterBasis out;
    out.degree = n;
    out.mode = mode;
    out.vectors.resize(slice.size(n), h);
    for (Index j = 0; j < h; ++j) {
        out.vectors.col(j) = pairs[static_cast<std::size_t>(j)].vector;
        out.eigenvalues.push_back(pairs[static_cast<std::size_t>(j)].lambda);
    }
    return out;
}

ClusterAssignment cluster_basis(const ClusterBasis& basis, int c, std::uint64_t seed, const OrientationFlips& flips)
{
    if (c < 2) throw InputError("clustering: need at least two clusters");
    ClusterAssignment out;
    out.degree = basis.degree;
    out.clusters = c;
    out.mode = basis.mode;
    out.eigenvalues = basis.eigenvalues;
    out.embedding = basis.vectors;
    const auto signs = flips.at(basis.degree);
    if (!signs.empty()) {
        if (static_cast<Index>(signs.size()) != out.embedding.rows()) throw InputError("clustering: orientation flips have the wrong length");
        for (Index i = 0; i < out.embedding.rows(); ++i) out.embedding.row(i) *= signs[static_cast<std::size_t>(i)];
    }
    sign_fix_rows(out.embedding);

    const KMeansResult km = kmeans(out.embedding, c, seed);
    out.labels = km.labels;
    out.inertia = km.inertia;
    out.degenerate = km.centroids.rows() < c;
    return out;
}

ClusterAssignment hodge_spectral_clustering(const ComplexSlice& slice, int n, Index h, int c, ClusterMode mode,
                                            std::uint64_t seed, const OrientationFlips& flips, const SolverOptions& solver)
{
    if (c < 2) throw InputError("clustering: need at least two clusters");
    return cluster_basis(clustering_basis(slice, n, h, mode, solver), c, seed, flips);
}

std::vector<int> node_clustering(const ClusterAssignment& assignment, const ComplexSlice& slice)
{
    if (static_cast<Index>(assignment.labels.size()) != slice.size(assignment.degree)) {
        throw InputError("node clustering: assignment does not match the slice");
    }
    std::vector<std::map<int, Index>> votes(static_cast<std::size_t>(slice.size(0)));
    for (Index i = 0; i < slice.size(assignment.degree); ++i) {
        for (VertexId v : slice.simplex(assignment.degree, i)) {
            const Index idx = slice.find({v});
            ++votes[static_cast<std::size_t>(idx)][assignment.labels[static_cast<std::size_t>(i)]];
        }
    }
    std::vector<int> out(votes.size(), kUnassigned);
    for (std::size_t v = 0; v < votes.size(); ++v) {
        Index top = 0;
        for (const auto& [label, count] : votes[v]) {
            if (count > top) {  // map order: the first label reaching the top count is the smallest
                top = count;
                out[v] = label;
            }
        }
    }
    return out;
}

HgcValues hgc_values(const ComplexSlice& slice, int n, Index k, const SolverOptions& solver)
{
    if (k < 1) throw InputError("hgc: the eigenpair selection is empty (k = 0)");
    if (n < 0 || n > slice.max_dim()) throw InputError("hgc: degree " + std::to_string(n) + " out of range");
    const TypedSpectrum s = spectrum_at(slice, n, k, solver);
    HgcValues out;
    out.degree = n;
    out.eigenpairs = s.size();
    out.triples = MatrixXd::Zero(slice.size(n), 3);
    for (const auto& p : s.pairs) {
        // Column order H, G, Cu matches EigenType.
        const auto col = static_cast<Index>(p.type);
        out.triples.col(col) = out.triples.col(col).cwiseMax(p.vector.cwiseAbs());
        out.e_max = std::max(out.e_max, p.vector.cwiseAbs().maxCoeff());
    }
    if (out.e_max > 0.0) out.triples /= out.e_max;
    return out;
}

namespace {

std::string simplex_columns(int n)
{
    std::string out;
    for (int i = 0; i <= n; ++i) out += "v" + std::to_string(i) + ",";
    return out;
}

std::string simplex_fields(const Simplex& s)
{
    std::string out;
    for (VertexId v : s) out += std::to_string(v) + ",";
    return out;
}

nlohmann::json simplex_list(const ComplexSlice& slice, int n)
{
    nlohmann::json out = nlohmann::json::array();
    for (Index i = 0; i < slice.size(n); ++i) out.push_back(slice.simplex(n, i));
    return out;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string label_colour(int label)
{
    if (label < 0) return "#cccccc";
    return kPalette[label % 10];
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Shared drawing of a 2D slice: each n-simplex gets a colour from `colour_of`.
class Canvas {
public:
    explicit Canvas(const ComplexSlice& slice) : slice_(slice)
    {
        const auto& pts = slice.parent().points();
        if (!pts) throw InputError("SVG output needs vertex coordinates in the complex");
        if (pts->cols() != 2) throw InputError("SVG output supports 2D complexes only; use CSV or JSON");
        points_ = *pts;
        lo_ = points_.colwise().minCoeff();
        hi_ = points_.colwise().maxCoeff();
        const double span = std::max({hi_(0) - lo_(0), hi_(1) - lo_(1), 1e-12});
        scale_ = (kSize - 2 * kMargin) / span;
    }

    std::string x(VertexId v) const { return fmt(kMargin + (points_(v, 0) - lo_(0)) * scale_); }
    std::string y(VertexId v) const { return fmt(kSize - kMargin - (points_(v, 1) - lo_(1)) * scale_); }

    template <typename ColourOf>
    std::string draw(int n, ColourOf colour_of, const std::optional<std::vector<int>>& vertex_labels) const
    {
        std::ostringstream svg;
        svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kSize << "\" height=\"" << kSize
            << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << kSize << "\" height=\"" << kSize << "\" fill=\"white\"/>\n";
        if (n == 2) {
            svg << "<g stroke=\"none\">\n";
            for (Index i = 0; i < slice_.size(2); ++i) {
                const Simplex& s = slice_.simplex(2, i);
                svg << "<polygon fill=\"" << colour_of(i) << "\" points=\"" << x(s[0]) << ',' << y(s[0]) << ' ' << x(s[1])
                    << ',' << y(s[1]) << ' ' << x(s[2]) << ',' << y(s[2]) << "\"/>\n";
            }
            svg << "</g>\n";
        }
        svg << "<g stroke-width=\"" << (n == 1 ? "2" : "0.5") << "\" stroke-linecap=\"round\">\n";
        for (Index i = 0; i < slice_.size(1); ++i) {
            const Simplex& s = slice_.simplex(1, i);
            svg << "<line x1=\"" << x(s[0]) << "\" y1=\"" << y(s[0]) << "\" x2=\"" << x(s[1]) << "\" y2=\"" << y(s[1])
                << "\" stroke=\"" << (n == 1 ? colour_of(i) : std::string("#999999")) << "\"/>\n";
        }
        svg << "</g>\n<g stroke=\"none\">\n";
        for (Index i = 0; i < slice_.size(0); ++i) {
            const VertexId v = slice_.simplex(0, i)[0];
            std::string fill = "black";
            if (n == 0) fill = colour_of(i);
            else if (vertex_labels) fill = label_colour((*vertex_labels)[static_cast<std::size_t>(i)]);
            svg << "<circle cx=\"" << x(v) << "\" cy=\"" << y(v) << "\" r=\"" << (n == 0 || vertex_labels ? "3" : "1.5")
                << "\" fill=\"" << fill << "\"/>\n";
        }
        svg << "</g>\n</svg>\n";
        return svg.str();
    }

private:
    static constexpr int kSize = 800;
    static constexpr double kMargin = 20.0;
    const ComplexSlice& slice_;
    MatrixXd points_;
    Eigen::RowVectorXd lo_, hi_;
    double scale_ = 1.0;
};

}  // namespace

std::string labels_to_csv(const ClusterAssignment& assignment, const ComplexSlice& slice)
{
    std::string out = simplex_columns(assignment.degree) + "label\n";
    for (Index i = 0; i < slice.size(assignment.degree); ++i) {
        out += simplex_fields(slice.simplex(assignment.degree, i)) + std::to_string(assignment.labels[static_cast<std::size_t>(i)]) + "\n";
    }
    return out;
}

std::string vertex_labels_to_csv(const std::vector<int>& vertex_labels, const ComplexSlice& slice)
{
    if (static_cast<Index>(vertex_labels.size()) != slice.size(0)) throw InputError("vertex labels do not match the slice");
    std::string out = "vertex,label\n";
    for (Index i = 0; i < slice.size(0); ++i) {
        out += std::to_string(slice.simplex(0, i)[0]) + "," + std::to_string(vertex_labels[static_cast<std::size_t>(i)]) + "\n";
    }
    return out;
}

std::string labels_to_json(const ClusterAssignment& assignment, const ComplexSlice& slice,
                           const std::optional<std::vector<int>>& vertex_labels)
{
    nlohmann::json doc;
    doc["degree"] = assignment.degree;
    doc["clusters"] = assignment.clusters;
    doc["mode"] = std::string(to_string(assignment.mode));
    doc["threshold"] = slice.threshold();
    doc["eigenvalues"] = assignment.eigenvalues;
    doc["inertia"] = assignment.inertia;
    doc["degenerate"] = assignment.degenerate;
    doc["simplices"] = simplex_list(slice, assignment.degree);
    doc["labels"] = assignment.labels;
    if (vertex_labels) doc["vertex_labels"] = *vertex_labels;
    return doc.dump(2) + "\n";
}

std::string labels_to_svg(const ClusterAssignment& assignment, const ComplexSlice& slice,
                          const std::optional<std::vector<int>>& vertex_labels)
{
    if (assignment.degree > 2) throw InputError("SVG output draws simplices of dimension at most 2");
    return Canvas(slice).draw(
        assignment.degree, [&](Index i) { return label_colour(assignment.labels[static_cast<std::size_t>(i)]); }, vertex_labels);
}

std::string hgc_colour(double h, double g, double cu)
{
    auto channel = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    return "rgb(" + std::to_string(channel(cu)) + "," + std::to_string(channel(g)) + "," + std::to_string(channel(h)) + ")";
}

std::string hgc_to_csv(const HgcValues& values, const ComplexSlice& slice)
{
    std::string out = simplex_columns(values.degree) + "H,G,Cu\n";
    for (Index i = 0; i < slice.size(values.degree); ++i) {
        out += simplex_fields(slice.simplex(values.degree, i)) + format_double(values.triples(i, 0)) + "," +
               format_double(values.triples(i, 1)) + "," + format_double(values.triples(i, 2)) + "\n";
    }
    return out;
}

HgcTable parse_hgc_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError("HGC CSV: empty input");
    const auto tail = line.rfind(",H,G,Cu");
    if (tail == std::string::npos || tail + 7 != line.size() || line.rfind("v0", 0) != 0) throw InputError("HGC CSV: bad header");
    const auto vertices = static_cast<std::size_t>(std::count(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(tail), ',') + 1);
    HgcTable table;
    std::vector<std::array<double, 3>> rows;
    Index line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "HGC CSV line " + std::to_string(line_no);
        std::vector<std::string> f;
        std::stringstream fields(line);
        for (std::string field; std::getline(fields, field, ',');) f.push_back(field);
        if (f.size() != vertices + 3) throw InputError(where + ": expected " + std::to_string(vertices + 3) + " fields");
        Simplex s;
        for (std::size_t i = 0; i < vertices; ++i) {
            const double v = parse_double(f[i], where);
            if (v < 0 || v != std::floor(v) || v > std::numeric_limits<VertexId>::max()) throw InputError(where + ": bad vertex id");
            s.push_back(static_cast<VertexId>(v));
        }
        table.simplices.push_back(std::move(s));
        rows.push_back({parse_double(f[vertices], where), parse_double(f[vertices + 1], where), parse_double(f[vertices + 2], where)});
    }
    table.triples.resize(static_cast<Index>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < 3; ++j) table.triples(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
    return table;
}

std::string hgc_to_json(const HgcValues& values, const ComplexSlice& slice)
{
    nlohmann::json doc;
    doc["degree"] = values.degree;
    doc["threshold"] = slice.threshold();
    doc["eigenpairs"] = values.eigenpairs;
    doc["e_max"] = values.e_max;
    doc["simplices"] = simplex_list(slice, values.degree);
    nlohmann::json triples = nlohmann::json::array();
    for (Index i = 0; i < values.triples.rows(); ++i) {
        triples.push_back({{"H", values.triples(i, 0)}, {"G", values.triples(i, 1)}, {"Cu", values.triples(i, 2)}});
    }
    doc["values"] = std::move(triples);
    return doc.dump(2) + "\n";
}

std::string hgc_to_svg(const HgcValues& values, const ComplexSlice& slice)
{
    if (values.degree > 2) throw InputError("SVG output draws simplices of dimension at most 2");
    return Canvas(slice).draw(
        values.degree, [&](Index i) { return hgc_colour(values.triples(i, 0), values.triples(i, 1), values.triples(i, 2)); },
        std::nullopt);
}

void export_analysis(const ClusterAssignment& assignment, const ComplexSlice& slice, const std::filesystem::path& path,
                     AnalysisFormat format, const std::optional<std::vector<int>>& vertex_labels)
{
    switch (format) {
    case AnalysisFormat::Csv: write_text_atomic(path, labels_to_csv(assignment, slice)); break;
    case AnalysisFormat::Json: write_text_atomic(path, labels_to_json(assignment, slice, vertex_labels)); break;
    case AnalysisFormat::Svg: write_text_atomic(path, labels_to_svg(assignment, slice, vertex_labels)); break;
    }
}

void export_analysis(const HgcValues& values, const ComplexSlice& slice, const std::filesystem::path& path,
                     AnalysisFormat format)
{
    switch (format) {
    case AnalysisFormat::Csv: write_text_atomic(path, hgc_to_csv(values, slice)); break;
    case AnalysisFormat::Json: write_text_atomic(path, hgc_to_json(values, slice)); break;
    case AnalysisFormat::Svg: write_text_atomic(path, hgc_to_svg(values, slice)); break;
    }
}

}  // namespace hodge
