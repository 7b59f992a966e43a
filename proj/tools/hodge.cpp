#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hodge/analysis.hpp"
#include "hodge/complex.hpp"
#include "hodge/errors.hpp"
#include "hodge/geometry.hpp"
#include "hodge/io.hpp"
#include "hodge/persistence.hpp"
#include "hodge/random.hpp"
#include "hodge/spectral.hpp"
#include "hodge/synthetic.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace hodge;
using cli::Manifest;

namespace {

enum Exit { kOk = 0, kInput = 1, kDegenerate = 2, kInternal = 3 };

// Accepts "inf" and the usual decimal forms.
double parse_threshold(const std::string& text)
{
    if (text == "inf" || text == "infinity" || text == "+inf") return std::numeric_limits<double>::infinity();
    const double t = parse_double(text, "--t");
    if (std::isnan(t) || t < 0) throw InputError("--t must be nonnegative");
    return t;
}

fs::path sibling(const fs::path& primary, const std::string& extension)
{
    fs::path p = primary;
    return p.replace_extension(extension);
}

bool planar(const FilteredComplex& complex) { return complex.points() && complex.points()->cols() == 2; }

std::shared_ptr<const FilteredComplex> load_complex(const fs::path& path)
{
    return std::make_shared<const FilteredComplex>(import_complex(path));
}

void spectral_tolerances(nlohmann::json& tol)
{
    tol["zero_eigenvalue"] = "1e-9 * max(1, lambda_max)";
    tol["classification_residual"] = "1e-7 * max(1, lambda_max)";
    tol["eigen_residual"] = "1e-8 * max(1, lambda_max)";
}

struct Common {
    fs::path input;
    fs::path output;
};


struct GenerateArgs {
    std::string preset = "four-disks";
    Index n = 400;
    std::uint64_t seed = 7;
    double radius = 1.0;
    fs::path output;
};

void run_generate(const GenerateArgs& a)
{
    Manifest m("generate");
    PresetShape shape;
    shape.radius = a.radius;
    shape.annulus_outer = 1.6 * a.radius;
    const SyntheticCloud cloud = generate(parse_preset(a.preset), a.n, a.seed, shape);
    write_text_atomic(a.output, point_cloud_to_csv(cloud.cloud));
    m.parameters() = {{"preset", a.preset}, {"n", a.n}, {"seed", a.seed}, {"radius", a.radius},
                      {"annulus_outer", shape.annulus_outer}, {"generator", std::string(Rng::kName)}};
    m.output(a.output);
    m.write(a.output);
}


void run_triangulate(const Common& a)
{
    Manifest m("triangulate");
    m.input(a.input);
    const PointCloud cloud = load_point_cloud(a.input);
    const FilteredComplex complex = filtration_values(delaunay_2d(cloud), cloud);
    write_text_atomic(a.output, complex_to_json(complex));
    m.parameters() = {{"points", cloud.size()}, {"filtration", "circumradius, monotone over faces"}};
    m.output(a.output);
    m.write(a.output);
}


struct SpectrumArgs : Common {
    std::string t = "inf";
    int dim = 1;
    std::optional<Index> num;
    bool vectors = false;
};

void run_spectrum(const SpectrumArgs& a)
{
    Manifest m("spectrum");
    m.input(a.input);
    const double t = parse_threshold(a.t);
    auto complex = load_complex(a.input);
    if (a.num && *a.num < 1) throw InputError("--num must be positive");
    const TypedSpectrum s = spectrum_at(sublevel(complex, t), a.dim, a.num);
    write_text_atomic(a.output, spectrum_to_json(s, a.vectors));
    m.parameters() = {{"t", a.t}, {"dim", a.dim}, {"vectors", a.vectors}};
    m.parameters()["num"] = a.num ? nlohmann::json(*a.num) : nlohmann::json(nullptr);
    spectral_tolerances(m.tolerances());
    m.tolerances()["zero_eigenvalue_value"] = s.tolerances.zero;
    m.tolerances()["classification_residual_value"] = s.tolerances.residual;
    m.output(a.output);
    m.write(a.output);
}


struct TrackArgs : Common {
    int dim = 1;
    Index num = 40;
    Index steps = 30;
    double theta = 0.5;
    std::string grid = "geometric";
    std::optional<fs::path> svg;
    std::optional<fs::path> json;
};

void run_track(const TrackArgs& a)
{
    Manifest m("track");
    m.input(a.input);
    auto complex = load_complex(a.input);
    if (!(a.theta > 0 && a.theta <= 1)) throw InputError("--theta must lie in (0, 1]");
    FiltrationGrid grid;
    if (a.grid == "distinct") {
        grid = FiltrationGrid::distinct(*complex, a.dim, a.num, a.steps);
    } else if (a.grid == "geometric") {
        grid = FiltrationGrid::geometric(*complex, a.steps, a.dim, a.num);
    } else if (a.grid == "uniform") {
        const auto values = complex->distinct_values();
        grid = FiltrationGrid::uniform(values.front(), values.back(), a.steps, a.dim, a.num);
    } else {
        throw InputError("unknown --grid '" + a.grid + "'");
    }
    TrackOptions options;
    options.theta = a.theta;
    const TrajectorySet set = track(complex, grid, options);

    const fs::path svg = a.svg.value_or(sibling(a.output, ".svg"));
    write_text_atomic(a.output, trajectories_to_csv(set));
    write_text_atomic(svg, trajectories_to_svg(set));
    m.output(a.output);
    m.output(svg);
    if (a.json) {
        write_text_atomic(*a.json, trajectories_to_json(set));
        m.output(*a.json);
    }
    m.parameters() = {{"dim", a.dim}, {"num", a.num}, {"steps", a.steps}, {"theta", a.theta},
                      {"grid", a.grid}, {"thresholds", grid.thresholds}};
    spectral_tolerances(m.tolerances());
    m.tolerances()["pes_tie"] = kPesTieTolerance;
    m.write(a.output);
}


struct ClusterArgs : Common {
    std::string t = "inf";
    int dim = 1;
    std::string mode = "curl";
    Index num_eigvecs = 4;
    int clusters = 4;
    std::uint64_t seed = 0;
    bool nodes = false;
    std::optional<fs::path> svg;
};

void run_cluster(const ClusterArgs& a)
{
    Manifest m("cluster");
    m.input(a.input);
    const double t = parse_threshold(a.t);
    auto complex = load_complex(a.input);
    const ComplexSlice slice = sublevel(complex, t);
    const ClusterAssignment assignment =
        hodge_spectral_clustering(slice, a.dim, a.num_eigvecs, a.clusters, parse_cluster_mode(a.mode), a.seed);
    std::optional<std::vector<int>> vertex_labels;
    if (a.nodes) vertex_labels = node_clustering(assignment, slice);

    write_text_atomic(a.output, labels_to_csv(assignment, slice));
    m.output(a.output);
    if (vertex_labels) {
        const fs::path nodes = sibling(a.output, ".nodes.csv");
        write_text_atomic(nodes, vertex_labels_to_csv(*vertex_labels, slice));
        m.output(nodes);
    }
    if (planar(*complex) && a.dim <= 2) {
        const fs::path svg = a.svg.value_or(sibling(a.output, ".svg"));
        write_text_atomic(svg, labels_to_svg(assignment, slice, vertex_labels));
        m.output(svg);
    } else if (a.svg) {
        throw InputError("SVG output needs a complex with 2D points");
    }
    m.parameters() = {{"t", a.t}, {"dim", a.dim}, {"mode", a.mode}, {"num_eigvecs", a.num_eigvecs},
                      {"clusters", a.clusters}, {"seed", a.seed}, {"nodes", a.nodes},
                      {"kmeans", {{"restarts", 10}, {"max_iterations", 300}, {"tolerance", 1e-10}}}};
    m.parameters()["eigenvalues"] = assignment.eigenvalues;
    m.parameters()["inertia"] = assignment.inertia;
    spectral_tolerances(m.tolerances());
    m.write(a.output);
}


struct HgcArgs : Common {
    std::string t = "inf";
    int dim = 1;
    Index num = 40;
    std::optional<fs::path> svg;
};

void run_hgc(const HgcArgs& a)
{
    Manifest m("hgc");
    m.input(a.input);
    const double t = parse_threshold(a.t);
    auto complex = load_complex(a.input);
    const ComplexSlice slice = sublevel(complex, t);
    const HgcValues values = hgc_values(slice, a.dim, a.num);
    write_text_atomic(a.output, hgc_to_csv(values, slice));
    m.output(a.output);
    if (planar(*complex) && a.dim <= 2) {
        const fs::path svg = a.svg.value_or(sibling(a.output, ".svg"));
        write_text_atomic(svg, hgc_to_svg(values, slice));
        m.output(svg);
    } else if (a.svg) {
        throw InputError("SVG output needs a complex with 2D points");
    }
    m.parameters() = {{"t", a.t}, {"dim", a.dim}, {"num", a.num}, {"eigenpairs", values.eigenpairs},
                      {"e_max", values.e_max}};
    spectral_tolerances(m.tolerances());
    m.write(a.output);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hodge Laplacian spectra, eigenvector tracking and edge clustering on alpha complexes"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "synthetic point cloud CSV");
    g->add_option("--preset", gen.preset, "four-disks | annulus | two-clusters")->capture_default_str();
    g->add_option("--n", gen.n, "number of points")->capture_default_str();
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--radius", gen.radius, "disk radius / inner annulus radius")->capture_default_str();
    g->add_option("-o,--out", gen.output)->required();

    Common tri;
    auto* tr = app.add_subcommand("triangulate", "point cloud CSV to filtered alpha complex JSON");
    tr->add_option("input", tri.input)->required();
    tr->add_option("-o,--out", tri.output)->required();

    SpectrumArgs spec;
    auto* sp = app.add_subcommand("spectrum", "typed Hodge Laplacian spectrum at one threshold");
    sp->add_option("input", spec.input)->required();
    sp->add_option("--t", spec.t, "threshold on circumradius, or inf")->capture_default_str();
    sp->add_option("--dim", spec.dim)->capture_default_str();
    sp->add_option("--num", spec.num, "smallest eigenpairs to keep (default all)");
    sp->add_flag("--vectors", spec.vectors, "include eigenvectors");
    sp->add_option("-o,--out", spec.output)->required();

    TrackArgs trk;
    auto* tk = app.add_subcommand("track", "eigenvector trajectories across the filtration");
    tk->add_option("input", trk.input)->required();
    tk->add_option("--dim", trk.dim)->capture_default_str();
    tk->add_option("--num", trk.num, "eigenpairs per step")->capture_default_str();
    tk->add_option("--steps", trk.steps)->capture_default_str();
    tk->add_option("--theta", trk.theta, "matching threshold")->capture_default_str();
    tk->add_option("--grid", trk.grid, "geometric | uniform | distinct")->capture_default_str();
    tk->add_option("--svg", trk.svg, "diagram path (default: output with .svg)");
    tk->add_option("--json", trk.json, "also write trajectories as JSON");
    tk->add_option("-o,--out", trk.output)->required();

    ClusterArgs clu;
    auto* cl = app.add_subcommand("cluster", "Hodge spectral clustering of n-simplices");
    cl->add_option("input", clu.input)->required();
    cl->add_option("--t", clu.t)->capture_default_str();
    cl->add_option("--dim", clu.dim)->capture_default_str();
    cl->add_option("--mode", clu.mode, "gradient | harmonic | curl | total")->capture_default_str();
    cl->add_option("--num-eigvecs", clu.num_eigvecs)->capture_default_str();
    cl->add_option("--clusters", clu.clusters)->capture_default_str();
    cl->add_option("--seed", clu.seed)->capture_default_str();
    cl->add_flag("--nodes", clu.nodes, "also write majority vertex labels");
    cl->add_option("--svg", clu.svg);
    cl->add_option("-o,--out", clu.output)->required();

    HgcArgs hg;
    auto* hc = app.add_subcommand("hgc", "harmonic/gradient/curl values per simplex");
    hc->add_option("input", hg.input)->required();
    hc->add_option("--t", hg.t)->capture_default_str();
    hc->add_option("--dim", hg.dim)->capture_default_str();
    hc->add_option("--num", hg.num)->capture_default_str();
    hc->add_option("--svg", hg.svg);
    hc->add_option("-o,--out", hg.output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    try {
        if (*g) run_generate(gen);
        if (*tr) run_triangulate(tri);
        if (*sp) run_spectrum(spec);
        if (*tk) run_track(trk);
        if (*cl) run_cluster(clu);
        if (*hc) run_hgc(hg);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const DegeneracyError& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kOk;
}
