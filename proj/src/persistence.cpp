#include "hodge/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hodge/errors.hpp"
#include "hodge/io.hpp"

namespace hodge {

FiltrationGrid FiltrationGrid::distinct(const FilteredComplex& complex, int degree, Index per_step,
                                        std::optional<Index> max_steps)
{
    FiltrationGrid grid;
    grid.degree = degree;
    grid.per_step = per_step;
    const std::vector<double> values = complex.distinct_values();
    if (values.empty()) throw InputError("filtration grid: the complex is empty");
    if (max_steps && *max_steps < 1) throw InputError("filtration grid: need at least one step");
    const auto n = static_cast<Index>(values.size());
    if (!max_steps || *max_steps >= n) {
        grid.thresholds = values;
    } else if (*max_steps == 1) {
        grid.thresholds = {values.back()};
    } else {
        const Index m = *max_steps;
        for (Index i = 0; i < m; ++i) {
            // Rounded to nearest; strictly increasing because m ≤ n.
            const Index idx = (2 * i * (n - 1) + (m - 1)) / (2 * (m - 1));
            grid.thresholds.push_back(values[static_cast<std::size_t>(idx)]);
        }
    }
    grid.validate();
    return grid;
}

FiltrationGrid FiltrationGrid::uniform(double lo, double hi, Index steps, int degree, Index per_step)
{
    if (steps < 1) throw InputError("filtration grid: need at least one step");
    if (!(hi > lo) && steps > 1) throw InputError("filtration grid: empty range");
    FiltrationGrid grid;
    grid.degree = degree;
    grid.per_step = per_step;
    if (steps == 1) {
        grid.thresholds = {hi};
    } else {
        for (Index i = 0; i < steps; ++i) {
            grid.thresholds.push_back(i + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
        }
    }
    grid.validate();
    return grid;
}

FiltrationGrid FiltrationGrid::geometric(double lo, double hi, Index steps, int degree, Index per_step)
{
    if (steps < 1) throw InputError("filtration grid: need at least one step");
    if (!(lo > 0)) throw InputError("filtration grid: geometric spacing needs a positive lower end");
    if (!(hi > lo) && steps > 1) throw InputError("filtration grid: empty range");
    FiltrationGrid grid;
    grid.degree = degree;
    grid.per_step = per_step;
    if (steps == 1) {
        grid.thresholds = {hi};
    } else {
        const double ratio = std::log(hi / lo);
        for (Index i = 0; i < steps; ++i) {
            grid.thresholds.push_back(i + 1 == steps ? hi : lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(steps - 1)));
        }
    }
    grid.validate();
    return grid;
}

FiltrationGrid FiltrationGrid::geometric(const FilteredComplex& complex, Index steps, int degree, Index per_step)
{
    const auto values = complex.distinct_values();
    const auto first = std::find_if(values.begin(), values.end(), [](double v) { return v > 0; });
    if (first == values.end()) throw InputError("filtration grid: no positive filtration values");
    if (steps > 1 && *first == values.back()) throw InputError("filtration grid: single positive filtration value");
    return geometric(*first, values.back(), steps, degree, per_step);
}

void FiltrationGrid::validate() const
{
    if (thresholds.empty()) throw InputError("filtration grid: no thresholds");
    if (degree < 0) throw InputError("filtration grid: negative degree");
    if (per_step < 1) throw InputError("filtration grid: eigenpair count must be positive");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!std::isfinite(thresholds[i]) || thresholds[i] < 0) {
            throw InputError("filtration grid: threshold " + format_double(thresholds[i]) + " is not a finite nonnegative value");
        }
        if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
            throw InputError("filtration grid: thresholds must be strictly ascending");
        }
    }
}

double pes(const VectorXd& v, const VectorXd& w)
{
    if (v.size() != w.size()) throw InputError("pes: vectors live in different spaces");
    const double nv = v.norm(), nw = w.norm();
    if (nv == 0.0 || nw == 0.0) throw InputError("pes: similarity with a zero vector is undefined");
    return std::min(1.0, std::abs(v.dot(w)) / (nv * nw));
}

double pes(const VectorXd& v, const VectorXd& w, const InclusionMap& iota)
{
    if (v.size() != iota.source_size()) throw InputError("pes: vector does not match the inclusion source");
    return pes(iota.apply(v), w);
}

MatrixXd pes_table(const MatrixXd& from, const MatrixXd& to, const InclusionMap& iota)
{
    if (from.rows() != iota.source_size() || to.rows() != iota.target_size()) {
        throw InputError("pes: eigenvector sets do not match the inclusion map");
    }
    const MatrixXd embedded = iota.apply_columns(from);
    const VectorXd nf = embedded.colwise().norm().transpose();
    const VectorXd nt = to.colwise().norm().transpose();
    if ((nf.array() == 0.0).any() || (nt.array() == 0.0).any()) {
        throw InputError("pes: similarity with a zero vector is undefined");
    }
    MatrixXd table = (embedded.transpose() * to).cwiseAbs();
    for (Index i = 0; i < table.rows(); ++i) {
        for (Index j = 0; j < table.cols(); ++j) table(i, j) = std::min(1.0, table(i, j) / (nf(i) * nt(j)));
    }
    return table;
}

namespace {

// Best index along one line of the table: highest PES, ties within kPesTieTolerance broken by
// lower eigenvalue, then lower index. Sets `tied` when a tie decided.
Index best_of(Index count, const std::function<double(Index)>& value, std::span<const double> lambda, bool& tied)
{
    tied = false;
    if (count == 0) return -1;
    double top = value(0);
    for (Index j = 1; j < count; ++j) top = std::max(top, value(j));
    Index best = -1;
    for (Index j = 0; j < count; ++j) {
        if (top - value(j) > kPesTieTolerance) continue;
        if (best < 0) {
            best = j;
            continue;
        }
        tied = true;
        if (lambda[static_cast<std::size_t>(j)] < lambda[static_cast<std::size_t>(best)]) best = j;
    }
    return best;
}

}  // namespace

Matching mutual_best(const MatrixXd& table, std::span<const double> lambda_from, std::span<const double> lambda_to,
                     double theta)
{
    if (static_cast<Index>(lambda_from.size()) != table.rows() || static_cast<Index>(lambda_to.size()) != table.cols()) {
        throw InputError("matching: eigenvalue lists do not match the PES table");
    }
    Matching out;
    std::vector<Index> row_best(static_cast<std::size_t>(table.rows())), col_best(static_cast<std::size_t>(table.cols()));
    for (Index i = 0; i < table.rows(); ++i) {
        bool tied = false;
        row_best[static_cast<std::size_t>(i)] = best_of(table.cols(), [&](Index j) { return table(i, j); }, lambda_to, tied);
        if (tied) out.tied_from.push_back(i);
    }
    for (Index j = 0; j < table.cols(); ++j) {
        bool tied = false;
        col_best[static_cast<std::size_t>(j)] = best_of(table.rows(), [&](Index i) { return table(i, j); }, lambda_from, tied);
        if (tied) out.tied_to.push_back(j);
    }
    std::vector<bool> to_used(static_cast<std::size_t>(table.cols()), false);
    for (Index i = 0; i < table.rows(); ++i) {
        const Index j = row_best[static_cast<std::size_t>(i)];
        if (j >= 0 && col_best[static_cast<std::size_t>(j)] == i && table(i, j) >= theta) {
            out.pairs.push_back({i, j, table(i, j)});
            to_used[static_cast<std::size_t>(j)] = true;
        } else {
            out.unmatched_from.push_back(i);
        }
    }
    for (Index j = 0; j < table.cols(); ++j) {
        if (!to_used[static_cast<std::size_t>(j)]) out.unmatched_to.push_back(j);
    }
    return out;
}

Matching pem(const TypedSpectrum& from, const TypedSpectrum& to, const InclusionMap& iota, double theta)
{
    if (from.degree != to.degree) throw InputError("matching: spectra of different degrees");
    if (from.threshold > to.threshold) throw InputError("matching: spectra must be ordered by threshold");
    std::vector<double> lf, lt;
    for (const auto& p : from.pairs) lf.push_back(p.lambda);
    for (const auto& p : to.pairs) lt.push_back(p.lambda);
    return mutual_best(pes_table(from.vectors(), to.vectors(), iota), lf, lt, theta);
}

EigenType Trajectory::dominant_type() const
{
    std::array<Index, 3> c{0, 0, 0};
    for (const auto& p : points) ++c[static_cast<std::size_t>(p.type)];
    return static_cast<EigenType>(std::max_element(c.begin(), c.end()) - c.begin());
}

std::vector<std::array<Index, 3>> TrajectorySet::step_counts() const
{
    Index steps = grid.steps();
    for (const auto& tr : trajectories) {
        for (const auto& p : tr.points) steps = std::max(steps, p.step);
    }
    std::vector<std::array<Index, 3>> out(static_cast<std::size_t>(steps), std::array<Index, 3>{0, 0, 0});
    for (const auto& tr : trajectories) {
        for (const auto& p : tr.points) ++out[static_cast<std::size_t>(p.step - 1)][static_cast<std::size_t>(p.type)];
    }
    return out;
}

TrajectorySet track(std::shared_ptr<const FilteredComplex> complex, const FiltrationGrid& grid, const TrackOptions& options)
{
    grid.validate();
    if (grid.degree > complex->max_dim()) {
        throw InputError("track: degree " + std::to_string(grid.degree) + " exceeds the complex dimension " +
                         std::to_string(complex->max_dim()));
    }
    if (!(options.theta >= 0.0 && options.theta <= 1.0)) throw InputError("track: theta must lie in [0, 1]");

    TrajectorySet set;
    set.grid = grid;
    set.theta = options.theta;
    std::vector<ComplexSlice> slices;
    for (Index s = 0; s < grid.steps(); ++s) {
        const double t = grid.thresholds[static_cast<std::size_t>(s)];
        slices.push_back(sublevel(complex, t));
        try {
            set.spectra.push_back(spectrum_at(slices.back(), grid.degree, grid.per_step, options.solver));
        } catch (const SolverError& e) {
            throw SolverError("track: step " + std::to_string(s + 1) + " (t = " + format_double(t) + "): " + e.what());
        }
    }

    auto point_at = [&](Index s, Index j, std::optional<double> similarity) {
        const auto& pair = set.spectra[static_cast<std::size_t>(s)].pairs[static_cast<std::size_t>(j)];
        return TrajectoryPoint{s + 1, grid.thresholds[static_cast<std::size_t>(s)], pair.lambda, pair.type, similarity, j};
    };
    auto open_trajectory = [&](Index s, Index j) {
        Trajectory tr;
        tr.id = static_cast<Index>(set.trajectories.size());
        tr.points.push_back(point_at(s, j, std::nullopt));
        set.trajectories.push_back(std::move(tr));
        return set.trajectories.back().id;
    };

    std::vector<Index> owner;
    for (Index j = 0; j < set.spectra.front().size(); ++j) owner.push_back(open_trajectory(0, j));

    for (Index s = 0; s + 1 < grid.steps(); ++s) {
        const auto& from = set.spectra[static_cast<std::size_t>(s)];
        const auto& to = set.spectra[static_cast<std::size_t>(s + 1)];
        const InclusionMap iota = inclusion_map(slices[static_cast<std::size_t>(s)], slices[static_cast<std::size_t>(s + 1)], grid.degree);
        Matching matching = pem(from, to, iota, options.theta);

        std::vector<std::optional<MatchedPair>> incoming(static_cast<std::size_t>(to.size()));
        for (const auto& m : matching.pairs) incoming[static_cast<std::size_t>(m.to)] = m;
        std::vector<Index> next(static_cast<std::size_t>(to.size()));
        for (Index j = 0; j < to.size(); ++j) {
            const auto& m = incoming[static_cast<std::size_t>(j)];
            if (m) {
                const Index id = owner[static_cast<std::size_t>(m->from)];
                set.trajectories[static_cast<std::size_t>(id)].points.push_back(point_at(s + 1, j, m->similarity));
                next[static_cast<std::size_t>(j)] = id;
            } else {
                next[static_cast<std::size_t>(j)] = open_trajectory(s + 1, j);
            }
        }
        owner = std::move(next);
        set.matchings.push_back(std::move(matching));
    }
    for (auto& tr : set.trajectories) tr.open = tr.death() == grid.steps();
    return set;
}

std::string trajectories_to_csv(const TrajectorySet& set)
{
    std::string out = "trajectory_id,step,t,lambda,type,pes_prev\n";
    for (const auto& tr : set.trajectories) {
        for (const auto& p : tr.points) {
            out += std::to_string(tr.id) + ',' + std::to_string(p.step) + ',' + format_double(p.t) + ',' +
                   format_double(p.lambda) + ',' + std::string(to_string(p.type)) + ',' +
                   (p.pes_prev ? format_double(*p.pes_prev) : std::string()) + '\n';
        }
    }
    return out;
}

namespace {

Index parse_index(const std::string& field, const std::string& context)
{
    Index value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw InputError(context + ": expected an integer, got '" + field + "'");
    }
    return value;
}

}  // namespace

TrajectorySet parse_trajectories_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "trajectory_id,step,t,lambda,type,pes_prev") {
        throw InputError("trajectory CSV: missing header");
    }
    TrajectorySet set;
    std::map<Index, double> step_t;
    Index line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "trajectory CSV line " + std::to_string(line_no);
        std::vector<std::string> f;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 6) throw InputError(where + ": expected 6 fields");
        TrajectoryPoint p;
        const Index id = parse_index(f[0], where);
        p.step = parse_index(f[1], where);
        p.t = parse_double(f[2], where);
        p.lambda = parse_double(f[3], where);
        try {
            p.type = parse_eigen_type(f[4]);
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        if (!f[5].empty()) p.pes_prev = parse_double(f[5], where);
        if (p.step < 1) throw InputError(where + ": steps are 1-based");

        if (set.trajectories.empty() || set.trajectories.back().id != id) {
            if (id != static_cast<Index>(set.trajectories.size())) throw InputError(where + ": trajectory ids must run 0, 1, 2, ...");
            set.trajectories.push_back(Trajectory{id, {}, false});
        } else if (set.trajectories.back().points.back().step + 1 != p.step) {
            throw InputError(where + ": steps within a trajectory must be consecutive");
        }
        auto [it, inserted] = step_t.emplace(p.step, p.t);
        if (!inserted && it->second != p.t) throw InputError(where + ": step " + f[1] + " has two thresholds");
        set.trajectories.back().points.push_back(p);
    }
    const Index last = step_t.empty() ? 0 : step_t.rbegin()->first;
    for (auto& tr : set.trajectories) tr.open = tr.death() == last;
    if (static_cast<Index>(step_t.size()) == last) {
        for (const auto& [step, t] : step_t) set.grid.thresholds.push_back(t);
    }
    return set;
}

std::string trajectories_to_json(const TrajectorySet& set)
{
    using nlohmann::json;
    json doc;
    doc["degree"] = set.grid.degree;
    doc["per_step"] = set.grid.per_step;
    doc["theta"] = set.theta;
    doc["thresholds"] = set.grid.thresholds;
    json counts = json::array();
    for (const auto& c : set.step_counts()) counts.push_back({{"harmonic", c[0]}, {"gradient", c[1]}, {"curl", c[2]}});
    doc["counts"] = std::move(counts);
    json trajectories = json::array();
    for (const auto& tr : set.trajectories) {
        json points = json::array();
        for (const auto& p : tr.points) {
            points.push_back({{"step", p.step},
                              {"t", p.t},
                              {"lambda", p.lambda},
                              {"type", std::string(to_string(p.type))},
                              {"pes_prev", p.pes_prev ? json(*p.pes_prev) : json(nullptr)}});
        }
        trajectories.push_back({{"id", tr.id},
                                {"birth", tr.birth()},
                                {"death", tr.death()},
                                {"open", tr.open},
                                {"dominant_type", std::string(to_string(tr.dominant_type()))},
                                {"points", std::move(points)}});
    }
    doc["trajectories"] = std::move(trajectories);
    json ties = json::array();
    for (std::size_t s = 0; s < set.matchings.size(); ++s) {
        const auto& m = set.matchings[s];
        if (m.tied_from.empty() && m.tied_to.empty()) continue;
        ties.push_back({{"step", s + 1}, {"from", m.tied_from}, {"to", m.tied_to}});
    }
    doc["ties"] = std::move(ties);
    return doc.dump(2) + "\n";
}

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const char* colour_of(EigenType type)
{
    switch (type) {
    case EigenType::Harmonic: return "blue";
    case EigenType::Gradient: return "green";
    case EigenType::Curl: return "red";
    }
    return "black";
}

}  // namespace

std::string trajectories_to_svg(const TrajectorySet& set)
{
    const auto counts = set.step_counts();
    const auto steps = static_cast<Index>(counts.size());
    double lambda_top = 0.0;
    Index count_top = 1;
    for (const auto& tr : set.trajectories) {
        for (const auto& p : tr.points) lambda_top = std::max(lambda_top, p.lambda);
    }
    for (const auto& c : counts) count_top = std::max({count_top, c[0], c[1], c[2]});
    if (lambda_top <= 0.0) lambda_top = 1.0;

    constexpr double left = 60, right = 760, chart_top = 30, chart_bottom = 380, panel_top = 430, panel_bottom = 570;
    auto x_of = [&](Index step) {
        return steps <= 1 ? 0.5 * (left + right)
                          : left + (right - left) * static_cast<double>(step - 1) / static_cast<double>(steps - 1);
    };
    auto y_of = [&](double lambda) { return chart_bottom - (chart_bottom - chart_top) * lambda / lambda_top; };
    auto y_count = [&](Index c) {
        return panel_bottom - (panel_bottom - panel_top) * static_cast<double>(c) / static_cast<double>(count_top);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
        << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
        << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(chart_bottom) << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(chart_bottom) << "\"/>\n"
        << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(chart_top) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(chart_bottom) << "\"/>\n"
        << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(panel_bottom) << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(panel_bottom) << "\"/>\n"
        << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(panel_top) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(panel_bottom) << "\"/>\n"
        << "</g>\n"
        << "<g font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<text x=\"" << fmt(left) << "\" y=\"20\">eigenvalue (max " << fmt(lambda_top) << ")</text>\n"
        << "<text x=\"" << fmt(left) << "\" y=\"420\">count among the smallest " << set.grid.per_step << " (max " << count_top << ")</text>\n"
        << "<text x=\"" << fmt(right - 80) << "\" y=\"595\">filtration step</text>\n"
        << "</g>\n";

    svg << "<g fill=\"none\" stroke-width=\"1.5\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
    for (const auto& tr : set.trajectories) {
        svg << "<path id=\"trajectory-" << tr.id << "\" stroke=\"" << colour_of(tr.dominant_type()) << "\" d=\"";
        for (std::size_t i = 0; i < tr.points.size(); ++i) {
            svg << (i == 0 ? "M" : " L") << fmt(x_of(tr.points[i].step)) << ' ' << fmt(y_of(tr.points[i].lambda));
        }
        if (tr.points.size() == 1) svg << " h 0";
        svg << "\"/>\n";
    }
    svg << "</g>\n";

    svg << "<g fill=\"none\" stroke-width=\"2\">\n";
    for (int type = 0; type < 3; ++type) {
        svg << "<polyline stroke=\"" << colour_of(static_cast<EigenType>(type)) << "\" points=\"";
        for (Index s = 0; s < steps; ++s) {
            svg << (s == 0 ? "" : " ") << fmt(x_of(s + 1)) << ',' << fmt(y_count(counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(type)]));
        }
        svg << "\"/>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void export_diagram(const TrajectorySet& set, const std::filesystem::path& path, DiagramFormat format)
{
    if (set.trajectories.empty()) throw InputError("export: no trajectories to write");
    switch (format) {
    case DiagramFormat::Csv: write_text_atomic(path, trajectories_to_csv(set)); break;
    case DiagramFormat::Json: write_text_atomic(path, trajectories_to_json(set)); break;
    case DiagramFormat::Svg: write_text_atomic(path, trajectories_to_svg(set)); break;
    }
}

}  // namespace hodge
