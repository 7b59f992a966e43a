#include "hodge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "hodge/io.hpp"

namespace hodge {

PointCloud parse_point_cloud_csv(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::vector<double> row;
        std::istringstream fields(line);
        std::string field;
        const std::string context = "point cloud line " + std::to_string(line_no);
        while (std::getline(fields, field, ',')) row.push_back(parse_double(field, context));
        if (!line.empty() && line.back() == ',') throw InputError(context + ": trailing comma");
        if (row.size() != 2 && row.size() != 3) {
            throw InputError(context + ": expected 2 or 3 coordinates, found " + std::to_string(row.size()));
        }
        for (double x : row) {
            if (!std::isfinite(x)) throw InputError(context + ": non-finite coordinate");
        }
        if (dim == 0) {
            dim = row.size();
        } else if (row.size() != dim) {
            throw InputError(context + ": dimension " + std::to_string(row.size()) + " differs from " +
                             std::to_string(dim) + " on earlier lines");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("point cloud: no points");

    PointCloud cloud;
    cloud.points.resize(static_cast<Index>(rows.size()), static_cast<Index>(dim));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < dim; ++j) cloud.points(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    check_distinct(cloud);
    return cloud;
}

PointCloud load_point_cloud(const std::filesystem::path& path)
{
    return parse_point_cloud_csv(read_text(path));
}

std::string point_cloud_to_csv(const PointCloud& cloud)
{
    std::string out;
    for (Index i = 0; i < cloud.size(); ++i) {
        for (Index j = 0; j < cloud.points.cols(); ++j) {
            if (j) out += ',';
            out += format_double(cloud.points(i, j));
        }
        out += '\n';
    }
    return out;
}

void check_distinct(const PointCloud& cloud)
{
    std::vector<Index> order(static_cast<std::size_t>(cloud.size()));
    std::iota(order.begin(), order.end(), Index{0});
    auto row_less = [&](Index a, Index b) {
        for (Index j = 0; j < cloud.points.cols(); ++j) {
            if (cloud.points(a, j) != cloud.points(b, j)) return cloud.points(a, j) < cloud.points(b, j);
        }
        return a < b;
    };
    std::sort(order.begin(), order.end(), row_less);
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (cloud.points.row(order[i - 1]) == cloud.points.row(order[i])) {
            throw InputError("point cloud: points " + std::to_string(order[i - 1]) + " and " +
                             std::to_string(order[i]) + " are identical");
        }
    }
}

FilteredComplex filtration_values(const Triangulation& tri, const PointCloud& cloud)
{
    auto radius_of = [&](const Simplex& s) {
        MatrixXd vertices(static_cast<Index>(s.size()), cloud.points.cols());
        for (std::size_t i = 0; i < s.size(); ++i) vertices.row(static_cast<Index>(i)) = cloud.points.row(s[i]);
        return circumradius(vertices);
    };

    std::vector<Simplex> simplices;
    std::vector<double> values;
    std::map<Simplex, double> edge_value;
    for (Index v = 0; v < tri.num_vertices; ++v) {
        simplices.push_back({static_cast<VertexId>(v)});
        values.push_back(0.0);
    }
    for (const auto& e : tri.edges) {
        double f = radius_of(e);
        edge_value.emplace(e, f);
        simplices.push_back(e);
        values.push_back(f);
    }
    for (const auto& t : tri.triangles) {
        double f = radius_of(t);
        for (const Simplex& face : {Simplex{t[0], t[1]}, Simplex{t[0], t[2]}, Simplex{t[1], t[2]}}) {
            f = std::max(f, edge_value.at(face));
        }
        simplices.push_back(t);
        values.push_back(f);
    }
    return FilteredComplex::from_simplices(std::move(simplices), std::move(values), cloud.points);
}

}  // namespace hodge
