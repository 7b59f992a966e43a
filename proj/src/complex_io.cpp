#include <json.hpp>

#include "hodge/complex.hpp"
#include "hodge/errors.hpp"
#include "hodge/io.hpp"

namespace hodge {

using nlohmann::json;

FilteredComplex parse_complex_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("complex json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("simplices") || !doc.contains("values")) {
        throw InputError("complex json: expected an object with \"simplices\" and \"values\"");
    }
    const auto& simplices_json = doc["simplices"];
    const auto& values_json = doc["values"];
    if (!simplices_json.is_array() || !values_json.is_array()) {
        throw InputError("complex json: \"simplices\" and \"values\" must be arrays");
    }

    std::vector<Simplex> simplices;
    std::vector<double> values;
    simplices.reserve(simplices_json.size());
    values.reserve(values_json.size());
    try {
        for (const auto& s : simplices_json) simplices.push_back(s.get<Simplex>());
        for (const auto& v : values_json) values.push_back(v.get<double>());
    } catch (const json::exception& e) {
        throw InputError(std::string("complex json: ") + e.what());
    }

    std::optional<MatrixXd> points;
    if (doc.contains("points")) {
        const auto& pts = doc["points"];
        if (!pts.is_array() || pts.empty()) throw InputError("complex json: \"points\" must be a non-empty array");
        const auto dim = pts[0].size();
        points = MatrixXd(static_cast<Index>(pts.size()), static_cast<Index>(dim));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!pts[i].is_array() || pts[i].size() != dim) {
                throw InputError("complex json: point " + std::to_string(i) + " has inconsistent dimension");
            }
            for (std::size_t j = 0; j < dim; ++j) {
                (*points)(static_cast<Index>(i), static_cast<Index>(j)) = pts[i][j].get<double>();
            }
        }
    }
    return FilteredComplex::from_simplices(std::move(simplices), std::move(values), std::move(points));
}

FilteredComplex import_complex(const std::filesystem::path& path)
{
    return parse_complex_json(read_text(path));
}

std::string complex_to_json(const FilteredComplex& complex)
{
    json simplices = json::array();
    json values = json::array();
    for (int k = 0; k <= complex.max_dim(); ++k) {
        for (Index i = 0; i < complex.size(k); ++i) {
            simplices.push_back(complex.simplex(k, i));
            values.push_back(complex.value(k, i));
        }
    }
    json doc;
    doc["simplices"] = std::move(simplices);
    doc["values"] = std::move(values);
    if (const auto& pts = complex.points()) {
        json rows = json::array();
        for (Index i = 0; i < pts->rows(); ++i) {
            json row = json::array();
            for (Index j = 0; j < pts->cols(); ++j) row.push_back((*pts)(i, j));
            rows.push_back(std::move(row));
        }
        doc["points"] = std::move(rows);
    }
    return doc.dump() + "\n";
}

}  // namespace hodge
