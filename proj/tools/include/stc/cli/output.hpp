#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stc/fem.hpp"
#include "stc/geometry.hpp"

namespace stc::cli {

/// {dimension, resolution, vertices: [[x,y]], cells: [[i,j(,k)]],
///  boundary: [{vertices, measure, s_begin}]}
nlohmann::json mesh_to_json(const Mesh& mesh);

/// {facets, measure, arcs: [{start, length}]}
nlohmann::json hole_to_json(const Mesh& mesh, const BoundaryHole& hole);

nlohmann::json domain_to_json(const Domain& domain);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Plain CSV with a header row; values printed with 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Vertex coordinates and nodal values: x,y,u.
void write_extremal_csv(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> u);

}  // namespace stc::cli
