#include "stc/cli/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stc::cli {

using nlohmann::json;

namespace {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

json mesh_to_json(const Mesh& mesh) {
  json vertices = json::array();
  for (const Point& v : mesh.vertices()) vertices.push_back({v.x, v.y});
  json cells = json::array();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    cells.push_back(json(std::vector<int>(cell.begin(), cell.end())));
  }
  json boundary = json::array();
  for (const auto& f : mesh.facets()) {
    json verts = json::array({f.vertices[0]});
    if (f.vertices[1] >= 0) verts.push_back(f.vertices[1]);
    boundary.push_back({{"vertices", verts}, {"measure", f.measure}, {"s_begin", f.s_begin}});
  }
  return {{"dimension", mesh.dim()},
          {"resolution", mesh.resolution()},
          {"vertices", vertices},
          {"cells", cells},
          {"boundary", boundary}};
}

json hole_to_json(const Mesh& mesh, const BoundaryHole& hole) {
  json arcs = json::array();
  if (mesh.dim() == 2) {
    for (const Arc& a : hole_arcs(mesh, hole)) arcs.push_back({{"start", a.start}, {"length", a.length}});
  }
  return {{"facets", std::vector<int>(hole.facets().begin(), hole.facets().end())},
          {"measure", hole.measure()},
          {"arcs", arcs}};
}

json domain_to_json(const Domain& domain) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Interval>) return {{"kind", "interval"}, {"a", d.a}, {"b", d.b}};
        if constexpr (std::is_same_v<T, Rectangle>) {
          return {{"kind", "rectangle"}, {"width", d.width}, {"height", d.height}};
        }
        if constexpr (std::is_same_v<T, Disk>) return {{"kind", "disk"}, {"radius", d.radius}};
        if constexpr (std::is_same_v<T, ThinRectangle>) {
          return {{"kind", "thin_rectangle"}, {"a", d.a}, {"b", d.b}, {"mu", d.mu}};
        }
      },
      domain);
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_for_write(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_extremal_csv(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> u) {
  std::vector<std::vector<double>> rows;
  rows.reserve(u.size());
  for (std::size_t v = 0; v < u.size(); ++v) rows.push_back({mesh.vertex(v).x, mesh.vertex(v).y, u[v]});
  write_csv(path, {"x", "y", "u"}, rows);
}

}  // namespace stc::cli
