#include "stc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace stc {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int steps_for(double length, double resolution) {
  return static_cast<int>(std::ceil(length / resolution - 1e-12));
}

struct RectFrame {
  double x0, y0, w, h;
};

std::optional<RectFrame> rect_frame(const Domain& domain) {
  if (auto r = std::get_if<Rectangle>(&domain)) return RectFrame{0.0, 0.0, r->width, r->height};
  if (auto t = std::get_if<ThinRectangle>(&domain)) return RectFrame{t->a, 0.0, t->b - t->a, t->mu};
  return std::nullopt;
}

Mesh build_interval(const Interval& iv, const Domain& domain, double resolution) {
  const int n = steps_for(iv.b - iv.a, resolution);
  if (n < 4) {
    throw GeometryError("resolution too coarse: interval needs at least 4 cells, got " +
                        std::to_string(n));
  }
  std::vector<Point> vertices(n + 1);
  for (int i = 0; i <= n; ++i) vertices[i] = {iv.a + (iv.b - iv.a) * i / n, 0.0};
  std::vector<int> cells;
  cells.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    cells.push_back(i);
    cells.push_back(i + 1);
  }
  std::vector<BoundaryFacet> facets(2);
  facets[0].vertices = {0, -1};
  facets[1].vertices = {n, -1};
  return Mesh(domain, resolution, std::move(vertices), std::move(cells), std::move(facets),
              /*closed_boundary=*/false);
}

Mesh build_rectangle(const RectFrame& fr, int nx, int ny, const Domain& domain,
                     double resolution) {
  if (2 * (nx + ny) < 4) throw GeometryError("resolution too coarse: fewer than 4 boundary facets");
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Point> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Exact edge coordinates so the perimeter sums without drift.
      const double x = (i == nx) ? fr.x0 + fr.w : fr.x0 + fr.w * i / nx;
      const double y = (j == ny) ? fr.y0 + fr.h : fr.y0 + fr.h * j / ny;
      vertices.push_back({x, y});
    }
  }
  std::vector<int> cells;
  cells.reserve(6 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        cells.insert(cells.end(), {v00, v10, v11, v00, v11, v01});
      } else {
        cells.insert(cells.end(), {v00, v10, v01, v10, v11, v01});
      }
    }
  }
  std::vector<BoundaryFacet> facets;
  facets.reserve(2 * (nx + ny));
  auto add = [&facets](int a, int b) {
    BoundaryFacet f;
    f.vertices = {a, b};
    facets.push_back(f);
  };
  for (int i = 0; i < nx; ++i) add(id(i, 0), id(i + 1, 0));
  for (int j = 0; j < ny; ++j) add(id(nx, j), id(nx, j + 1));
  for (int i = nx; i > 0; --i) add(id(i, ny), id(i - 1, ny));
  for (int j = ny; j > 0; --j) add(id(0, j), id(0, j - 1));
  return Mesh(domain, resolution, std::move(vertices), std::move(cells), std::move(facets),
              /*closed_boundary=*/true);
}

Mesh build_disk(const Disk& disk, const Domain& domain, double resolution) {
  const double r = disk.radius;
  const int rings = std::max(1, steps_for(2.0 * kPi * r / 6.0, resolution));
  std::vector<Point> vertices{{0.0, 0.0}};
  std::vector<int> ring_start{0};
  for (int k = 1; k <= rings; ++k) {
    ring_start.push_back(static_cast<int>(vertices.size()));
    const int n = 6 * k;
    const double rho = (k == rings) ? r : r * k / rings;
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * kPi * j / n;
      vertices.push_back({rho * std::cos(theta), rho * std::sin(theta)});
    }
  }
  std::vector<int> cells;
  for (int j = 0; j < 6; ++j) {
    cells.insert(cells.end(), {0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});
  }
  for (int k = 2; k <= rings; ++k) {
    const int ni = 6 * (k - 1), no = 6 * k;
    const int si = ring_start[k - 1], so = ring_start[k];
    int i = 0, j = 0;
    while (i < ni || j < no) {
      const double next_inner = static_cast<double>(i + 1) / ni;
      const double next_outer = static_cast<double>(j + 1) / no;
      if (j < no && (i == ni || next_outer <= next_inner + 1e-14)) {
        cells.insert(cells.end(), {si + i % ni, so + j, so + (j + 1) % no});
        ++j;
      } else {
        cells.insert(cells.end(), {si + i, so + j % no, si + (i + 1) % ni});
        ++i;
      }
    }
  }
  std::vector<BoundaryFacet> facets;
  const int nb = 6 * rings;
  const int sb = ring_start[rings];
  for (int j = 0; j < nb; ++j) {
    BoundaryFacet f;
    f.vertices = {sb + j, sb + (j + 1) % nb};
    facets.push_back(f);
  }
  return Mesh(domain, resolution, std::move(vertices), std::move(cells), std::move(facets),
              /*closed_boundary=*/true);
}

}  // namespace

double norm(Point a) { return std::hypot(a.x, a.y); }

void validate(const Domain& domain) {
  std::visit(Overloaded{
                 [](const Interval& d) {
                   if (!(d.a < d.b)) throw GeometryError("interval requires a < b");
                 },
                 [](const Rectangle& d) {
                   if (!(d.width > 0 && d.height > 0))
                     throw GeometryError("rectangle requires positive width and height");
                 },
                 [](const Disk& d) {
                   if (!(d.radius > 0)) throw GeometryError("disk requires positive radius");
                 },
                 [](const ThinRectangle& d) {
                   if (!(d.a < d.b)) throw GeometryError("thin rectangle requires a < b");
                   if (!(d.mu > 0)) throw GeometryError("thin rectangle requires mu > 0");
                 },
             },
             domain);
}

int dimension(const Domain& domain) { return std::holds_alternative<Interval>(domain) ? 1 : 2; }

std::string kind_name(const Domain& domain) {
  return std::visit(Overloaded{
                        [](const Interval&) { return std::string("interval"); },
                        [](const Rectangle&) { return std::string("rectangle"); },
                        [](const Disk&) { return std::string("disk"); },
                        [](const ThinRectangle&) { return std::string("thin_rectangle"); },
                    },
                    domain);
}

double volume(const Domain& domain) {
  return std::visit(Overloaded{
                        [](const Interval& d) { return d.b - d.a; },
                        [](const Rectangle& d) { return d.width * d.height; },
                        [](const Disk& d) { return kPi * d.radius * d.radius; },
                        [](const ThinRectangle& d) { return (d.b - d.a) * d.mu; },
                    },
                    domain);
}

double perimeter(const Domain& domain) {
  return std::visit(Overloaded{
                        [](const Interval&) { return 2.0; },
                        [](const Rectangle& d) { return 2.0 * (d.width + d.height); },
                        [](const Disk& d) { return 2.0 * kPi * d.radius; },
                        [](const ThinRectangle& d) { return 2.0 * (d.b - d.a) + 2.0 * d.mu; },
                    },
                    domain);
}

Mesh::Mesh(Domain domain, double resolution, std::vector<Point> vertices, std::vector<int> cells,
           std::vector<BoundaryFacet> facets, bool closed_boundary)
    : domain_(std::move(domain)),
      dim_(dimension(domain_)),
      resolution_(resolution),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      facets_(std::move(facets)),
      closed_boundary_(closed_boundary) {
  const std::size_t stride = dim_ + 1;
  // Orient cells positively.
  for (std::size_t c = 0; c < cells_.size() / stride; ++c) {
    int* v = cells_.data() + c * stride;
    if (dim_ == 1) {
      if (vertices_[v[1]].x < vertices_[v[0]].x) std::swap(v[0], v[1]);
    } else {
      const Point e1 = vertices_[v[1]] - vertices_[v[0]];
      const Point e2 = vertices_[v[2]] - vertices_[v[0]];
      if (e1.x * e2.y - e1.y * e2.x < 0) std::swap(v[1], v[2]);
    }
  }

  // Facet-to-cell incidence and conformity.
  if (dim_ == 2) {
    std::map<std::pair<int, int>, std::vector<int>> edge_cells;
    for (std::size_t c = 0; c < num_cells(); ++c) {
      auto v = cell(c);
      for (int k = 0; k < 3; ++k) {
        int a = v[k], b = v[(k + 1) % 3];
        if (a > b) std::swap(a, b);
        edge_cells[{a, b}].push_back(static_cast<int>(c));
      }
    }
    for (const auto& [edge, owners] : edge_cells) {
      if (owners.size() > 2) throw GeometryError("non-conforming mesh: edge shared by >2 cells");
    }
    for (auto& f : facets_) {
      int a = f.vertices[0], b = f.vertices[1];
      if (a > b) std::swap(a, b);
      auto it = edge_cells.find({a, b});
      if (it == edge_cells.end() || it->second.size() != 1) {
        throw GeometryError("boundary facet must belong to exactly one cell");
      }
      f.cell = it->second.front();
    }
  } else {
    for (auto& f : facets_) {
      for (std::size_t c = 0; c < num_cells(); ++c) {
        auto v = cell(c);
        if (v[0] == f.vertices[0] || v[1] == f.vertices[0]) {
          f.cell = static_cast<int>(c);
          break;
        }
      }
    }
  }

  compute_geometry();

  double s = 0.0;
  for (auto& f : facets_) {
    f.s_begin = s;
    s += f.measure;
  }
  vertex_arclength_.assign(vertices_.size(), -1.0);
  for (const auto& f : facets_) vertex_arclength_[f.vertices[0]] = f.s_begin;
}

void Mesh::compute_geometry() {
  cell_measure_.resize(num_cells());
  for (std::size_t c = 0; c < num_cells(); ++c) {
    auto v = cell(c);
    if (dim_ == 1) {
      cell_measure_[c] = vertices_[v[1]].x - vertices_[v[0]].x;
    } else {
      const Point e1 = vertices_[v[1]] - vertices_[v[0]];
      const Point e2 = vertices_[v[2]] - vertices_[v[0]];
      cell_measure_[c] = 0.5 * (e1.x * e2.y - e1.y * e2.x);
    }
    if (!(cell_measure_[c] > 0)) throw GeometryError("degenerate or inverted cell");
  }
  boundary_measure_ = 0.0;
  for (auto& f : facets_) {
    if (dim_ == 1) {
      f.measure = 1.0;
      auto v = cell(f.cell);
      const int other = (v[0] == f.vertices[0]) ? v[1] : v[0];
      f.normal = {vertices_[f.vertices[0]].x < vertices_[other].x ? -1.0 : 1.0, 0.0};
    } else {
      const Point e = vertices_[f.vertices[1]] - vertices_[f.vertices[0]];
      f.measure = norm(e);
      f.normal = {e.y / f.measure, -e.x / f.measure};
    }
    boundary_measure_ += f.measure;
  }
}

double Mesh::total_volume() const {
  double v = 0.0;
  for (double m : cell_measure_) v += m;
  return v;
}

double Mesh::max_facet_measure() const {
  double m = 0.0;
  for (const auto& f : facets_) m = std::max(m, f.measure);
  return m;
}

std::optional<double> Mesh::vertex_arclength(std::size_t v) const {
  if (vertex_arclength_[v] < 0.0) return std::nullopt;
  return vertex_arclength_[v];
}

Mesh Mesh::deformed(std::span<const Point> new_vertices) const {
  if (new_vertices.size() != vertices_.size()) {
    throw GeometryError("deformed mesh needs one position per vertex");
  }
  Mesh out = *this;
  out.vertices_.assign(new_vertices.begin(), new_vertices.end());
  out.compute_geometry();
  return out;
}

Mesh generate_mesh(const Domain& domain, double resolution) {
  validate(domain);
  if (!(resolution > 0)) throw GeometryError("resolution must be positive");
  return std::visit(
      Overloaded{
          [&](const Interval& d) { return build_interval(d, domain, resolution); },
          [&](const Rectangle& d) {
            return build_rectangle(*rect_frame(domain), std::max(1, steps_for(d.width, resolution)),
                                   std::max(1, steps_for(d.height, resolution)), domain,
                                   resolution);
          },
          [&](const Disk& d) { return build_disk(d, domain, resolution); },
          [&](const ThinRectangle& d) {
            return build_rectangle(*rect_frame(domain),
                                   std::max(1, steps_for(d.b - d.a, resolution)),
                                   std::max(2, steps_for(d.mu, resolution)), domain, resolution);
          },
      },
      domain);
}

BoundaryHole::BoundaryHole(const Mesh& mesh, std::vector<int> facet_indices)
    : facets_(std::move(facet_indices)) {
  std::sort(facets_.begin(), facets_.end());
  facets_.erase(std::unique(facets_.begin(), facets_.end()), facets_.end());
  for (int f : facets_) {
    if (f < 0 || static_cast<std::size_t>(f) >= mesh.num_facets()) {
      throw GeometryError("hole references invalid boundary facet " + std::to_string(f));
    }
    measure_ += mesh.facet(f).measure;
  }
}

bool BoundaryHole::contains(int facet) const {
  return std::binary_search(facets_.begin(), facets_.end(), facet);
}

double wrap_arclength(const Mesh& mesh, double s) {
  if (!mesh.closed_boundary()) return s;
  const auto& last = mesh.facets().back();
  const double period = last.s_begin + last.measure;
  s = std::fmod(s, period);
  if (s < 0) s += period;
  return s;
}

BoundaryHole make_hole_from_arc(const Mesh& mesh, double start, double length) {
  if (length < 0) throw GeometryError("arc length must be nonnegative");
  const auto facets = mesh.facets();
  const int n = static_cast<int>(facets.size());
  const double period = facets.back().s_begin + facets.back().measure;
  const double s = wrap_arclength(mesh, start);

  // Snap the start to the nearest facet endpoint.
  int first = 0;
  double best = std::abs(s - facets[0].s_begin);
  for (int f = 1; f < n; ++f) {
    const double d = std::abs(s - facets[f].s_begin);
    if (d < best) {
      best = d;
      first = f;
    }
  }
  if (mesh.closed_boundary() && std::abs(period - s) < best) first = 0;

  std::vector<int> chosen;
  double measure = 0.0;
  for (int k = 0; k < n; ++k) {
    const int f = mesh.closed_boundary() ? (first + k) % n : first + k;
    if (f >= n) break;
    const double next = measure + facets[f].measure;
    if (std::abs(next - length) < std::abs(measure - length)) {
      chosen.push_back(f);
      measure = next;
    } else {
      break;
    }
  }
  return BoundaryHole(mesh, std::move(chosen));
}

double boundary_measure(const Mesh& mesh, const BoundaryHole& hole) {
  double m = 0.0;
  for (int f : hole.facets()) m += mesh.facet(f).measure;
  return m;
}

BoundaryHole hole_union(const Mesh& mesh, const BoundaryHole& a, const BoundaryHole& b) {
  std::vector<int> out;
  std::set_union(a.facets().begin(), a.facets().end(), b.facets().begin(), b.facets().end(),
                 std::back_inserter(out));
  return BoundaryHole(mesh, std::move(out));
}

BoundaryHole hole_intersection(const Mesh& mesh, const BoundaryHole& a, const BoundaryHole& b) {
  std::vector<int> out;
  std::set_intersection(a.facets().begin(), a.facets().end(), b.facets().begin(),
                        b.facets().end(), std::back_inserter(out));
  return BoundaryHole(mesh, std::move(out));
}

BoundaryHole hole_complement(const Mesh& mesh, const BoundaryHole& hole) {
  std::vector<int> out;
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    if (!hole.contains(f)) out.push_back(f);
  }
  return BoundaryHole(mesh, std::move(out));
}

std::vector<Arc> hole_arcs(const Mesh& mesh, const BoundaryHole& hole) {
  std::vector<Arc> arcs;
  const int n = static_cast<int>(mesh.num_facets());
  if (hole.empty()) return arcs;
  if (static_cast<int>(hole.size()) == n && mesh.closed_boundary()) {
    arcs.push_back({0.0, hole.measure(), 0, n});
    return arcs;
  }
  std::vector<bool> in(n, false);
  for (int f : hole.facets()) in[f] = true;
  // On closed boundaries start scanning right after a gap so wrapped runs stay whole.
  int origin = 0;
  if (mesh.closed_boundary()) {
    while (in[origin]) ++origin;
  }
  int k = 0;
  while (k < n) {
    const int f = mesh.closed_boundary() ? (origin + k) % n : k;
    if (!in[f]) {
      ++k;
      continue;
    }
    Arc arc;
    arc.first_facet = f;
    arc.start = mesh.facet(f).s_begin;
    while (k < n) {
      const int g = mesh.closed_boundary() ? (origin + k) % n : k;
      if (!in[g]) break;
      // Open boundaries (1D endpoints) are not contiguous with each other.
      if (!mesh.closed_boundary() && arc.num_facets > 0) break;
      arc.length += mesh.facet(g).measure;
      ++arc.num_facets;
      ++k;
    }
    arcs.push_back(arc);
  }
  std::sort(arcs.begin(), arcs.end(),
            [](const Arc& a, const Arc& b) { return a.first_facet < b.first_facet; });
  return arcs;
}

std::vector<bool> hole_vertex_mask(const Mesh& mesh, const BoundaryHole& hole) {
  std::vector<bool> mask(mesh.num_vertices(), false);
  for (int f : hole.facets()) {
    for (int v : mesh.facet(f).vertices) {
      if (v >= 0) mask[v] = true;
    }
  }
  return mask;
}

BoundaryProjection project_to_boundary(const Mesh& mesh, Point x) {
  const auto& facets = mesh.facets();
  const double period = facets.back().s_begin + facets.back().measure;
  if (auto disk = std::get_if<Disk>(&mesh.domain())) {
    const double rho = norm(x);
    double theta = std::atan2(x.y, x.x);
    if (theta < 0) theta += 2.0 * kPi;
    return {disk->radius - rho, theta / (2.0 * kPi) * period, {-std::sin(theta), std::cos(theta)}};
  }
  if (auto fr = rect_frame(mesh.domain())) {
    const double db = x.y - fr->y0, dr = fr->x0 + fr->w - x.x, dt = fr->y0 + fr->h - x.y,
                 dl = x.x - fr->x0;
    const double d = std::min({db, dr, dt, dl});
    if (d == db) return {db, x.x - fr->x0, {1.0, 0.0}};
    if (d == dr) return {dr, fr->w + (x.y - fr->y0), {0.0, 1.0}};
    if (d == dt) return {dt, fr->w + fr->h + (fr->x0 + fr->w - x.x), {-1.0, 0.0}};
    return {dl, 2.0 * fr->w + fr->h + (fr->y0 + fr->h - x.y), {0.0, -1.0}};
  }
  const auto& iv = std::get<Interval>(mesh.domain());
  if (x.x - iv.a <= iv.b - x.x) return {x.x - iv.a, 0.0, {0.0, 0.0}};
  return {iv.b - x.x, 1.0, {0.0, 0.0}};
}

namespace {

double hat_cutoff(double t) {
  if (t >= 1.0) return 0.0;
  if (t <= 0.0) return 1.0;
  return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

double boundary_period(const Mesh& mesh) {
  return mesh.facets().back().s_begin + mesh.facets().back().measure;
}

}  // namespace

TangentialField TangentialField::tube(const Mesh& mesh, SpeedFn speed, SpeedFn speed_derivative,
                                      double delta) {
  if (mesh.dim() != 2) throw GeometryError("tangential fields need a 2D mesh");
  if (!speed) throw GeometryError("tangential field needs a speed function");
  TangentialField field;
  field.rule_ = ExtensionRule::CutoffTube;
  field.delta_ = delta > 0 ? delta : 3.0 * mesh.resolution();
  const double period = boundary_period(mesh);
  field.speed_ = [speed, period](double s) {
    s = std::fmod(s, period);
    if (s < 0) s += period;
    return speed(s);
  };
  if (speed_derivative) {
    field.dspeed_ = [speed_derivative, period](double s) {
      s = std::fmod(s, period);
      if (s < 0) s += period;
      return speed_derivative(s);
    };
  }

  std::vector<double> corners;
  if (auto fr = rect_frame(mesh.domain())) {
    corners = {0.0, fr->w, fr->w + fr->h, 2.0 * fr->w + fr->h, period};
  }
  auto near_corner = [&](double s) {
    for (double c : corners) {
      if (std::abs(s - c) < field.delta_) return true;
    }
    return false;
  };

  field.velocity_.assign(mesh.num_vertices(), Point{});
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    BoundaryProjection proj = project_to_boundary(mesh, mesh.vertex(v));
    if (auto s = mesh.vertex_arclength(v)) {
      proj.distance = 0.0;
      proj.arclength = *s;
    }
    if (proj.distance >= field.delta_) continue;
    const double c = field.speed_(proj.arclength);
    if (c == 0.0) continue;
    if (near_corner(proj.arclength)) {
      throw GeometryError("tangential speed must vanish within delta of polygon corners");
    }
    field.velocity_[v] = (hat_cutoff(proj.distance / field.delta_) * c) * proj.tangent;
  }
  return field;
}

TangentialField TangentialField::rotation(const Mesh& mesh, double speed) {
  const auto* disk = std::get_if<Disk>(&mesh.domain());
  if (!disk) throw GeometryError("rigid rotation fields are defined on disks only");
  TangentialField field;
  field.rule_ = ExtensionRule::RigidRotation;
  field.delta_ = disk->radius;
  field.speed_ = [speed](double) { return speed; };
  field.dspeed_ = [](double) { return 0.0; };
  const double omega = speed / disk->radius;
  field.velocity_.resize(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point x = mesh.vertex(v);
    field.velocity_[v] = {-omega * x.y, omega * x.x};
  }
  return field;
}

TangentialField TangentialField::zero(const Mesh& mesh) {
  TangentialField field;
  field.delta_ = 3.0 * mesh.resolution();
  field.speed_ = [](double) { return 0.0; };
  field.dspeed_ = [](double) { return 0.0; };
  field.velocity_.assign(mesh.num_vertices(), Point{});
  return field;
}

double TangentialField::speed(double s) const { return speed_(s); }

std::optional<double> TangentialField::speed_derivative(double s) const {
  if (!dspeed_) return std::nullopt;
  return dspeed_(s);
}

TangentialField TangentialField::operator+(const TangentialField& other) const {
  if (velocity_.size() != other.velocity_.size()) {
    throw GeometryError("tangential fields live on different meshes");
  }
  TangentialField sum;
  const bool rigid =
      rule_ == ExtensionRule::RigidRotation || other.rule_ == ExtensionRule::RigidRotation;
  sum.rule_ = rigid ? ExtensionRule::RigidRotation : ExtensionRule::CutoffTube;
  sum.delta_ = std::max(delta_, other.delta_);
  sum.speed_ = [a = speed_, b = other.speed_](double s) { return a(s) + b(s); };
  if (dspeed_ && other.dspeed_) {
    sum.dspeed_ = [a = dspeed_, b = other.dspeed_](double s) { return a(s) + b(s); };
  }
  sum.velocity_.resize(velocity_.size());
  for (std::size_t v = 0; v < velocity_.size(); ++v) {
    sum.velocity_[v] = velocity_[v] + other.velocity_[v];
  }
  return sum;
}

TangentialField TangentialField::scaled(double c) const {
  TangentialField out = *this;
  out.speed_ = [a = speed_, c](double s) { return c * a(s); };
  if (dspeed_) out.dspeed_ = [a = dspeed_, c](double s) { return c * a(s); };
  for (auto& v : out.velocity_) v = c * v;
  return out;
}

TangentialField::SpeedFn periodic_bump(double center, double half_width, double period) {
  return [=](double s) {
    double d = s - center;
    if (period > 0) d -= period * std::round(d / period);
    const double r = std::abs(d) / half_width;
    if (r >= 1.0) return 0.0;
    const double w = 1.0 - r * r;
    return w * w;
  };
}

TangentialField::SpeedFn periodic_bump_derivative(double center, double half_width,
                                                  double period) {
  return [=](double s) {
    double d = s - center;
    if (period > 0) d -= period * std::round(d / period);
    const double r = std::abs(d) / half_width;
    if (r >= 1.0) return 0.0;
    return -4.0 * d * (1.0 - r * r) / (half_width * half_width);
  };
}

}  // namespace stc
