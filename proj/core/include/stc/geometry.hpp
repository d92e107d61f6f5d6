#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace stc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double norm(Point a);

/// Raised for malformed geometric input (bad domain, coarse resolution,
/// invalid hole, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double a = 0.0;
  double b = 1.0;
};
struct Rectangle {
  double width = 1.0;
  double height = 1.0;
};
struct Disk {
  double radius = 1.0;
};
/// (a,b) x (0,mu). Geometrically a rectangle; mu is kept for scaling studies.
struct ThinRectangle {
  double a = 0.0;
  double b = 1.0;
  double mu = 0.1;
};

using Domain = std::variant<Interval, Rectangle, Disk, ThinRectangle>;

void validate(const Domain& domain);
int dimension(const Domain& domain);
std::string kind_name(const Domain& domain);
/// Continuum H^N(Omega).
double volume(const Domain& domain);
/// Continuum H^{N-1}(boundary). Intervals use counting measure (2).
double perimeter(const Domain& domain);

struct BoundaryFacet {
  // 2D: edge (v0, v1) oriented counterclockwise. 1D: single vertex, v1 == -1.
  std::array<int, 2> vertices{-1, -1};
  double measure = 0.0;
  Point normal;
  int cell = -1;
  // Position along the boundary parameterization: [s_begin, s_begin+measure).
  double s_begin = 0.0;
};

/// Simplicial mesh of a domain with boundary facets ordered along the boundary
/// arclength parameterization. Immutable once built.
class Mesh {
 public:
  Mesh(Domain domain, double resolution, std::vector<Point> vertices,
       std::vector<int> cells, std::vector<BoundaryFacet> facets,
       bool closed_boundary);

  const Domain& domain() const { return domain_; }
  int dim() const { return dim_; }
  double resolution() const { return resolution_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size() / (dim_ + 1); }
  std::size_t num_facets() const { return facets_.size(); }

  std::span<const Point> vertices() const { return vertices_; }
  const Point& vertex(std::size_t i) const { return vertices_[i]; }
  std::span<const int> cell(std::size_t c) const {
    return {cells_.data() + c * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }
  std::span<const BoundaryFacet> facets() const { return facets_; }
  const BoundaryFacet& facet(std::size_t f) const { return facets_[f]; }

  /// Signed measure of a cell (length in 1D, area in 2D).
  double cell_measure(std::size_t c) const { return cell_measure_[c]; }
  /// Sum of boundary facet measures.
  double boundary_measure() const { return boundary_measure_; }
  double total_volume() const;
  double max_facet_measure() const;
  /// True when the boundary parameterization wraps (polygon loop).
  bool closed_boundary() const { return closed_boundary_; }

  /// Boundary-vertex arclength position, or nullopt for interior vertices.
  std::optional<double> vertex_arclength(std::size_t v) const;
  bool is_boundary_vertex(std::size_t v) const { return vertex_arclength_[v] >= 0.0; }

  /// Same topology with moved vertices; cell measures and facet data are
  /// recomputed. Arclength positions are kept from this mesh.
  Mesh deformed(std::span<const Point> new_vertices) const;

 private:
  void compute_geometry();

  Domain domain_;
  int dim_ = 2;
  double resolution_ = 0.0;
  std::vector<Point> vertices_;
  std::vector<int> cells_;
  std::vector<BoundaryFacet> facets_;
  std::vector<double> cell_measure_;
  std::vector<double> vertex_arclength_;
  double boundary_measure_ = 0.0;
  bool closed_boundary_ = true;
};

/// Builds a conforming mesh. Intervals: uniform partition. Rectangles:
/// structured grid with alternating diagonals. Disks: concentric rings with
/// boundary vertices on the exact circle. Thin rectangles keep at least two
/// cell layers across the thickness.
Mesh generate_mesh(const Domain& domain, double resolution);

/// A union of whole boundary facets.
class BoundaryHole {
 public:
  BoundaryHole() = default;
  BoundaryHole(const Mesh& mesh, std::vector<int> facet_indices);

  std::span<const int> facets() const { return facets_; }
  bool contains(int facet) const;
  double measure() const { return measure_; }
  bool empty() const { return facets_.empty(); }
  std::size_t size() const { return facets_.size(); }

  friend bool operator==(const BoundaryHole& a, const BoundaryHole& b) {
    return a.facets_ == b.facets_;
  }

 private:
  std::vector<int> facets_;
  double measure_ = 0.0;
};

/// A maximal run of consecutive hole facets, in boundary arclength.
struct Arc {
  double start = 0.0;
  double length = 0.0;
  int first_facet = -1;
  int num_facets = 0;
};

/// Whole facets approximating the arc [start, start+length) (mod perimeter on
/// closed boundaries). The start is snapped to the nearest facet endpoint and
/// facets are appended while that brings the measure closer to `length`.
BoundaryHole make_hole_from_arc(const Mesh& mesh, double start, double length);

double boundary_measure(const Mesh& mesh, const BoundaryHole& hole);

BoundaryHole hole_union(const Mesh& mesh, const BoundaryHole& a, const BoundaryHole& b);
BoundaryHole hole_intersection(const Mesh& mesh, const BoundaryHole& a, const BoundaryHole& b);
BoundaryHole hole_complement(const Mesh& mesh, const BoundaryHole& hole);

/// Maximal arcs of a hole, ordered by first facet. On closed boundaries a run
/// crossing the parameterization origin is reported as one arc.
std::vector<Arc> hole_arcs(const Mesh& mesh, const BoundaryHole& hole);

/// Vertices belonging to at least one hole facet.
std::vector<bool> hole_vertex_mask(const Mesh& mesh, const BoundaryHole& hole);

/// Distance to the boundary of the continuum domain together with the
/// arclength and unit tangent of the nearest boundary point.
struct BoundaryProjection {
  double distance = 0.0;
  double arclength = 0.0;
  Point tangent;
};
BoundaryProjection project_to_boundary(const Mesh& mesh, Point x);

/// Wraps s into [0, perimeter) on closed boundaries.
double wrap_arclength(const Mesh& mesh, double s);

enum class ExtensionRule { CutoffTube, RigidRotation };

/// Tangential deformation field V: a signed arclength speed on the boundary
/// extended into the domain. Stores the P1 interpolant (nodal velocities).
class TangentialField {
 public:
  using SpeedFn = std::function<double(double)>;

  /// V(x) = chi(d(x)/delta) * speed(s(x)) * tangent(x), with chi the C1 hat
  /// 1 - 3t^2 + 2t^3 on [0,1]. delta <= 0 selects 3 x mesh resolution.
  /// On polygons the speed must vanish within delta of every corner.
  static TangentialField tube(const Mesh& mesh, SpeedFn speed, SpeedFn speed_derivative = {},
                              double delta = 0.0);
  /// Disk only: rigid rotation with boundary tangential speed `speed`.
  static TangentialField rotation(const Mesh& mesh, double speed);
  static TangentialField zero(const Mesh& mesh);

  ExtensionRule rule() const { return rule_; }
  double delta() const { return delta_; }
  std::span<const Point> nodal_velocity() const { return velocity_; }
  double speed(double s) const;
  /// d(speed)/ds when a closed form was supplied.
  std::optional<double> speed_derivative(double s) const;
  bool has_closed_form_derivative() const { return static_cast<bool>(dspeed_); }

  TangentialField operator+(const TangentialField& other) const;
  TangentialField scaled(double c) const;

 private:
  TangentialField() = default;

  ExtensionRule rule_ = ExtensionRule::CutoffTube;
  double delta_ = 0.0;
  SpeedFn speed_;
  SpeedFn dspeed_;
  std::vector<Point> velocity_;
};

/// Smooth bump in arclength: (1 - r^2)^2 for r = dist(s, center)/half_width < 1,
/// with periodic distance on closed boundaries.
TangentialField::SpeedFn periodic_bump(double center, double half_width, double period);
TangentialField::SpeedFn periodic_bump_derivative(double center, double half_width,
                                                  double period);

}  // namespace stc
