#pragma once

#include "mahler/arith.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mahler {

/// Facet-supporting plane {x : normal . x = offset} with unit outward normal.
struct Plane {
  Point3 normal;
  double offset = 0.0;
};

/// Exact plane; the normal is not normalized.
struct QPlane {
  QPoint3 normal;
  Rational offset;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Labeled incidence structure of a 3-polytope.
///
/// Facets are stored as vertex cycles (Phi0), counter-clockwise when seen
/// from outside. Edges, vertex-edge incidences (Phi1) and edge-facet
/// incidences (Phi2) are derived from the cycles.
class FaceLattice {
 public:
  FaceLattice(std::size_t num_vertices, std::vector<std::vector<std::size_t>> facets,
              std::vector<Plane> planes);

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_facets() const { return facets_.size(); }

  const std::vector<std::array<std::size_t, 2>>& edges() const { return edges_; }
  const std::vector<std::vector<std::size_t>>& facets() const { return facets_; }
  const std::vector<std::vector<std::size_t>>& vertex_edges() const { return vertex_edges_; }
  const std::vector<std::array<std::size_t, 2>>& edge_facets() const { return edge_facets_; }
  const std::vector<std::vector<std::size_t>>& vertex_facets() const { return vertex_facets_; }
  const std::vector<Plane>& planes() const { return planes_; }

  std::size_t facet_size(std::size_t k) const { return facets_[k].size(); }
  std::size_t degree(std::size_t i) const { return vertex_edges_[i].size(); }
  std::size_t max_degree() const;

  /// Index of the edge {a, b}, or num_edges() if absent.
  std::size_t find_edge(std::size_t a, std::size_t b) const;

  /// Same vertex labels and the same family of facet vertex sets.
  bool same_labeled(const FaceLattice& other) const;

 private:
  std::size_t num_vertices_;
  std::vector<std::vector<std::size_t>> facets_;
  std::vector<Plane> planes_;
  std::vector<std::array<std::size_t, 2>> edges_;
  std::vector<std::vector<std::size_t>> vertex_edges_;
  std::vector<std::array<std::size_t, 2>> edge_facets_;
  std::vector<std::vector<std::size_t>> vertex_facets_;
};

struct HullOptions {
  /// Relative tolerance on normalized plane residuals (double kernel only).
  double tol = 1e-9;
};

/// A full-dimensional convex polytope presented by its vertices.
///
/// In the rational kernel the exact vertices and facet planes are kept next
/// to their double images and every combinatorial decision was made exactly.
class Polytope {
 public:
  /// Convex hull; non-extreme input points are dropped, the survivors keep
  /// their input order. Throws DegenerateInput below dimension 3.
  static Polytope hull(std::span<const Point3> points, const HullOptions& opts = {});
  static Polytope hull(std::span<const QPoint3> points, const HullOptions& opts = {});

  Kernel kernel() const { return kernel_; }
  double tolerance() const { return tol_; }
  std::size_t size() const { return vertices_.size(); }

  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<QPoint3>& exact_vertices() const { return exact_vertices_; }
  const std::vector<QPlane>& exact_planes() const { return exact_planes_; }
  const FaceLattice& lattice() const { return *lattice_; }

  /// Input index each vertex came from (identity for non-hull constructions).
  const std::vector<std::size_t>& source_indices() const { return source_; }

  double circumradius() const;

  Polytope translated(const Point3& shift) const;

  /// Assembles a polytope from a known lattice (no hull computation).
  static Polytope from_parts(std::vector<Point3> vertices, std::shared_ptr<const FaceLattice> lattice,
                             double tol);
  static Polytope from_parts(std::vector<QPoint3> vertices, std::vector<QPlane> planes,
                             std::shared_ptr<const FaceLattice> lattice, double tol);

 private:
  Polytope() = default;

  Kernel kernel_ = Kernel::Double;
  double tol_ = 1e-9;
  std::vector<Point3> vertices_;
  std::vector<QPoint3> exact_vertices_;
  std::vector<QPlane> exact_planes_;
  std::vector<std::size_t> source_;
  std::shared_ptr<const FaceLattice> lattice_;
};

/// Origin-symmetric full-dimensional polytope with an exact vertex pairing.
class SymPolytope {
 public:
  /// Wraps a polytope whose vertex set is closed under negation.
  /// Throws NumericalDegeneracy if the pairing is not exact.
  explicit SymPolytope(Polytope body);

  const Polytope& body() const { return body_; }
  Kernel kernel() const { return body_.kernel(); }
  double tolerance() const { return body_.tolerance(); }
  std::size_t size() const { return body_.size(); }
  const std::vector<Point3>& vertices() const { return body_.vertices(); }
  const std::vector<QPoint3>& exact_vertices() const { return body_.exact_vertices(); }
  const FaceLattice& lattice() const { return body_.lattice(); }

  std::size_t partner(std::size_t i) const { return pairing_[i]; }
  const std::vector<std::size_t>& pairing() const { return pairing_; }
  std::size_t opposite_facet(std::size_t k) const { return facet_pairing_[k]; }
  const std::array<std::size_t, 4>& dim_certificate() const { return certificate_; }

  /// Representative of each +/- pair (the smaller index), in increasing order.
  std::vector<std::size_t> pair_representatives() const;

  double circumradius() const { return body_.circumradius(); }
  /// Distance from the origin to the nearest facet plane.
  double inradius() const;

 private:
  Polytope body_;
  std::vector<std::size_t> pairing_;
  std::vector<std::size_t> facet_pairing_;
  std::array<std::size_t, 4> certificate_{};
};

/// Hull of points and their negatives. Near-antipodal pairs (within tol,
/// relative to the input radius) are symmetrized to exact negatives;
/// near-duplicates raise ToleranceConflict.
SymPolytope build_sym_polytope(std::span<const Point3> points, double tol = 1e-9);
SymPolytope build_sym_polytope(std::span<const QPoint3> points, double tol = 0.0);

inline const FaceLattice& face_lattice(const SymPolytope& p) { return p.lattice(); }

/// Signed-cone volume over the facet fans; exact in the rational kernel.
Real volume(const Polytope& p);
inline Real volume(const SymPolytope& p) { return volume(p.body()); }

/// Vertices A x_i. Throws SingularMatrix when |det A| < tol.
SymPolytope linear_image(const SymPolytope& p, const Matrix3& a, double tol = 1e-12);

double determinant(const Matrix3& a);

/// Same vertices, double kernel.
SymPolytope to_double_kernel(const SymPolytope& p);
/// Coordinates rounded to multiples of 2^-bits and rebuilt exactly.
SymPolytope snap_to_rational(const SymPolytope& p, int bits = 40);

namespace shapes {
SymPolytope cube(Kernel k = Kernel::Rational);
SymPolytope octahedron(Kernel k = Kernel::Rational);
SymPolytope cuboctahedron(Kernel k = Kernel::Rational);
}  // namespace shapes

}  // namespace mahler
