#pragma once

#include "mahler/polytope.hpp"

#include <cstddef>

namespace mahler {

/// Exact 32/3, the volume product of the cube and the octahedron.
Rational mahler_bound();

/// Polar body: one vertex n/h per facet plane {n . x = h}; the lattice is the
/// order-reversed lattice of `p` (polar vertex k is dual to facet k, polar
/// facet i is dual to vertex i).
SymPolytope polar(const SymPolytope& p);

/// Polar of a general polytope about the origin (origin must be interior).
Polytope polar_about_origin(const Polytope& p);

/// z + (P - z)^o. Throws CenterOutsideBody unless z is interior with a
/// margin of `margin` times the circumradius.
Polytope santalo_polar(const Polytope& p, const Point3& z, double margin = 1e-9);
inline Polytope santalo_polar(const SymPolytope& p, const Point3& z, double margin = 1e-9) {
  return santalo_polar(p.body(), z, margin);
}

/// |P^z| without building the polar body. z must be interior.
double santalo_polar_volume(const Polytope& p, const Point3& z);

struct SantaloOptions {
  std::size_t max_iterations = 200;
  double gradient_tol = 1e-8;
  /// Finite-difference step relative to the diameter.
  double fd_step = 1e-6;
};

struct SantaloResult {
  Point3 point;
  double polar_volume = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool used_fallback = false;
};

/// Minimizer of z -> |Q^z| by damped BFGS on finite-difference gradients
/// from the vertex centroid, with a coordinate-search fallback. Throws
/// NonConvergence (detail carries the best iterate) when both fail.
SantaloResult santalo_point(const Polytope& q, const SantaloOptions& opts = {});
/// Symmetric bodies have their Santalo point at the origin.
inline Point3 santalo_point(const SymPolytope&) { return {0.0, 0.0, 0.0}; }

struct VolumeProductReport {
  Real volume_primal;
  Real volume_polar;
  Real product;
  Point3 santalo_point;
  Real mahler_gap;
};

VolumeProductReport volume_product(const SymPolytope& p);

struct DualityReport {
  std::size_t primal_vertices = 0;
  std::size_t primal_facets = 0;
  std::size_t polar_vertices = 0;
  std::size_t polar_facets = 0;
  bool incidence_transposed = false;
};

/// Checks V(P^o) = F(P), F(P^o) = V(P) and that vertex-facet incidence is
/// transposed. Throws DualityViolation otherwise.
DualityReport verify_incidence_duality(const SymPolytope& p);

}  // namespace mahler
