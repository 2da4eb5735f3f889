#pragma once

#include "mahler/shadow.hpp"

#include <map>
#include <optional>
#include <string>

namespace mahler {

/// Half the sum of (m(G) - 3) over the facets G parallel to theta.
Rational c_theta(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts = {});

struct DimensionReport {
  Direction theta;
  Rational c_theta;
  Rational bound;  ///< (F - V)/2 + 2 + c_theta
  std::size_t dim_actual = 0;
  bool nontrivial_certified = false;
  /// Present whenever the bound exceeds 3.
  std::optional<SpeedVector> witness_speed;
};

/// Compares the Euler-type lower bound with the actual dimension of the
/// admissible space. Throws BoundViolation when the bound is not met or a
/// certified space has no non-trivial member.
DimensionReport dimension_bound(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts = {});

enum class Verdict { Parallelepiped, AffineOctahedron, Excluded };
enum class Side { Primal, Polar };

std::string to_string(Verdict v);
std::string to_string(Side s);

/// A direction with bound > 3 on P or its polar, with the speed found.
struct Witness {
  Side side = Side::Primal;
  Direction theta{Point3{1.0, 0.0, 0.0}};
  Rational c_theta;
  Rational bound;
  std::size_t dim = 0;
  SpeedVector speed;
};

struct ClassificationEvidence {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t facets = 0;
  std::size_t max_degree = 0;
  std::map<std::size_t, std::size_t> facet_sizes;  ///< m -> number of facets with m vertices
  /// Two quadrilateral facets sharing an edge, and that edge's endpoints.
  std::optional<std::array<std::size_t, 2>> adjacent_quads;
  std::optional<std::array<std::size_t, 2>> shared_edge;
  std::optional<Witness> witness;
  std::string rule;
  Kernel kernel = Kernel::Rational;
};

struct MinimizerClassification {
  Verdict verdict = Verdict::Excluded;
  ClassificationEvidence evidence;
};

/// Decides whether P can be a minimizer of the volume product: an affine
/// cube, an affine octahedron, or excluded by a witness direction along
/// which a non-trivial admissible speed exists. Double-kernel input is
/// snapped to a 2^-40 grid first; if snapping alters the lattice the
/// double lattice is used. Throws InternalInconsistency.
MinimizerClassification classify_minimizer_candidate(const SymPolytope& p);

/// Cheap lattice test used during descent: V=8, F=6, simple; or V=6, F=8.
std::optional<Verdict> terminal_lattice(const SymPolytope& p);

}  // namespace mahler
