#pragma once

#include "mahler/polytope.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace mahler {

/// Unit direction of motion. Keeps an exact representative so that
/// parallelism to rational facet planes can be decided exactly.
class Direction {
 public:
  /// Normalizes v; the exact representative is v itself (doubles are dyadic).
  explicit Direction(const Point3& v);
  explicit Direction(const QPoint3& v);

  const Point3& unit() const { return unit_; }
  const QPoint3& exact() const { return exact_; }

  /// Rational multiple of exact() whose length is 1 to double precision.
  /// Rational-kernel deformations move along this vector.
  QPoint3 exact_step() const;

  Direction operator-() const;

 private:
  Point3 unit_;
  QPoint3 exact_;
};

/// One speed per vertex of the base polytope. `exact` is filled by the
/// rational kernel and is otherwise empty.
struct SpeedVector {
  std::vector<double> values;
  std::vector<Rational> exact;

  std::size_t size() const { return values.size(); }
  bool has_exact() const { return !exact.empty(); }
  double max_abs() const;
  double norm() const;
};

/// alpha[partner(i)] == -alpha[i] up to tol * max|alpha| (exactly when tol = 0).
bool is_odd(const SymPolytope& p, const SpeedVector& alpha, double tol = 0.0);

struct ParallelismOptions {
  /// |theta . n| at or below this counts as parallel (double kernel).
  double parallel_band = 1e-14;
  /// Non-parallel values at or below this raise ParallelismAmbiguity.
  double ambiguity_band = 1e-10;
};

/// Per facet: theta lies in lin(G - G). Throws ParallelismAmbiguity.
std::vector<bool> parallel_facets(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts = {});

/// Linear space of symmetric theta-admissible speeds.
struct SpeedSpace {
  SymPolytope base;
  Direction theta;
  std::vector<SpeedVector> basis;
  std::array<SpeedVector, 3> trivial_basis;
  std::vector<bool> parallel;
  std::size_t constraint_rows = 0;

  std::size_t dim() const { return basis.size(); }
};

SpeedSpace admissible_space(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts = {});

/// Speed induced by the shear x -> x + t (w . x) theta.
SpeedVector trivial_speed(const SymPolytope& p, const Point3& w);
SpeedVector trivial_speed(const SymPolytope& p, const QPoint3& w);

/// Checks oddness and the affine-on-facet condition for every facet not
/// parallel to theta, with residuals relative to max|alpha|.
bool is_admissible(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha, double tol = 1e-9,
                   const ParallelismOptions& opts = {});

/// Least-squares residual against the trivial span is <= tol * |alpha|.
bool is_trivial(const SpeedSpace& s, const SpeedVector& alpha, double tol = 1e-9);

/// Largest projection of a basis vector onto the orthogonal complement of
/// the trivial speeds (reduced coordinates), scaled to max|alpha| = 1.
/// Empty when the space is trivial.
std::optional<SpeedVector> nontrivial_component(const SpeedSpace& s);

/// conv{x_i + t alpha_i theta}. Vertex labels survive when every moved
/// point stays extreme. Throws DegenerateDeformation on collapse.
SymPolytope deform(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha, double t);

struct PersistenceOptions {
  std::size_t interior_samples = 32;
  double c_max = 1.0;
  double safety = 0.9;
  double min_c = 1e-12;
  std::size_t bisection_steps = 30;
  std::size_t halving_levels = 10;
};

/// The sample schedule {0, +-c/2^k, k = 0..levels} plus K uniform interior points.
std::vector<double> persistence_schedule(double c, const PersistenceOptions& opts = {});

/// True when the labeled lattice of P_t equals that of P at every scheduled t.
bool lattice_persists(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha, double c,
                      const PersistenceOptions& opts = {});

/// Certified half-width c: doubling from 0.1 * inradius / max|alpha|, then
/// bisection, then the safety factor; verified on the full schedule.
/// Throws NoPersistence.
double persistence_interval(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha,
                            const PersistenceOptions& opts = {});

/// Step just past the first lattice change beyond `from` (same sign), placed
/// in the middle of the range where the new lattice is stable, at most
/// 1e-6 relative past the change. `from` must be a persisting t. Empty when
/// the lattice persists up to c_max.
std::optional<double> lattice_event(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha,
                                    double from, const PersistenceOptions& opts = {});

struct ShadowSystem {
  SymPolytope base;
  Direction theta;
  SpeedVector alpha;
  double half_width = 0.0;
};

struct AffinenessReport {
  double slope = 0.0;                ///< d|P_t|/dt from the fit
  double intercept = 0.0;            ///< |P_0| from the fit
  double quadratic = 0.0;            ///< t^2 coefficient
  double relative_curvature = 0.0;   ///< |q c^2| / (|a| + |b c|)
  double max_residual = 0.0;         ///< worst deviation from the linear fit
  std::vector<double> t;
  std::vector<double> volume;
};

/// Samples |P_t| on [-c, c]; throws AffinenessViolation when the relative
/// curvature exceeds rel_tol.
AffinenessReport check_volume_affine(const ShadowSystem& s, std::size_t samples, double rel_tol = 1e-8);

struct ConvexityReport {
  double min_second_difference = 0.0;
  double max_abs = 0.0;
  std::vector<double> t;
  std::vector<double> inverse_polar_volume;
};

/// Samples f(t) = 1/|P_t^o| on [-c, c]; throws ConvexityViolation when a
/// second difference drops below -rel_tol * max|f|.
ConvexityReport check_inverse_polar_convexity(const ShadowSystem& s, std::size_t samples, double rel_tol = 1e-8);

}  // namespace mahler
