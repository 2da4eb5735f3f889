#include "mahler/combinatorics.hpp"

#include "mahler/error.hpp"
#include "mahler/polarity.hpp"

#include <random>

namespace mahler {

Rational c_theta(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts) {
  const auto parallel = parallel_facets(p, theta, opts);
  Rational sum = 0;
  for (std::size_t k = 0; k < parallel.size(); ++k) {
    if (parallel[k]) sum += static_cast<long>(p.lattice().facet_size(k)) - 3;
  }
  return Rational(sum / 2);
}

DimensionReport dimension_bound(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts) {
  const FaceLattice& lat = p.lattice();
  DimensionReport r{theta, c_theta(p, theta, opts), 0, 0, false, std::nullopt};
  r.bound = Rational(Rational(static_cast<long>(lat.num_facets()) - static_cast<long>(lat.num_vertices())) / 2 + 2 +
                     r.c_theta);
  const SpeedSpace space = admissible_space(p, theta, opts);
  r.dim_actual = space.dim();
  if (Rational(static_cast<long>(r.dim_actual)) < r.bound) {
    throw Error(ErrorCode::BoundViolation, "admissible space is smaller than the Euler bound",
                nlohmann::json{{"bound", format_rational(r.bound)}, {"dim", r.dim_actual},
                               {"theta", {theta.unit().x, theta.unit().y, theta.unit().z}}});
  }
  r.nontrivial_certified = r.bound > 3;
  if (r.nontrivial_certified) {
    r.witness_speed = nontrivial_component(space);
    if (!r.witness_speed) {
      throw Error(ErrorCode::BoundViolation, "bound exceeds 3 but every admissible speed is trivial",
                  nlohmann::json{{"bound", format_rational(r.bound)}, {"dim", r.dim_actual}});
    }
  }
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Parallelepiped: return "Parallelepiped";
    case Verdict::AffineOctahedron: return "AffineOctahedron";
    case Verdict::Excluded: return "Excluded";
  }
  return "?";
}

std::string to_string(Side s) { return s == Side::Primal ? "primal" : "polar"; }

std::optional<Verdict> terminal_lattice(const SymPolytope& p) {
  const FaceLattice& lat = p.lattice();
  if (lat.num_vertices() == 8 && lat.num_facets() == 6 && lat.max_degree() == 3) return Verdict::Parallelepiped;
  if (lat.num_vertices() == 6 && lat.num_facets() == 8) return Verdict::AffineOctahedron;
  return std::nullopt;
}

namespace {

std::optional<Witness> try_witness(const SymPolytope& body, Side side, const Direction& theta) {
  try {
    DimensionReport r = dimension_bound(body, theta);
    if (!r.nontrivial_certified) return std::nullopt;
    return Witness{side, theta, r.c_theta, r.bound, r.dim_actual, std::move(*r.witness_speed)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParallelismAmbiguity) return std::nullopt;
    throw;
  }
}

/// Directions e1 + s e2 spanned by the facet's first three vertices; the
/// first one that avoids ambiguous near-parallelism with other facets wins.
std::optional<Witness> in_plane_witness(const SymPolytope& body, Side side, std::size_t facet) {
  const auto& cyc = body.lattice().facets()[facet];
  constexpr int kCandidates = 100;
  for (int k = 0; k < kCandidates; ++k) {
    std::optional<Direction> theta;
    if (body.kernel() == Kernel::Rational) {
      const auto& v = body.exact_vertices();
      const QPoint3 e1 = v[cyc[1]] - v[cyc[0]];
      const QPoint3 e2 = v[cyc[2]] - v[cyc[0]];
      theta.emplace(e1 + Rational(k, 37) * e2);
    } else {
      // Project onto the stored plane: tolerance-merged facets are only
      // nearly planar, and raw vertex differences would look ambiguous.
      const auto& v = body.vertices();
      const Point3& n = body.lattice().planes()[facet].normal;
      const Point3 d = (v[cyc[1]] - v[cyc[0]]) + (k / 37.0) * (v[cyc[2]] - v[cyc[0]]);
      theta.emplace(d - dot(d, n) * n);
    }
    if (auto w = try_witness(body, side, *theta)) return w;
  }
  return std::nullopt;
}

std::optional<Witness> edge_witness(const SymPolytope& body, Side side, std::size_t edge) {
  const FaceLattice& lat = body.lattice();
  const auto [a, b] = lat.edges()[edge];
  if (body.kernel() == Kernel::Rational) {
    return try_witness(body, side, Direction(body.exact_vertices()[b] - body.exact_vertices()[a]));
  }
  const auto [f, g] = lat.edge_facets()[edge];
  return try_witness(body, side, Direction(cross(lat.planes()[f].normal, lat.planes()[g].normal)));
}

/// Deterministic integer directions; generic with probability one.
std::optional<Witness> generic_witness(const SymPolytope& body, Side side, int tries) {
  std::mt19937_64 rng(0x5eedu);
  std::uniform_int_distribution<long> coord(-1000, 1000);
  for (int k = 0; k < tries; ++k) {
    QPoint3 v{Rational(coord(rng)), Rational(coord(rng)), Rational(coord(rng))};
    if (v == QPoint3{0, 0, 0}) continue;
    if (auto w = body.kernel() == Kernel::Rational ? try_witness(body, side, Direction(v))
                                                  : try_witness(body, side, Direction(to_double(v)))) {
      return w;
    }
  }
  return std::nullopt;
}

std::optional<std::array<std::size_t, 3>> adjacent_quadrilaterals(const SymPolytope& p) {
  const FaceLattice& lat = p.lattice();
  for (std::size_t e = 0; e < lat.num_edges(); ++e) {
    const auto [f, g] = lat.edge_facets()[e];
    if (lat.facet_size(f) == 4 && lat.facet_size(g) == 4 && p.opposite_facet(f) != g) {
      return std::array<std::size_t, 3>{f, g, e};
    }
  }
  return std::nullopt;
}

void fill_census(const SymPolytope& p, ClassificationEvidence& ev) {
  const FaceLattice& lat = p.lattice();
  ev.vertices = lat.num_vertices();
  ev.edges = lat.num_edges();
  ev.facets = lat.num_facets();
  ev.max_degree = lat.max_degree();
  ev.kernel = p.kernel();
  std::size_t incidences = 0;
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    ++ev.facet_sizes[lat.facet_size(k)];
    incidences += lat.facet_size(k);
  }
  std::size_t degree_sum = 0;
  for (std::size_t i = 0; i < lat.num_vertices(); ++i) degree_sum += lat.degree(i);
  if (ev.vertices + ev.facets != ev.edges + 2 || incidences != 2 * ev.edges || degree_sum != 2 * ev.edges) {
    throw Error(ErrorCode::InternalInconsistency, "face lattice census is inconsistent",
                nlohmann::json{{"V", ev.vertices}, {"E", ev.edges}, {"F", ev.facets}, {"incidences", incidences},
                               {"degree_sum", degree_sum}});
  }
  if (auto q = adjacent_quadrilaterals(p)) {
    ev.adjacent_quads = std::array<std::size_t, 2>{(*q)[0], (*q)[1]};
    ev.shared_edge = lat.edges()[(*q)[2]];
  }
}

SymPolytope classification_body(const SymPolytope& p) {
  if (p.kernel() == Kernel::Rational) return p;
  try {
    SymPolytope q = snap_to_rational(p);
    if (q.size() == p.size() && q.lattice().same_labeled(p.lattice())) return q;
  } catch (const Error&) {
  }
  return p;
}

void require(bool ok, const char* what, const ClassificationEvidence& ev) {
  if (!ok) {
    throw Error(ErrorCode::InternalInconsistency, what,
                nlohmann::json{{"V", ev.vertices}, {"E", ev.edges}, {"F", ev.facets}, {"max_degree", ev.max_degree}});
  }
}

/// Case V = F + 2 on `body`: simple implies a parallelepiped; otherwise a
/// vertex of degree > 3 gives a facet of the polar with m > 3.
MinimizerClassification simple_case(const SymPolytope& body, const SymPolytope& dual, Side body_side,
                                    Verdict success, ClassificationEvidence ev) {
  const FaceLattice& lat = body.lattice();
  const Side dual_side = body_side == Side::Primal ? Side::Polar : Side::Primal;
  for (std::size_t v = 0; v < lat.num_vertices(); ++v) {
    if (lat.degree(v) <= 3) continue;
    ev.rule = body_side == Side::Primal ? "vertex-degree" : "facet-size";
    ev.witness = in_plane_witness(dual, dual_side, v);
    require(ev.witness.has_value(), "no witness direction in a facet with more than three vertices", ev);
    return {Verdict::Excluded, std::move(ev)};
  }
  require(lat.num_vertices() == 8 && lat.num_facets() == 6, "simple body with V = F + 2 is not 8/6", ev);
  ev.rule = body_side == Side::Primal ? "simple" : "simplicial";
  return {success, std::move(ev)};
}

std::optional<Witness> balanced_witness(const SymPolytope& body, Side side) {
  const FaceLattice& lat = body.lattice();
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    if (lat.facet_size(k) >= 5) {
      if (auto w = in_plane_witness(body, side, k)) return w;
    }
  }
  if (auto q = adjacent_quadrilaterals(body)) {
    if (auto w = edge_witness(body, side, (*q)[2])) return w;
  }
  return std::nullopt;
}

}  // namespace

MinimizerClassification classify_minimizer_candidate(const SymPolytope& input) {
  const SymPolytope p = classification_body(input);
  const SymPolytope q = polar(p);
  ClassificationEvidence ev;
  fill_census(p, ev);
  const long v = static_cast<long>(ev.vertices);
  const long f = static_cast<long>(ev.facets);

  if (std::abs(v - f) > 2) {
    ev.rule = "vertex-facet-gap";
    ev.witness = f > v ? generic_witness(p, Side::Primal, 64) : generic_witness(q, Side::Polar, 64);
    require(ev.witness.has_value(), "no generic direction witnesses |V - F| > 2", ev);
    return {Verdict::Excluded, std::move(ev)};
  }
  if (v == f + 2) return simple_case(p, q, Side::Primal, Verdict::Parallelepiped, std::move(ev));
  if (f == v + 2) {
    auto out = simple_case(q, p, Side::Polar, Verdict::AffineOctahedron, std::move(ev));
    if (out.verdict == Verdict::AffineOctahedron) {
      require(v == 6 && f == 8, "simplicial body with F = V + 2 is not 6/8", out.evidence);
    }
    return out;
  }

  // V = F: a facet with m >= 5 or two adjacent quadrilaterals gives C >= 2.
  ev.witness = balanced_witness(p, Side::Primal);
  ev.rule = "balanced-primal";
  if (!ev.witness) {
    ev.witness = balanced_witness(q, Side::Polar);
    ev.rule = "balanced-polar";
  }
  if (!ev.witness) {
    ev.witness = generic_witness(p, Side::Primal, 64);
    ev.rule = "balanced-census";
  }
  return {Verdict::Excluded, std::move(ev)};
}

}  // namespace mahler
