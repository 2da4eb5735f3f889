#include "mahler/polarity.hpp"

#include "mahler/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace mahler {

Rational mahler_bound() { return Rational(32, 3); }

namespace {

/// Facets around vertex i in rotational order, walked through shared edges.
std::vector<std::size_t> facets_around(const FaceLattice& lat, std::size_t i) {
  const auto& incident = lat.vertex_facets()[i];
  const std::size_t start = *std::min_element(incident.begin(), incident.end());
  std::vector<std::size_t> ring;
  std::size_t cur = start;
  do {
    ring.push_back(cur);
    const auto& cyc = lat.facets()[cur];
    const auto pos = static_cast<std::size_t>(std::find(cyc.begin(), cyc.end(), i) - cyc.begin());
    const std::size_t succ = cyc[(pos + 1) % cyc.size()];
    const auto& ef = lat.edge_facets()[lat.find_edge(i, succ)];
    cur = ef[0] == cur ? ef[1] : ef[0];
    if (ring.size() > incident.size()) {
      throw Error(ErrorCode::InternalInconsistency, "facet ring around a vertex does not close",
                  nlohmann::json{{"vertex", i}});
    }
  } while (cur != start);
  if (ring.size() != incident.size()) {
    throw Error(ErrorCode::InternalInconsistency, "vertex star is not a single ring",
                nlohmann::json{{"vertex", i}});
  }
  return ring;
}

/// Dual facet cycles, oriented counter-clockwise around `outward[i]`.
/// The walk order around every vertex has the same handedness, so one
/// well-conditioned vertex fixes the orientation of all rings; flat rings
/// inherit it and a clear disagreement is an error.
template <class T>
std::vector<std::vector<std::size_t>> dual_cycles(const FaceLattice& lat, const std::vector<Vec3<T>>& dual_vertices,
                                                  const std::vector<Vec3<T>>& outward) {
  std::vector<std::vector<std::size_t>> rings;
  std::vector<double> score;
  rings.reserve(lat.num_vertices());
  std::size_t ref = 0;
  for (std::size_t i = 0; i < lat.num_vertices(); ++i) {
    rings.push_back(facets_around(lat, i));
    const auto& ring = rings.back();
    Vec3<T> area{};
    for (std::size_t k = 0; k < ring.size(); ++k) {
      area = area + cross(dual_vertices[ring[k]], dual_vertices[ring[(k + 1) % ring.size()]]);
    }
    score.push_back(to_double(T(dot(area, outward[i]))));
    if (std::fabs(score[i]) > std::fabs(score[ref])) ref = i;
  }
  if (score[ref] == 0.0) throw Error(ErrorCode::NumericalDegeneracy, "degenerate dual facets");
  const bool flip = score[ref] < 0.0;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    const bool disagrees = flip ? score[i] > 0.0 : score[i] < 0.0;
    const bool clear = is_exact_v<T> || std::fabs(score[i]) > 1e-6 * std::fabs(score[ref]);
    if (disagrees && clear) {
      throw Error(ErrorCode::NumericalDegeneracy, "dual facet orientation is inconsistent",
                  nlohmann::json{{"vertex", i}});
    }
    if (flip) std::reverse(rings[i].begin(), rings[i].end());
    std::rotate(rings[i].begin(), std::min_element(rings[i].begin(), rings[i].end()), rings[i].end());
  }
  return rings;
}

Plane dual_plane(const Point3& outward, const Point3& z) {
  const double len = norm(outward);
  return {outward / len, (1.0 + dot(outward, z)) / len};
}

/// Polar about z. With `symmetric`, opposite facets produce exactly opposite
/// polar vertices (z must be the origin).
Polytope polar_impl(const Polytope& p, const Point3& z, const std::vector<std::size_t>* facet_pairing) {
  const FaceLattice& lat = p.lattice();
  const std::size_t nf = lat.num_facets();
  auto lattice_from = [&](auto cycles, const std::vector<Point3>& outward) {
    std::vector<Plane> planes;
    planes.reserve(outward.size());
    for (const auto& o : outward) planes.push_back(dual_plane(o, z));
    return std::make_shared<const FaceLattice>(nf, std::move(cycles), std::move(planes));
  };

  if (p.kernel() == Kernel::Rational) {
    const QPoint3 qz = to_rational(z);
    std::vector<QPoint3> verts(nf);
    for (std::size_t k = 0; k < nf; ++k) {
      const QPlane& pl = p.exact_planes()[k];
      const Rational slack = pl.offset - dot(pl.normal, qz);
      verts[k] = pl.normal / slack;
    }
    std::vector<QPoint3> outward;
    std::vector<Point3> outward_d;
    std::vector<QPlane> planes;
    for (const auto& x : p.exact_vertices()) {
      const QPoint3 o = x - qz;
      outward.push_back(o);
      outward_d.push_back(to_double(o));
      planes.push_back({o, Rational(1 + dot(o, qz))});
    }
    auto cycles = dual_cycles(lat, verts, outward);
    for (auto& v : verts) v = v + qz;
    return Polytope::from_parts(std::move(verts), std::move(planes), lattice_from(std::move(cycles), outward_d),
                                p.tolerance());
  }

  std::vector<Point3> verts(nf);
  for (std::size_t k = 0; k < nf; ++k) {
    if (facet_pairing && (*facet_pairing)[k] < k) continue;
    const Plane& pl = lat.planes()[k];
    verts[k] = pl.normal / (pl.offset - dot(pl.normal, z));
    if (facet_pairing) verts[(*facet_pairing)[k]] = -verts[k];
  }
  std::vector<Point3> outward;
  for (const auto& x : p.vertices()) outward.push_back(x - z);
  auto cycles = dual_cycles(lat, verts, outward);
  for (auto& v : verts) v = v + z;
  return Polytope::from_parts(std::move(verts), lattice_from(std::move(cycles), outward), p.tolerance());
}

void require_interior(const Polytope& p, const Point3& z, double margin) {
  const double eps = margin * p.circumradius();
  const auto& planes = p.lattice().planes();
  for (std::size_t k = 0; k < planes.size(); ++k) {
    const double slack = planes[k].offset - dot(planes[k].normal, z);
    bool inside = slack > eps;
    if (inside && p.kernel() == Kernel::Rational) {
      const QPlane& q = p.exact_planes()[k];
      inside = sgn(q.offset - dot(q.normal, to_rational(z))) > 0;
    }
    if (!inside) {
      throw Error(ErrorCode::CenterOutsideBody, "center is not interior to the body",
                  nlohmann::json{{"facet", k}, {"slack", slack}, {"z", {z.x, z.y, z.z}}});
    }
  }
}

/// z -> |Q^z| with the dual combinatorics frozen at construction.
class PolarVolume {
 public:
  PolarVolume(const Polytope& q, const Point3& z0) : planes_(q.lattice().planes()) {
    std::vector<Point3> dual(planes_.size());
    for (std::size_t k = 0; k < planes_.size(); ++k) dual[k] = vertex(k, z0);
    std::vector<Point3> outward;
    for (const auto& x : q.vertices()) outward.push_back(x - z0);
    cycles_ = dual_cycles(q.lattice(), dual, outward);
  }

  double min_slack(const Point3& z) const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& pl : planes_) s = std::min(s, pl.offset - dot(pl.normal, z));
    return s;
  }

  double operator()(const Point3& z) const {
    std::vector<Point3> dual(planes_.size());
    for (std::size_t k = 0; k < planes_.size(); ++k) dual[k] = vertex(k, z);
    double six = 0.0;
    for (const auto& cyc : cycles_) {
      for (std::size_t k = 1; k + 1 < cyc.size(); ++k) six += det3(dual[cyc[0]], dual[cyc[k]], dual[cyc[k + 1]]);
    }
    return six / 6.0;
  }

 private:
  Point3 vertex(std::size_t k, const Point3& z) const {
    return planes_[k].normal / (planes_[k].offset - dot(planes_[k].normal, z));
  }

  std::vector<Plane> planes_;
  std::vector<std::vector<std::size_t>> cycles_;
};

}  // namespace

Polytope polar_about_origin(const Polytope& p) {
  require_interior(p, {0.0, 0.0, 0.0}, 0.0);
  return polar_impl(p, {0.0, 0.0, 0.0}, nullptr);
}

SymPolytope polar(const SymPolytope& p) {
  std::vector<std::size_t> fp(p.lattice().num_facets());
  for (std::size_t k = 0; k < fp.size(); ++k) fp[k] = p.opposite_facet(k);
  return SymPolytope(polar_impl(p.body(), {0.0, 0.0, 0.0}, &fp));
}

Polytope santalo_polar(const Polytope& p, const Point3& z, double margin) {
  require_interior(p, z, margin);
  return polar_impl(p, z, nullptr);
}

double santalo_polar_volume(const Polytope& p, const Point3& z) {
  require_interior(p, z, 0.0);
  return PolarVolume(p, z)(z);
}

SantaloResult santalo_point(const Polytope& q, const SantaloOptions& opts) {
  Point3 z{};
  for (const auto& v : q.vertices()) z = z + v;
  z = z / static_cast<double>(q.size());
  require_interior(q, z, 0.0);

  const PolarVolume f(q, z);
  double diam = 0.0;
  for (const auto& v : q.vertices()) diam = std::max(diam, 2.0 * norm(v - z));
  const double margin = 1e-12 * diam;

  auto gradient = [&](const Point3& x) {
    const double h = std::min(opts.fd_step * diam, 0.25 * f.min_slack(x));
    Point3 g;
    for (std::size_t i = 0; i < 3; ++i) {
      Point3 a = x;
      Point3 b = x;
      a[i] += h;
      b[i] -= h;
      g[i] = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
  };
  auto feasible = [&](const Point3& x) { return f.min_slack(x) > margin; };

  SantaloResult res;
  double fz = f(z);
  Point3 g = gradient(z);
  std::array<std::array<double, 3>, 3> hinv{};
  for (std::size_t i = 0; i < 3; ++i) hinv[i][i] = 1.0;
  bool scaled = false;

  std::size_t it = 0;
  for (; it < opts.max_iterations && norm(g) > opts.gradient_tol; ++it) {
    Point3 d;
    for (std::size_t i = 0; i < 3; ++i) d[i] = -(hinv[i][0] * g.x + hinv[i][1] * g.y + hinv[i][2] * g.z);
    double slope = dot(g, d);
    if (slope >= 0.0) {
      d = -g;
      slope = -dot(g, g);
      hinv = {};
      for (std::size_t i = 0; i < 3; ++i) hinv[i][i] = 1.0;
    }
    double t = 1.0;
    Point3 next = z + t * d;
    double fnext = feasible(next) ? f(next) : std::numeric_limits<double>::infinity();
    while (!(fnext <= fz + 1e-4 * t * slope) && t > 1e-20) {
      t *= 0.5;
      next = z + t * d;
      fnext = feasible(next) ? f(next) : std::numeric_limits<double>::infinity();
    }
    if (!(fnext <= fz)) break;
    const Point3 s = next - z;
    const Point3 gnext = gradient(next);
    const Point3 y = gnext - g;
    const double sy = dot(s, y);
    if (sy > 0.0) {
      if (!scaled) {
        const double gamma = sy / dot(y, y);
        for (std::size_t i = 0; i < 3; ++i) hinv[i][i] = gamma;
        scaled = true;
      }
      Point3 hy;
      for (std::size_t i = 0; i < 3; ++i) hy[i] = hinv[i][0] * y.x + hinv[i][1] * y.y + hinv[i][2] * y.z;
      const double yhy = dot(y, hy);
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          hinv[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    }
    z = next;
    fz = fnext;
    g = gnext;
  }
  res.iterations = it;

  if (norm(g) > opts.gradient_tol) {
    // Coordinate pattern search from the best iterate.
    res.used_fallback = true;
    double step = 0.01 * diam;
    std::size_t evals = 0;
    const std::size_t budget = 200 * opts.max_iterations;
    while (step > 1e-13 * diam && evals < budget) {
      bool moved = false;
      for (std::size_t i = 0; i < 3 && !moved; ++i) {
        for (double sgn_step : {step, -step}) {
          Point3 trial = z;
          trial[i] += sgn_step;
          ++evals;
          if (feasible(trial)) {
            const double ft = f(trial);
            if (ft < fz) {
              z = trial;
              fz = ft;
              moved = true;
              break;
            }
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    g = gradient(z);
    if (norm(g) > opts.gradient_tol) {
      throw Error(ErrorCode::NonConvergence, "Santalo point search did not reach the gradient tolerance",
                  nlohmann::json{{"best", {z.x, z.y, z.z}}, {"gradient_norm", norm(g)}, {"polar_volume", fz}});
    }
  }
  res.point = z;
  res.polar_volume = fz;
  res.gradient_norm = norm(g);
  return res;
}

VolumeProductReport volume_product(const SymPolytope& p) {
  VolumeProductReport r;
  r.volume_primal = volume(p);
  r.volume_polar = volume(polar(p));
  r.product = r.volume_primal * r.volume_polar;
  r.santalo_point = santalo_point(p);
  if (r.product.is_exact()) {
    r.mahler_gap = Real(Rational(r.product.rational() - mahler_bound()));
  } else {
    r.mahler_gap = Real(r.product.value() - 32.0 / 3.0);
  }
  return r;
}

DualityReport verify_incidence_duality(const SymPolytope& p) {
  const SymPolytope q = polar(p);
  const FaceLattice& lp = p.lattice();
  const FaceLattice& lq = q.lattice();
  DualityReport r;
  r.primal_vertices = lp.num_vertices();
  r.primal_facets = lp.num_facets();
  r.polar_vertices = lq.num_vertices();
  r.polar_facets = lq.num_facets();
  auto counts = [&] {
    return nlohmann::json{{"V", r.primal_vertices}, {"F", r.primal_facets}, {"V_polar", r.polar_vertices},
                          {"F_polar", r.polar_facets}};
  };
  if (r.polar_vertices != r.primal_facets || r.polar_facets != r.primal_vertices) {
    throw Error(ErrorCode::DualityViolation, "vertex/facet counts are not swapped", counts());
  }
  for (std::size_t k = 0; k < lp.num_facets(); ++k) {
    for (std::size_t i = 0; i < lp.num_vertices(); ++i) {
      const auto& fk = lp.facets()[k];
      const auto& gi = lq.facets()[i];
      const bool in_p = std::find(fk.begin(), fk.end(), i) != fk.end();
      const bool in_q = std::find(gi.begin(), gi.end(), k) != gi.end();
      if (in_p != in_q) {
        throw Error(ErrorCode::DualityViolation, "incidence is not transposed",
                    nlohmann::json{{"facet", k}, {"vertex", i}});
      }
    }
  }
  // The dual lattice must also be what a fresh hull of the polar vertices finds.
  const Polytope rehull = q.kernel() == Kernel::Rational
                              ? Polytope::hull(std::span<const QPoint3>(q.exact_vertices()), HullOptions{p.tolerance()})
                              : Polytope::hull(std::span<const Point3>(q.vertices()), HullOptions{p.tolerance()});
  if (rehull.size() != q.size() || !rehull.lattice().same_labeled(lq)) {
    auto detail = counts();
    detail["rehull_vertices"] = rehull.size();
    detail["rehull_facets"] = rehull.lattice().num_facets();
    throw Error(ErrorCode::DualityViolation, "polar lattice disagrees with the hull of the polar vertices", detail);
  }
  r.incidence_transposed = true;
  return r;
}

}  // namespace mahler
