#pragma once

// Gift-wrapping hull for small point sets, generic over double and exact
// rationals. Orientation predicates are exact in both instantiations (the
// double one is filtered with an exact fallback), so the wrapped lattice is
// the true lattice of the given coordinates. In the double instantiation
// edge-adjacent facets whose planes agree within `eps` (an absolute length:
// relative tolerance times input radius) are then merged, and vertices left
// on fewer than three facets are dropped.

#include "mahler/arith.hpp"
#include "mahler/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace mahler::detail {

template <class T>
struct HullResult {
  std::vector<std::size_t> kept;                 // input indices of the vertices, increasing
  std::vector<std::vector<std::size_t>> facets;  // cycles over positions in `kept`
  std::vector<Vec3<T>> normals;                  // outward, not normalized
  std::vector<T> offsets;
};

inline double length(const Vec3<double>& v) { return norm(v); }
inline double length(const Vec3<Rational>& v) { return norm(to_double(v)); }

inline bool lex_less(const Point3& a, const Point3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}
inline bool lex_less(const QPoint3& a, const QPoint3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

/// Sign of det[b - a, c - a, p - a].
inline int orient3d(const QPoint3& a, const QPoint3& b, const QPoint3& c, const QPoint3& p) {
  return sgn(det3(b - a, c - a, p - a));
}

inline int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& p) {
  const Point3 u = b - a;
  const Point3 v = c - a;
  const Point3 w = p - a;
  const double m1 = v.y * w.z, m2 = v.z * w.y;
  const double m3 = v.z * w.x, m4 = v.x * w.z;
  const double m5 = v.x * w.y, m6 = v.y * w.x;
  const double det = u.x * (m1 - m2) + u.y * (m3 - m4) + u.z * (m5 - m6);
  const double permanent = std::fabs(u.x) * (std::fabs(m1) + std::fabs(m2)) +
                           std::fabs(u.y) * (std::fabs(m3) + std::fabs(m4)) +
                           std::fabs(u.z) * (std::fabs(m5) + std::fabs(m6));
  const double bound = 8.0 * std::numeric_limits<double>::epsilon() * permanent;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return orient3d(to_rational(a), to_rational(b), to_rational(c), to_rational(p));
}

/// Sign of (b - a) x (c - a) in the plane.
inline int orient2d(const Rational& ax, const Rational& ay, const Rational& bx, const Rational& by,
                    const Rational& cx, const Rational& cy) {
  return sgn(Rational((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)));
}

inline int orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
  const double l = (bx - ax) * (cy - ay);
  const double r = (by - ay) * (cx - ax);
  const double det = l - r;
  const double bound = 4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(l) + std::fabs(r));
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return orient2d(to_rational(ax), to_rational(ay), to_rational(bx), to_rational(by), to_rational(cx),
                  to_rational(cy));
}

template <class T>
class HullBuilder {
 public:
  HullBuilder(std::span<const Vec3<T>> pts, double eps) : pts_(pts), eps_(eps) {}

  /// Four input indices spanning 3 dimensions (beyond eps in double), or nullopt.
  std::optional<std::array<std::size_t, 4>> certificate() const {
    const std::size_t n = pts_.size();
    if (n < 4) return std::nullopt;
    std::array<std::size_t, 4> c{0, 0, 0, 0};
    std::size_t i = 1;
    while (i < n && same_point(pts_[0], pts_[i])) ++i;
    if (i == n) return std::nullopt;
    c[1] = i;
    std::size_t j = 1;
    while (j < n && (j == i || collinear(pts_[0], pts_[i], pts_[j]))) ++j;
    if (j == n) return std::nullopt;
    c[2] = j;
    const Vec3<T> normal = cross(pts_[i] - pts_[0], pts_[j] - pts_[0]);
    std::size_t k = 1;
    while (k < n && side(normal, pts_[0], pts_[k]) == 0) ++k;
    if (k == n) return std::nullopt;
    c[3] = k;
    return c;
  }

  HullResult<T> run() const {
    if (!certificate()) {
      throw Error(ErrorCode::DegenerateInput, "point set spans fewer than 3 dimensions");
    }
    const std::size_t n = pts_.size();

    std::vector<std::vector<std::size_t>> cycles;
    std::vector<Tri> planes;
    std::vector<std::vector<signed char>> sides;  // orient(plane, p) per facet, cached
    std::vector<std::vector<std::size_t>> facets_of(n);
    std::deque<std::size_t> queue;

    auto known = [&](const Tri& tri) {
      // Facets are exact, so a plane through three vertices of a known facet is that facet.
      for (std::size_t f : facets_of[tri[0]]) {
        const auto& s = sides[f];
        if (s[tri[1]] == 0 && s[tri[2]] == 0) return true;
      }
      return false;
    };
    auto add_facet = [&](const Tri& tri) {
      if (known(tri)) return;
      std::vector<signed char> s(n);
      std::vector<std::size_t> on_plane;
      for (std::size_t p = 0; p < n; ++p) {
        s[p] = static_cast<signed char>(orient(tri, p));
        if (s[p] == 0) on_plane.push_back(p);
      }
      std::vector<std::size_t> cyc = polygon(on_plane, tri);
      for (std::size_t v : on_plane) facets_of[v].push_back(cycles.size());
      queue.push_back(cycles.size());
      cycles.push_back(std::move(cyc));
      planes.push_back(tri);
      sides.push_back(std::move(s));
    };

    add_facet(first_facet());
    while (!queue.empty()) {
      const std::size_t f = queue.front();
      queue.pop_front();
      const std::vector<std::size_t> cyc = cycles[f];
      for (std::size_t e = 0; e < cyc.size(); ++e) {
        add_facet(pivot(sides[f], cyc[e], cyc[(e + 1) % cyc.size()]));
        if (cycles.size() > 4 * n + 8) {
          throw Error(ErrorCode::NumericalDegeneracy, "facet enumeration did not close");
        }
      }
    }
    check_closed(cycles);
    for (std::size_t f = 0; f < cycles.size(); ++f) {
      for (std::size_t p = 0; p < n; ++p) {
        if (sides[f][p] > 0) {
          throw Error(ErrorCode::NumericalDegeneracy, "supporting plane violated",
                      nlohmann::json{{"facet", cycles[f]}, {"point", p}});
        }
      }
    }
    if constexpr (!is_exact_v<T>) {
      if (eps_ > 0.0) merge_coplanar(cycles);
    }
    return finish(cycles, planes);
  }

 private:
  /// Ordered triple (a, b, c): orient(a, b, c, p) <= 0 for every input point.
  using Tri = std::array<std::size_t, 3>;

  int orient(const Tri& t, std::size_t p) const { return orient3d(pts_[t[0]], pts_[t[1]], pts_[t[2]], pts_[p]); }

  int side(const Vec3<T>& n, const Vec3<T>& a, const Vec3<T>& p) const {
    const T s = dot(n, p - a);
    if constexpr (is_exact_v<T>) {
      return sgn(s);
    } else {
      return sign_of(s, eps_ * length(n));
    }
  }

  bool same_point(const Vec3<T>& a, const Vec3<T>& b) const {
    if constexpr (is_exact_v<T>) {
      return a == b;
    } else {
      return length(a - b) <= eps_;
    }
  }

  bool collinear(const Vec3<T>& a, const Vec3<T>& b, const Vec3<T>& c) const {
    const Vec3<T> n = cross(b - a, c - a);
    if constexpr (is_exact_v<T>) {
      return sgn(n.x) == 0 && sgn(n.y) == 0 && sgn(n.z) == 0;
    } else {
      return length(n) <= eps_ * length(b - a);
    }
  }

  bool exactly_collinear(std::size_t a, std::size_t b, std::size_t c) const {
    const QPoint3 n = exact_normal({a, b, c});
    return sgn(n.x) == 0 && sgn(n.y) == 0 && sgn(n.z) == 0;
  }

  QPoint3 exact_normal(const Tri& t) const {
    if constexpr (is_exact_v<T>) {
      return cross(pts_[t[1]] - pts_[t[0]], pts_[t[2]] - pts_[t[0]]);
    } else {
      const QPoint3 a = to_rational(pts_[t[0]]);
      return cross(to_rational(pts_[t[1]]) - a, to_rational(pts_[t[2]]) - a);
    }
  }

  Tri first_facet() const {
    const std::size_t n = pts_.size();
    std::size_t a = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (lex_less(pts_[i], pts_[a])) a = i;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (k == a || exactly_collinear(a, j, k)) continue;
        bool pos = false;
        bool neg = false;
        for (std::size_t p = 0; p < n && !(pos && neg); ++p) {
          const int s = orient({a, j, k}, p);
          pos = pos || s > 0;
          neg = neg || s < 0;
        }
        if (pos && neg) continue;
        return pos ? Tri{a, k, j} : Tri{a, j, k};
      }
    }
    throw Error(ErrorCode::NumericalDegeneracy, "no supporting plane through the lexicographic minimum");
  }

  /// Plane of the facet across edge (u, v) of a facet with cached sides.
  Tri pivot(const std::vector<signed char>& below, std::size_t u, std::size_t v) const {
    const std::size_t n = pts_.size();
    std::optional<std::size_t> best;
    for (std::size_t p = 0; p < n; ++p) {
      if (below[p] >= 0) continue;
      if (!best || orient({u, *best, v}, p) > 0) best = p;
    }
    if (!best) throw Error(ErrorCode::NumericalDegeneracy, "flat point set while pivoting");
    return {u, *best, v};
  }

  /// Extreme points of a coplanar set, counter-clockwise seen from outside,
  /// starting at the smallest index.
  std::vector<std::size_t> polygon(std::vector<std::size_t> idx, const Tri& tri) const {
    const QPoint3 normal = exact_normal(tri);
    std::size_t axis = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (abs(normal[k]) > abs(normal[axis])) axis = k;
    }
    const std::size_t iu = (axis + 1) % 3;
    const std::size_t iv = (axis + 2) % 3;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const Vec3<T>& pa = pts_[a];
      const Vec3<T>& pb = pts_[b];
      if (pa[iu] != pb[iu]) return pa[iu] < pb[iu];
      return pa[iv] < pb[iv];
    });
    auto turns_left = [&](std::size_t o, std::size_t a, std::size_t b) {
      return orient2d(pts_[o][iu], pts_[o][iv], pts_[a][iu], pts_[a][iv], pts_[b][iu], pts_[b][iv]) > 0;
    };
    std::vector<std::size_t> hull(2 * idx.size() + 1);
    std::size_t k = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      while (k >= 2 && !turns_left(hull[k - 2], hull[k - 1], idx[i])) --k;
      hull[k++] = idx[i];
    }
    for (std::size_t i = idx.size() - 1, lo = k + 1; i-- > 0;) {
      while (k >= lo && !turns_left(hull[k - 2], hull[k - 1], idx[i])) --k;
      hull[k++] = idx[i];
    }
    hull.resize(k > 0 ? k - 1 : 0);
    if (hull.size() < 3) {
      throw Error(ErrorCode::NumericalDegeneracy, "facet polygon collapsed", nlohmann::json{{"vertices", idx}});
    }
    if (sgn(normal[axis]) < 0) std::reverse(hull.begin(), hull.end());
    std::rotate(hull.begin(), std::min_element(hull.begin(), hull.end()), hull.end());
    return hull;
  }

  /// Each directed edge exactly once, each undirected edge in two facets.
  static void check_closed(const std::vector<std::vector<std::size_t>>& cycles) {
    std::map<std::pair<std::size_t, std::size_t>, int> directed;
    for (const auto& cyc : cycles) {
      for (std::size_t e = 0; e < cyc.size(); ++e) {
        const auto key = std::make_pair(cyc[e], cyc[(e + 1) % cyc.size()]);
        if (++directed[key] > 1) {
          throw Error(ErrorCode::NumericalDegeneracy, "edge used twice in the same direction",
                      nlohmann::json{{"edge", {key.first, key.second}}});
        }
      }
    }
    for (const auto& [key, count] : directed) {
      if (!directed.count({key.second, key.first})) {
        throw Error(ErrorCode::NumericalDegeneracy, "boundary edge without a neighbouring facet",
                    nlohmann::json{{"edge", {key.first, key.second}}});
      }
    }
  }

  Point3 newell(const std::vector<std::size_t>& cyc) const {
    Point3 n{0.0, 0.0, 0.0};
    for (std::size_t e = 0; e < cyc.size(); ++e) {
      const Point3 a = to_double(pts_[cyc[e]]);
      const Point3 b = to_double(pts_[cyc[(e + 1) % cyc.size()]]);
      n.x += (a.y - b.y) * (a.z + b.z);
      n.y += (a.z - b.z) * (a.x + b.x);
      n.z += (a.x - b.x) * (a.y + b.y);
    }
    return n;
  }

  void merge_coplanar(std::vector<std::vector<std::size_t>>& cycles) const {
    for (int round = 0; round < 16; ++round) {
      const std::size_t nf = cycles.size();
      std::vector<Point3> normal(nf);
      std::vector<double> offset(nf);
      for (std::size_t f = 0; f < nf; ++f) {
        normal[f] = newell(cycles[f]);
        normal[f] = normal[f] / norm(normal[f]);
        double s = 0.0;
        for (std::size_t v : cycles[f]) s += dot(normal[f], to_double(pts_[v]));
        offset[f] = s / double(cycles[f].size());
      }
      auto within = [&](std::size_t f, std::size_t g) {
        for (std::size_t v : cycles[g]) {
          if (std::fabs(dot(normal[f], to_double(pts_[v])) - offset[f]) > eps_) return false;
        }
        return true;
      };
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> owner;
      for (std::size_t f = 0; f < nf; ++f) {
        for (std::size_t e = 0; e < cycles[f].size(); ++e) {
          owner[{cycles[f][e], cycles[f][(e + 1) % cycles[f].size()]}] = f;
        }
      }
      std::vector<std::size_t> root(nf);
      std::iota(root.begin(), root.end(), 0);
      auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
      };
      bool merged = false;
      for (const auto& [edge, f] : owner) {
        const std::size_t g = owner.at({edge.second, edge.first});
        if (f < g && find(f) != find(g) && within(f, g) && within(g, f)) {
          root[find(g)] = find(f);
          merged = true;
        }
      }

      std::vector<std::vector<std::size_t>> next;
      if (merged) {
        std::map<std::size_t, std::vector<std::size_t>> clusters;
        for (std::size_t f = 0; f < nf; ++f) clusters[find(f)].push_back(f);
        for (const auto& [r, members] : clusters) {
          if (members.size() == 1) {
            next.push_back(cycles[members[0]]);
            continue;
          }
          next.push_back(boundary(cycles, members));
        }
      } else {
        next = cycles;
      }

      std::map<std::size_t, std::size_t> count;
      for (const auto& cyc : next) {
        for (std::size_t v : cyc) ++count[v];
      }
      bool dropped = false;
      for (auto& cyc : next) {
        const std::size_t before = cyc.size();
        std::erase_if(cyc, [&](std::size_t v) { return count[v] < 3; });
        dropped = dropped || cyc.size() != before;
        if (cyc.size() < 3) {
          throw Error(ErrorCode::NumericalDegeneracy, "facet vanished while merging coplanar facets");
        }
        std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
      }
      cycles = std::move(next);
      if (!merged && !dropped) return;
      check_closed(cycles);
    }
    throw Error(ErrorCode::NumericalDegeneracy, "coplanar facet merging did not settle");
  }

  /// Outer cycle of a cluster of facets: directed edges without their twin.
  static std::vector<std::size_t> boundary(const std::vector<std::vector<std::size_t>>& cycles,
                                           const std::vector<std::size_t>& members) {
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (std::size_t f : members) {
      const auto& cyc = cycles[f];
      for (std::size_t e = 0; e < cyc.size(); ++e) ++edges[{cyc[e], cyc[(e + 1) % cyc.size()]}];
    }
    std::map<std::size_t, std::size_t> succ;
    for (const auto& [e, c] : edges) {
      if (edges.count({e.second, e.first})) continue;
      if (succ.count(e.first)) {
        throw Error(ErrorCode::NumericalDegeneracy, "merged facet boundary is not a simple cycle");
      }
      succ[e.first] = e.second;
    }
    if (succ.empty()) throw Error(ErrorCode::NumericalDegeneracy, "merged facet has no boundary");
    std::vector<std::size_t> cyc{succ.begin()->first};
    for (std::size_t v = succ.begin()->second; v != cyc.front(); v = succ.at(v)) {
      cyc.push_back(v);
      if (cyc.size() > succ.size()) break;
    }
    if (cyc.size() != succ.size()) {
      throw Error(ErrorCode::NumericalDegeneracy, "merged facet boundary splits into several cycles");
    }
    return cyc;
  }

  HullResult<T> finish(const std::vector<std::vector<std::size_t>>& cycles, const std::vector<Tri>& planes) const {
    const std::size_t n = pts_.size();
    std::size_t num_edges = 0;
    for (const auto& cyc : cycles) num_edges += cyc.size();
    num_edges /= 2;

    std::vector<std::size_t> new_index(n, n);
    HullResult<T> out;
    for (const auto& cyc : cycles) {
      for (std::size_t v : cyc) new_index[v] = 0;
    }
    for (std::size_t p = 0; p < n; ++p) {
      if (new_index[p] == 0) {
        new_index[p] = out.kept.size();
        out.kept.push_back(p);
      }
    }
    const std::size_t num_vertices = out.kept.size();
    if (num_vertices + cycles.size() != num_edges + 2) {
      throw Error(ErrorCode::NumericalDegeneracy, "Euler characteristic mismatch",
                  nlohmann::json{{"V", num_vertices}, {"E", num_edges}, {"F", cycles.size()}});
    }

    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> order;
    for (std::size_t f = 0; f < cycles.size(); ++f) {
      std::vector<std::size_t> key;
      for (std::size_t v : cycles[f]) key.push_back(new_index[v]);
      std::sort(key.begin(), key.end());
      order.emplace_back(std::move(key), f);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [key, f] : order) {
      std::vector<std::size_t> cyc;
      for (std::size_t v : cycles[f]) cyc.push_back(new_index[v]);
      out.facets.push_back(std::move(cyc));
      if constexpr (is_exact_v<T>) {
        const Vec3<T> nrm = exact_normal(planes[f]);
        out.normals.push_back(nrm);
        out.offsets.push_back(dot(nrm, pts_[planes[f][0]]));
      } else {
        const Point3 nrm = newell(cycles[f]);
        double h = 0.0;
        for (std::size_t v : cycles[f]) h += dot(nrm, pts_[v]);
        out.normals.push_back(nrm);
        out.offsets.push_back(h / double(cycles[f].size()));
      }
    }
    return out;
  }

  std::span<const Vec3<T>> pts_;
  double eps_;
};

}  // namespace mahler::detail
