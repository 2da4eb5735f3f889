#include "mahler/polytope.hpp"

#include "hull.hpp"
#include "mahler/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mahler {

// ---------------------------------------------------------------- FaceLattice

FaceLattice::FaceLattice(std::size_t num_vertices, std::vector<std::vector<std::size_t>> facets,
                         std::vector<Plane> planes)
    : num_vertices_(num_vertices), facets_(std::move(facets)), planes_(std::move(planes)) {
  if (planes_.size() != facets_.size()) {
    throw Error(ErrorCode::InternalInconsistency, "facet/plane count mismatch");
  }
  std::vector<std::array<std::size_t, 2>> pairs;
  for (const auto& cyc : facets_) {
    if (cyc.size() < 3) {
      throw Error(ErrorCode::NumericalDegeneracy, "facet with fewer than three vertices",
                  nlohmann::json{{"vertices", cyc}});
    }
    for (std::size_t e = 0; e < cyc.size(); ++e) {
      std::size_t a = cyc[e];
      std::size_t b = cyc[(e + 1) % cyc.size()];
      if (a >= num_vertices_ || b >= num_vertices_) {
        throw Error(ErrorCode::InternalInconsistency, "facet references a missing vertex");
      }
      if (a > b) std::swap(a, b);
      pairs.push_back({a, b});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  edges_ = std::move(pairs);

  vertex_edges_.assign(num_vertices_, {});
  for (std::size_t j = 0; j < edges_.size(); ++j) {
    vertex_edges_[edges_[j][0]].push_back(j);
    vertex_edges_[edges_[j][1]].push_back(j);
  }
  vertex_facets_.assign(num_vertices_, {});
  std::vector<std::vector<std::size_t>> incident(edges_.size());
  for (std::size_t k = 0; k < facets_.size(); ++k) {
    const auto& cyc = facets_[k];
    for (std::size_t e = 0; e < cyc.size(); ++e) {
      incident[find_edge(cyc[e], cyc[(e + 1) % cyc.size()])].push_back(k);
      vertex_facets_[cyc[e]].push_back(k);
    }
  }
  edge_facets_.resize(edges_.size());
  for (std::size_t j = 0; j < edges_.size(); ++j) {
    if (incident[j].size() != 2) {
      throw Error(ErrorCode::NumericalDegeneracy, "edge not shared by exactly two facets",
                  nlohmann::json{{"edge", {edges_[j][0], edges_[j][1]}}, {"facets", incident[j]}});
    }
    edge_facets_[j] = {incident[j][0], incident[j][1]};
  }
  for (std::size_t i = 0; i < num_vertices_; ++i) {
    if (vertex_edges_[i].size() < 3) {
      throw Error(ErrorCode::NumericalDegeneracy, "vertex of degree below three",
                  nlohmann::json{{"vertex", i}});
    }
  }
  if (num_vertices_ + facets_.size() != edges_.size() + 2) {
    throw Error(ErrorCode::NumericalDegeneracy, "Euler characteristic mismatch",
                nlohmann::json{{"V", num_vertices_}, {"E", edges_.size()}, {"F", facets_.size()}});
  }
}

std::size_t FaceLattice::max_degree() const {
  std::size_t d = 0;
  for (const auto& inc : vertex_edges_) d = std::max(d, inc.size());
  return d;
}

std::size_t FaceLattice::find_edge(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  const std::array<std::size_t, 2> key{a, b};
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return edges_.size();
  return static_cast<std::size_t>(it - edges_.begin());
}

bool FaceLattice::same_labeled(const FaceLattice& other) const {
  if (num_vertices_ != other.num_vertices_ || facets_.size() != other.facets_.size() ||
      edges_ != other.edges_) {
    return false;
  }
  auto keys = [](const std::vector<std::vector<std::size_t>>& facets) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(facets.size());
    for (auto cyc : facets) {
      std::sort(cyc.begin(), cyc.end());
      out.push_back(std::move(cyc));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return keys(facets_) == keys(other.facets_);
}

// ------------------------------------------------------------------- Polytope

namespace {

template <class T>
double radius_of(std::span<const Vec3<T>> pts) {
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, norm(to_double(p)));
  return r;
}

Plane normalized(const Point3& n, double offset) {
  const double len = norm(n);
  return {n / len, offset / len};
}

}  // namespace

Polytope Polytope::hull(std::span<const Point3> points, const HullOptions& opts) {
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
    }
  }
  const double eps = opts.tol * radius_of(points);
  const auto res = detail::HullBuilder<double>(points, eps).run();
  Polytope out;
  out.kernel_ = Kernel::Double;
  out.tol_ = opts.tol;
  out.source_ = res.kept;
  for (std::size_t i : res.kept) out.vertices_.push_back(points[i]);
  std::vector<Plane> planes;
  for (std::size_t k = 0; k < res.facets.size(); ++k) planes.push_back(normalized(res.normals[k], res.offsets[k]));
  out.lattice_ = std::make_shared<const FaceLattice>(res.kept.size(), res.facets, std::move(planes));
  return out;
}

Polytope Polytope::hull(std::span<const QPoint3> points, const HullOptions& opts) {
  const auto res = detail::HullBuilder<Rational>(points, 0.0).run();
  Polytope out;
  out.kernel_ = Kernel::Rational;
  out.tol_ = opts.tol;
  out.source_ = res.kept;
  for (std::size_t i : res.kept) {
    out.exact_vertices_.push_back(points[i]);
    out.vertices_.push_back(to_double(points[i]));
  }
  std::vector<Plane> planes;
  for (std::size_t k = 0; k < res.facets.size(); ++k) {
    out.exact_planes_.push_back({res.normals[k], res.offsets[k]});
    planes.push_back(normalized(to_double(res.normals[k]), to_double(res.offsets[k])));
  }
  out.lattice_ = std::make_shared<const FaceLattice>(res.kept.size(), res.facets, std::move(planes));
  return out;
}

Polytope Polytope::from_parts(std::vector<Point3> vertices, std::shared_ptr<const FaceLattice> lattice,
                              double tol) {
  Polytope out;
  out.kernel_ = Kernel::Double;
  out.tol_ = tol;
  out.source_.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) out.source_[i] = i;
  out.vertices_ = std::move(vertices);
  out.lattice_ = std::move(lattice);
  return out;
}

Polytope Polytope::from_parts(std::vector<QPoint3> vertices, std::vector<QPlane> planes,
                              std::shared_ptr<const FaceLattice> lattice, double tol) {
  Polytope out;
  out.kernel_ = Kernel::Rational;
  out.tol_ = tol;
  out.source_.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    out.source_[i] = i;
    out.vertices_.push_back(to_double(vertices[i]));
  }
  out.exact_vertices_ = std::move(vertices);
  out.exact_planes_ = std::move(planes);
  out.lattice_ = std::move(lattice);
  return out;
}

double Polytope::circumradius() const { return radius_of<double>(vertices_); }

Polytope Polytope::translated(const Point3& shift) const {
  Polytope out = *this;
  for (auto& v : out.vertices_) v = v + shift;
  std::vector<Plane> planes = lattice_->planes();
  for (auto& pl : planes) pl.offset += dot(pl.normal, shift);
  if (kernel_ == Kernel::Rational) {
    const QPoint3 q = to_rational(shift);
    for (auto& v : out.exact_vertices_) v = v + q;
    for (auto& pl : out.exact_planes_) pl.offset += dot(pl.normal, q);
    for (std::size_t i = 0; i < out.vertices_.size(); ++i) out.vertices_[i] = to_double(out.exact_vertices_[i]);
  }
  out.lattice_ = std::make_shared<const FaceLattice>(lattice_->num_vertices(), lattice_->facets(), std::move(planes));
  return out;
}

// ---------------------------------------------------------------- SymPolytope

namespace {

template <class T>
std::vector<std::size_t> exact_pairing(const std::vector<Vec3<T>>& v) {
  std::vector<std::size_t> pairing(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (pairing[i] != v.size()) continue;
    const Vec3<T> neg = -v[i];
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (pairing[j] == v.size() && v[j] == neg) {
        pairing[i] = j;
        pairing[j] = i;
        break;
      }
    }
    if (pairing[i] == v.size()) {
      throw Error(ErrorCode::NumericalDegeneracy, "vertex without an exact antipode",
                  nlohmann::json{{"vertex", i}});
    }
  }
  return pairing;
}

}  // namespace

SymPolytope::SymPolytope(Polytope body) : body_(std::move(body)) {
  pairing_ = body_.kernel() == Kernel::Rational ? exact_pairing(body_.exact_vertices())
                                                 : exact_pairing(body_.vertices());
  const auto& lat = body_.lattice();
  std::map<std::vector<std::size_t>, std::size_t> by_set;
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    auto key = lat.facets()[k];
    std::sort(key.begin(), key.end());
    by_set.emplace(std::move(key), k);
  }
  facet_pairing_.resize(lat.num_facets());
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    std::vector<std::size_t> key;
    for (std::size_t v : lat.facets()[k]) key.push_back(pairing_[v]);
    std::sort(key.begin(), key.end());
    const auto it = by_set.find(key);
    if (it == by_set.end()) {
      throw Error(ErrorCode::NumericalDegeneracy, "facet without an opposite facet",
                  nlohmann::json{{"facet", lat.facets()[k]}});
    }
    facet_pairing_[k] = it->second;
  }
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    const bool positive = body_.kernel() == Kernel::Rational ? sgn(body_.exact_planes()[k].offset) > 0
                                                              : lat.planes()[k].offset > 0.0;
    if (!positive) {
      throw Error(ErrorCode::NumericalDegeneracy, "origin is not interior",
                  nlohmann::json{{"facet", lat.facets()[k]}});
    }
  }
  std::optional<std::array<std::size_t, 4>> cert;
  if (body_.kernel() == Kernel::Rational) {
    cert = detail::HullBuilder<Rational>(body_.exact_vertices(), 0.0).certificate();
  } else {
    cert = detail::HullBuilder<double>(body_.vertices(), body_.tolerance() * body_.circumradius()).certificate();
  }
  if (!cert) throw Error(ErrorCode::DegenerateInput, "vertex set spans fewer than 3 dimensions");
  certificate_ = *cert;
}

std::vector<std::size_t> SymPolytope::pair_representatives() const {
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < pairing_.size(); ++i) {
    if (i < pairing_[i]) reps.push_back(i);
  }
  return reps;
}

double SymPolytope::inradius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& pl : lattice().planes()) r = std::min(r, pl.offset);
  return r;
}

namespace {

double distance(const Point3& a, const Point3& b) { return norm(a - b); }
double distance(const QPoint3& a, const QPoint3& b) { return norm(to_double(a - b)); }

template <class T>
SymPolytope build_sym_impl(std::span<const Vec3<T>> points, double tol) {
  if (points.empty()) throw Error(ErrorCode::DegenerateInput, "empty point set");
  const double eps = tol * radius_of(points);

  std::vector<Vec3<T>> unique;
  for (const auto& p : points) {
    bool duplicate = false;
    for (std::size_t q = 0; q < unique.size(); ++q) {
      if (unique[q] == p) {
        duplicate = true;
        break;
      }
      if (eps > 0.0 && distance(unique[q], p) <= eps) {
        throw Error(ErrorCode::ToleranceConflict, "distinct input points closer than the tolerance",
                    nlohmann::json{{"first", q}, {"tol", tol}});
      }
    }
    if (!duplicate) unique.push_back(p);
  }

  const std::size_t n = unique.size();
  std::vector<char> paired(n, 0);
  std::vector<char> dropped(n, 0);
  std::vector<Vec3<T>> extras;
  for (std::size_t i = 0; i < n; ++i) {
    if (paired[i]) continue;
    const Vec3<T> zero{};
    if (unique[i] == zero || (eps > 0.0 && distance(unique[i], zero) <= eps)) {
      dropped[i] = 1;
      continue;
    }
    const Vec3<T> neg = -unique[i];
    std::size_t match = n;
    for (std::size_t j = i + 1; j < n && match == n; ++j) {
      if (!paired[j] && unique[j] == neg) match = j;
    }
    for (std::size_t j = i + 1; j < n && match == n && eps > 0.0; ++j) {
      if (!paired[j] && distance(unique[j], neg) <= eps) match = j;
    }
    paired[i] = 1;
    if (match == n) {
      extras.push_back(neg);
      continue;
    }
    paired[match] = 1;
    const Vec3<T> half = (unique[i] - unique[match]) / T(2);
    unique[i] = half;
    unique[match] = -half;
  }
  std::vector<Vec3<T>> full;
  for (std::size_t i = 0; i < n; ++i) {
    if (!dropped[i]) full.push_back(unique[i]);
  }
  full.insert(full.end(), extras.begin(), extras.end());
  if (full.empty()) throw Error(ErrorCode::DegenerateInput, "only the origin was given");
  return SymPolytope(Polytope::hull(std::span<const Vec3<T>>(full), HullOptions{tol}));
}

}  // namespace

SymPolytope build_sym_polytope(std::span<const Point3> points, double tol) {
  if (tol < 0.0) throw Error(ErrorCode::InvalidArgument, "negative tolerance");
  return build_sym_impl<double>(points, tol);
}

SymPolytope build_sym_polytope(std::span<const QPoint3> points, double tol) {
  if (tol < 0.0) throw Error(ErrorCode::InvalidArgument, "negative tolerance");
  return build_sym_impl<Rational>(points, tol);
}

// --------------------------------------------------------------------- volume

namespace {

template <class T>
T fan_volume(const std::vector<Vec3<T>>& v, const FaceLattice& lat) {
  T six{};
  for (const auto& cyc : lat.facets()) {
    for (std::size_t k = 1; k + 1 < cyc.size(); ++k) six += det3(v[cyc[0]], v[cyc[k]], v[cyc[k + 1]]);
  }
  return T(six / T(6));
}

}  // namespace

Real volume(const Polytope& p) {
  if (p.kernel() == Kernel::Rational) return Real(fan_volume(p.exact_vertices(), p.lattice()));
  return Real(fan_volume(p.vertices(), p.lattice()));
}

double determinant(const Matrix3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

SymPolytope linear_image(const SymPolytope& p, const Matrix3& a, double tol) {
  double scale = 0.0;
  for (const auto& row : a) {
    for (double x : row) scale = std::max(scale, std::fabs(x));
  }
  if (!(std::fabs(determinant(a)) >= tol * scale * scale * scale) || scale == 0.0) {
    throw Error(ErrorCode::SingularMatrix, "matrix is singular within tolerance",
                nlohmann::json{{"det", determinant(a)}});
  }
  if (p.kernel() == Kernel::Rational) {
    std::array<std::array<Rational, 3>, 3> q;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) q[r][c] = to_rational(a[r][c]);
    }
    std::vector<QPoint3> pts;
    for (const auto& v : p.exact_vertices()) {
      QPoint3 w;
      for (std::size_t r = 0; r < 3; ++r) w[r] = q[r][0] * v.x + q[r][1] * v.y + q[r][2] * v.z;
      pts.push_back(w);
    }
    return build_sym_polytope(pts, 0.0);
  }
  std::vector<Point3> pts;
  for (const auto& v : p.vertices()) {
    Point3 w;
    for (std::size_t r = 0; r < 3; ++r) w[r] = a[r][0] * v.x + a[r][1] * v.y + a[r][2] * v.z;
    pts.push_back(w);
  }
  return build_sym_polytope(pts, p.tolerance());
}

SymPolytope to_double_kernel(const SymPolytope& p) {
  if (p.kernel() == Kernel::Double) return p;
  return build_sym_polytope(p.vertices(), p.tolerance() > 0.0 ? p.tolerance() : 1e-9);
}

SymPolytope snap_to_rational(const SymPolytope& p, int bits) {
  std::vector<QPoint3> pts;
  for (const auto& v : p.vertices()) {
    pts.push_back({snap_rational(v.x, bits), snap_rational(v.y, bits), snap_rational(v.z, bits)});
  }
  return build_sym_polytope(pts, 0.0);
}

namespace shapes {

namespace {

SymPolytope from_integers(const std::vector<std::array<int, 3>>& pts, Kernel k) {
  if (k == Kernel::Rational) {
    std::vector<QPoint3> q;
    for (const auto& p : pts) q.push_back({Rational(p[0]), Rational(p[1]), Rational(p[2])});
    return build_sym_polytope(q, 0.0);
  }
  std::vector<Point3> d;
  for (const auto& p : pts) d.push_back({double(p[0]), double(p[1]), double(p[2])});
  return build_sym_polytope(d, 1e-9);
}

}  // namespace

SymPolytope cube(Kernel k) {
  std::vector<std::array<int, 3>> pts;
  for (int x : {-1, 1}) {
    for (int y : {-1, 1}) {
      for (int z : {-1, 1}) pts.push_back({x, y, z});
    }
  }
  return from_integers(pts, k);
}

SymPolytope octahedron(Kernel k) {
  return from_integers({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}, k);
}

SymPolytope cuboctahedron(Kernel k) {
  std::vector<std::array<int, 3>> pts;
  for (int s : {-1, 1}) {
    for (int t : {-1, 1}) {
      pts.push_back({s, t, 0});
      pts.push_back({s, 0, t});
      pts.push_back({0, s, t});
    }
  }
  return from_integers(pts, k);
}

}  // namespace shapes

}  // namespace mahler
