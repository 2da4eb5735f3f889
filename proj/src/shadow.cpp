#include "mahler/shadow.hpp"

#include "linalg.hpp"
#include "mahler/error.hpp"
#include "mahler/polarity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mahler {

// ------------------------------------------------------------------ Direction

Direction::Direction(const Point3& v) {
  const double len = norm(v);
  if (!std::isfinite(len) || len == 0.0) throw Error(ErrorCode::InvalidArgument, "direction must be non-zero");
  unit_ = v / len;
  exact_ = to_rational(v);
}

Direction::Direction(const QPoint3& v) : exact_(v) {
  const Point3 d = to_double(v);
  const double len = norm(d);
  if (sgn(v.x) == 0 && sgn(v.y) == 0 && sgn(v.z) == 0) {
    throw Error(ErrorCode::InvalidArgument, "direction must be non-zero");
  }
  unit_ = d / len;
}

QPoint3 Direction::exact_step() const {
  const double len = norm(to_double(exact_));
  return exact_ * to_rational(1.0 / len);
}

Direction Direction::operator-() const {
  Direction d = *this;
  d.unit_ = -unit_;
  d.exact_ = -exact_;
  return d;
}

// ---------------------------------------------------------------- SpeedVector

double SpeedVector::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

double SpeedVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

bool is_odd(const SymPolytope& p, const SpeedVector& alpha, double tol) {
  if (alpha.size() != p.size()) return false;
  if (alpha.has_exact() && tol == 0.0) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (alpha.exact[p.partner(i)] != -alpha.exact[i]) return false;
    }
    return true;
  }
  const double eps = tol * alpha.max_abs();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::fabs(alpha.values[p.partner(i)] + alpha.values[i]) > eps) return false;
  }
  return true;
}

namespace {

SpeedVector make_speed(std::vector<double> values) { return SpeedVector{std::move(values), {}}; }

SpeedVector make_speed(const std::vector<Rational>& exact) {
  SpeedVector s;
  s.exact = exact;
  for (const auto& q : exact) s.values.push_back(q.get_d());
  return s;
}

std::vector<Rational> exact_values(const SpeedVector& a) {
  if (a.has_exact()) return a.exact;
  std::vector<Rational> out;
  for (double v : a.values) out.push_back(to_rational(v));
  return out;
}

/// Reduced coordinates: one unknown per +/- pair, alpha_i = sign_i * beta_{slot_i}.
struct Reduction {
  std::vector<std::size_t> reps;
  std::vector<std::size_t> slot;
  std::vector<int> sign;
};

Reduction reduce(const SymPolytope& p) {
  Reduction r;
  r.reps = p.pair_representatives();
  r.slot.assign(p.size(), 0);
  r.sign.assign(p.size(), 1);
  for (std::size_t s = 0; s < r.reps.size(); ++s) {
    r.slot[r.reps[s]] = s;
    r.slot[p.partner(r.reps[s])] = s;
    r.sign[p.partner(r.reps[s])] = -1;
  }
  return r;
}

std::size_t projection_axis(const Plane& pl) {
  std::size_t axis = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (std::fabs(pl.normal[k]) > std::fabs(pl.normal[axis])) axis = k;
  }
  return axis;
}

/// Affine frame of a facet: an affinely independent triple and, for every
/// other vertex, its affine coordinates with respect to the triple.
template <class T>
struct FacetFrame {
  std::array<std::size_t, 3> triple{};
  std::vector<std::pair<std::size_t, std::array<T, 3>>> others;
};

template <class T>
FacetFrame<T> facet_frame(const std::vector<Vec3<T>>& v, const std::vector<std::size_t>& cyc, const Plane& pl) {
  const std::size_t axis = projection_axis(pl);
  const std::size_t iu = (axis + 1) % 3;
  const std::size_t iv = (axis + 2) % 3;
  auto cross2 = [&](const Vec3<T>& a, const Vec3<T>& b) { return T(a[iu] * b[iv] - a[iv] * b[iu]); };

  double diam2 = 0.0;
  if constexpr (!is_exact_v<T>) {
    for (std::size_t a = 0; a < cyc.size(); ++a) {
      for (std::size_t b = a + 1; b < cyc.size(); ++b) {
        const Point3 d = v[cyc[a]] - v[cyc[b]];
        diam2 = std::max(diam2, dot(d, d));
      }
    }
  }
  auto independent = [&](std::size_t a, std::size_t b, std::size_t c) {
    if constexpr (is_exact_v<T>) {
      return sgn(cross2(v[b] - v[a], v[c] - v[a])) != 0;
    } else {
      return norm(cross(v[b] - v[a], v[c] - v[a])) >= 1e-12 * diam2;
    }
  };

  FacetFrame<T> frame;
  bool found = false;
  for (std::size_t a = 0; a < cyc.size() && !found; ++a) {
    for (std::size_t b = a + 1; b < cyc.size() && !found; ++b) {
      for (std::size_t c = b + 1; c < cyc.size() && !found; ++c) {
        if (independent(cyc[a], cyc[b], cyc[c])) {
          frame.triple = {cyc[a], cyc[b], cyc[c]};
          found = true;
        }
      }
    }
  }
  if (!found) {
    throw Error(ErrorCode::NumericalDegeneracy, "facet has no affinely independent triple",
                nlohmann::json{{"facet", cyc}});
  }
  const Vec3<T>& a = v[frame.triple[0]];
  const Vec3<T> e1 = v[frame.triple[1]] - a;
  const Vec3<T> e2 = v[frame.triple[2]] - a;
  const T den = cross2(e1, e2);
  for (std::size_t j : cyc) {
    if (j == frame.triple[0] || j == frame.triple[1] || j == frame.triple[2]) continue;
    const Vec3<T> d = v[j] - a;
    const T lb = T(cross2(d, e2) / den);
    const T lc = T(cross2(e1, d) / den);
    frame.others.push_back({j, {T(T(1) - lb - lc), lb, lc}});
  }
  return frame;
}

template <class T>
const std::vector<Vec3<T>>& coords(const SymPolytope& p) {
  if constexpr (is_exact_v<T>) {
    return p.exact_vertices();
  } else {
    return p.vertices();
  }
}

template <class T>
SpeedSpace admissible_impl(const SymPolytope& p, const Direction& theta, std::vector<bool> parallel) {
  const FaceLattice& lat = p.lattice();
  const Reduction red = reduce(p);
  const std::size_t nvars = red.reps.size();
  const auto& v = coords<T>(p);

  detail::Matrix<T> rows;
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    if (p.opposite_facet(k) < k || parallel[k]) continue;
    const FacetFrame<T> frame = facet_frame(v, lat.facets()[k], lat.planes()[k]);
    for (const auto& [j, lambda] : frame.others) {
      std::vector<T> row(nvars, T(0));
      row[red.slot[j]] += T(red.sign[j]);
      for (std::size_t m = 0; m < 3; ++m) {
        const std::size_t a = frame.triple[m];
        row[red.slot[a]] -= T(lambda[m] * T(red.sign[a]));
      }
      rows.push_back(std::move(row));
    }
  }
  const std::size_t nrows = rows.size();
  const auto kernel = detail::nullspace<T>(std::move(rows), nvars);

  auto lift = [&](const std::vector<T>& beta) {
    std::vector<T> alpha(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) alpha[i] = T(T(red.sign[i]) * beta[red.slot[i]]);
    return make_speed(alpha);
  };

  std::array<SpeedVector, 3> trivial;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<T> alpha(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) alpha[i] = v[i][k];
    trivial[k] = make_speed(alpha);
  }
  std::vector<SpeedVector> basis;
  for (const auto& beta : kernel) basis.push_back(lift(beta));
  return SpeedSpace{p, theta, std::move(basis), std::move(trivial), std::move(parallel), nrows};
}

}  // namespace

std::vector<bool> parallel_facets(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts) {
  const FaceLattice& lat = p.lattice();
  std::vector<bool> out(lat.num_facets(), false);
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    const double d = std::fabs(dot(theta.unit(), lat.planes()[k].normal));
    if (p.kernel() == Kernel::Rational) {
      if (sgn(dot(theta.exact(), p.body().exact_planes()[k].normal)) == 0) {
        out[k] = true;
        continue;
      }
    } else if (d <= opts.parallel_band) {
      out[k] = true;
      continue;
    }
    if (d <= opts.ambiguity_band) {
      throw Error(ErrorCode::ParallelismAmbiguity, "direction is nearly parallel to a facet",
                  nlohmann::json{{"facet", k}, {"dot", d}, {"vertices", lat.facets()[k]}});
    }
  }
  return out;
}

SpeedSpace admissible_space(const SymPolytope& p, const Direction& theta, const ParallelismOptions& opts) {
  auto parallel = parallel_facets(p, theta, opts);
  if (p.kernel() == Kernel::Rational) return admissible_impl<Rational>(p, theta, std::move(parallel));
  return admissible_impl<double>(p, theta, std::move(parallel));
}

SpeedVector trivial_speed(const SymPolytope& p, const Point3& w) {
  if (p.kernel() == Kernel::Rational) return trivial_speed(p, to_rational(w));
  std::vector<double> a;
  for (const auto& x : p.vertices()) a.push_back(dot(w, x));
  return make_speed(std::move(a));
}

SpeedVector trivial_speed(const SymPolytope& p, const QPoint3& w) {
  if (p.kernel() == Kernel::Double) return trivial_speed(p, to_double(w));
  std::vector<Rational> a;
  for (const auto& x : p.exact_vertices()) a.push_back(dot(w, x));
  return make_speed(a);
}

bool is_admissible(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha, double tol,
                   const ParallelismOptions& opts) {
  if (!is_odd(p, alpha, tol)) return false;
  const auto parallel = parallel_facets(p, theta, opts);
  const FaceLattice& lat = p.lattice();
  if (p.kernel() == Kernel::Rational && alpha.has_exact()) {
    for (std::size_t k = 0; k < lat.num_facets(); ++k) {
      if (parallel[k]) continue;
      const auto frame = facet_frame(p.exact_vertices(), lat.facets()[k], lat.planes()[k]);
      for (const auto& [j, l] : frame.others) {
        Rational predicted = 0;
        for (std::size_t m = 0; m < 3; ++m) predicted += l[m] * alpha.exact[frame.triple[m]];
        if (tol == 0.0 ? predicted != alpha.exact[j]
                       : std::fabs(Rational(predicted - alpha.exact[j]).get_d()) > tol * alpha.max_abs()) {
          return false;
        }
      }
    }
    return true;
  }
  const double eps = tol * std::max(alpha.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    if (parallel[k]) continue;
    const auto frame = facet_frame(p.vertices(), lat.facets()[k], lat.planes()[k]);
    for (const auto& [j, l] : frame.others) {
      double predicted = 0.0;
      for (std::size_t m = 0; m < 3; ++m) predicted += l[m] * alpha.values[frame.triple[m]];
      if (std::fabs(predicted - alpha.values[j]) > eps) return false;
    }
  }
  return true;
}

bool is_trivial(const SpeedSpace& s, const SpeedVector& alpha, double tol) {
  const std::size_t n = alpha.size();
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 3; ++k) x(i, k) = s.trivial_basis[k].values[i];
    a(i) = alpha.values[i];
  }
  const double len = a.norm();
  if (len == 0.0) return true;
  const Eigen::Vector3d w = x.colPivHouseholderQr().solve(a);
  return (a - x * w).norm() <= tol * len;
}

namespace {

template <class T>
std::optional<std::vector<T>> largest_projection(const std::vector<std::vector<T>>& basis,
                                                 const std::vector<std::vector<T>>& trivial) {
  auto inner = [](const std::vector<T>& a, const std::vector<T>& b) {
    T s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  std::vector<std::vector<T>> ortho;
  for (auto t : trivial) {
    for (const auto& q : ortho) {
      const T c = T(inner(t, q) / inner(q, q));
      for (std::size_t i = 0; i < t.size(); ++i) t[i] -= c * q[i];
    }
    ortho.push_back(std::move(t));
  }
  std::optional<std::vector<T>> best;
  T best_norm(0);
  for (auto b : basis) {
    const T original = inner(b, b);
    for (const auto& q : ortho) {
      const T c = T(inner(b, q) / inner(q, q));
      for (std::size_t i = 0; i < b.size(); ++i) b[i] -= c * q[i];
    }
    const T len = inner(b, b);
    if constexpr (is_exact_v<T>) {
      if (sgn(len) == 0) continue;
    } else {
      if (!(len > 1e-18 * original)) continue;
    }
    if (!best || len > best_norm) {
      best = std::move(b);
      best_norm = len;
    }
  }
  return best;
}

template <class T>
std::optional<SpeedVector> nontrivial_impl(const SpeedSpace& s) {
  const SymPolytope& p = s.base;
  const Reduction red = reduce(p);
  auto reduced = [&](const SpeedVector& a) {
    std::vector<T> out;
    for (std::size_t r : red.reps) {
      if constexpr (is_exact_v<T>) {
        out.push_back(a.has_exact() ? a.exact[r] : to_rational(a.values[r]));
      } else {
        out.push_back(a.values[r]);
      }
    }
    return out;
  };
  std::vector<std::vector<T>> basis;
  std::vector<std::vector<T>> trivial;
  for (const auto& b : s.basis) basis.push_back(reduced(b));
  for (const auto& t : s.trivial_basis) trivial.push_back(reduced(t));
  auto best = largest_projection(basis, trivial);
  if (!best) return std::nullopt;
  T scale(0);
  for (const auto& v : *best) {
    if (abs(v) > scale) scale = abs(v);
  }
  std::vector<T> alpha(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) alpha[i] = T(T(red.sign[i]) * (*best)[red.slot[i]] / scale);
  return make_speed(alpha);
}

}  // namespace

std::optional<SpeedVector> nontrivial_component(const SpeedSpace& s) {
  if (s.base.kernel() == Kernel::Rational) return nontrivial_impl<Rational>(s);
  return nontrivial_impl<double>(s);
}

// -------------------------------------------------------------------- deform

SymPolytope deform(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha, double t) {
  if (alpha.size() != p.size()) throw Error(ErrorCode::InvalidArgument, "speed vector length mismatch");
  if (!is_odd(p, alpha, 1e-12)) throw Error(ErrorCode::InvalidArgument, "speed vector is not odd");
  try {
    if (p.kernel() == Kernel::Rational) {
      const QPoint3 step = theta.exact_step();
      const Rational tq = to_rational(t);
      const auto a = exact_values(alpha);
      std::vector<QPoint3> moved(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.partner(i) < i) continue;
        moved[i] = p.exact_vertices()[i] + Rational(tq * a[i]) * step;
        moved[p.partner(i)] = -moved[i];
      }
      return build_sym_polytope(moved, 0.0);
    }
    std::vector<Point3> moved(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p.partner(i) < i) continue;
      moved[i] = p.vertices()[i] + (t * alpha.values[i]) * theta.unit();
      moved[p.partner(i)] = -moved[i];
    }
    return build_sym_polytope(moved, p.tolerance());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateInput || e.code() == ErrorCode::NumericalDegeneracy) {
      throw Error(ErrorCode::DegenerateDeformation, std::string("deformed hull degenerates: ") + e.what(),
                  nlohmann::json{{"t", t}, {"cause", e.to_json()}});
    }
    throw;
  }
}

// -------------------------------------------------------------- persistence

namespace {

bool same_lattice_at(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha, double t) {
  try {
    const SymPolytope q = deform(p, theta, alpha, t);
    return q.size() == p.size() && q.lattice().same_labeled(p.lattice());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateDeformation || e.code() == ErrorCode::ToleranceConflict) return false;
    throw;
  }
}

}  // namespace

std::vector<double> persistence_schedule(double c, const PersistenceOptions& opts) {
  std::vector<double> ts{0.0};
  double h = c;
  for (std::size_t k = 0; k <= opts.halving_levels; ++k, h *= 0.5) {
    ts.push_back(h);
    ts.push_back(-h);
  }
  const double k = static_cast<double>(opts.interior_samples);
  for (std::size_t j = 0; j < opts.interior_samples; ++j) ts.push_back(-c + 2.0 * c * (double(j) + 1.0) / (k + 1.0));
  return ts;
}

bool lattice_persists(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha, double c,
                      const PersistenceOptions& opts) {
  for (double t : persistence_schedule(c, opts)) {
    if (t != 0.0 && !same_lattice_at(p, theta, alpha, t)) return false;
  }
  return true;
}

double persistence_interval(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha,
                            const PersistenceOptions& opts) {
  const double amax = alpha.max_abs();
  if (amax == 0.0) return opts.c_max;
  auto both = [&](double c) { return same_lattice_at(p, theta, alpha, c) && same_lattice_at(p, theta, alpha, -c); };

  double good = 0.0;
  double bad = 0.0;
  double c = std::min(opts.c_max, 0.1 * p.inradius() / amax);
  if (both(c)) {
    good = c;
    while (good < opts.c_max) {
      c = std::min(2.0 * good, opts.c_max);
      if (!both(c)) {
        bad = c;
        break;
      }
      good = c;
    }
  } else {
    bad = c;
    for (c *= 0.5; c >= opts.min_c; c *= 0.5) {
      if (both(c)) {
        good = c;
        break;
      }
      bad = c;
    }
    if (good == 0.0) {
      throw Error(ErrorCode::NoPersistence, "face lattice changes at every tested half-width",
                  nlohmann::json{{"smallest", bad}});
    }
  }
  if (bad > 0.0) {
    for (std::size_t it = 0; it < opts.bisection_steps && bad - good > 1e-3 * good; ++it) {
      const double mid = 0.5 * (good + bad);
      (both(mid) ? good : bad) = mid;
    }
    good *= opts.safety;
  }
  for (c = good; c >= opts.min_c; c *= 0.5) {
    if (lattice_persists(p, theta, alpha, c, opts)) return c;
  }
  throw Error(ErrorCode::NoPersistence, "no half-width passed the sample schedule",
              nlohmann::json{{"initial", good}});
}

std::optional<double> lattice_event(const SymPolytope& p, const Direction& theta, const SpeedVector& alpha,
                                    double from, const PersistenceOptions& opts) {
  if (from == 0.0) throw Error(ErrorCode::InvalidArgument, "event search needs a signed start");
  const double dir = from > 0.0 ? 1.0 : -1.0;
  double good = std::fabs(from);
  double bad = 0.0;
  for (double c = 2.0 * good;; c *= 2.0) {
    c = std::min(c, opts.c_max);
    if (!same_lattice_at(p, theta, alpha, dir * c)) {
      bad = c;
      break;
    }
    good = c;
    if (c >= opts.c_max) return std::nullopt;
  }
  while (bad - good > 1e-13 * bad) {
    const double mid = 0.5 * (good + bad);
    if (mid <= good || mid >= bad) break;
    (same_lattice_at(p, theta, alpha, dir * mid) ? good : bad) = mid;
  }
  // `bad` is where the new lattice first appears, typically right at the
  // merge tolerance. Land in the middle of the range where it is stable so
  // that the next deformation does not immediately undo the merge.
  std::optional<SymPolytope> merged;
  try {
    merged = deform(p, theta, alpha, dir * bad);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateDeformation && e.code() != ErrorCode::ToleranceConflict) throw;
    return dir * bad;
  }
  auto keeps = [&](double t) {
    try {
      const SymPolytope q = deform(p, theta, alpha, dir * t);
      return q.size() == merged->size() && q.lattice().same_labeled(merged->lattice());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateDeformation || e.code() == ErrorCode::ToleranceConflict) return false;
      throw;
    }
  };
  const double reach = 1e-6 * bad;
  double lo = 0.0;
  double hi = 0.0;
  for (double d = 1e-12 * bad; d <= reach; d *= 2.0) {
    if (!keeps(bad + d)) {
      hi = d;
      break;
    }
    lo = d;
  }
  if (hi == 0.0) return dir * (bad + lo);
  for (int it = 0; it < 30 && hi - lo > 1e-3 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (keeps(bad + mid) ? lo : hi) = mid;
  }
  return dir * (bad + 0.5 * lo);
}

// ----------------------------------------------------------------- checkers

namespace {

std::vector<double> uniform_samples(double c, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = -c + 2.0 * c * double(k) / double(n - 1);
  return t;
}

}  // namespace

AffinenessReport check_volume_affine(const ShadowSystem& s, std::size_t samples, double rel_tol) {
  if (samples < 3) throw Error(ErrorCode::InvalidArgument, "need at least three samples");
  if (!(s.half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "half-width must be positive");
  AffinenessReport r;
  r.t = uniform_samples(s.half_width, samples);
  Eigen::MatrixXd design(samples, 3);
  Eigen::VectorXd vol(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    r.volume.push_back(volume(deform(s.base, s.theta, s.alpha, r.t[k])).value());
    const double u = r.t[k] / s.half_width;
    design(k, 0) = 1.0;
    design(k, 1) = u;
    design(k, 2) = u * u;
    vol(k) = r.volume.back();
  }
  const Eigen::Vector3d quad = design.colPivHouseholderQr().solve(vol);
  const Eigen::Vector2d lin = design.leftCols(2).colPivHouseholderQr().solve(vol);
  r.intercept = lin(0);
  r.slope = lin(1) / s.half_width;
  r.quadratic = quad(2) / (s.half_width * s.half_width);
  const double scale = std::fabs(quad(0)) + std::fabs(quad(1));
  r.relative_curvature = scale > 0.0 ? std::fabs(quad(2)) / scale : std::fabs(quad(2));
  r.max_residual = (vol - design.leftCols(2) * lin).cwiseAbs().maxCoeff();
  if (r.relative_curvature > rel_tol) {
    throw Error(ErrorCode::AffinenessViolation, "volume is not affine along the shadow system",
                nlohmann::json{{"relative_curvature", r.relative_curvature}, {"max_residual", r.max_residual},
                               {"half_width", s.half_width}});
  }
  return r;
}

ConvexityReport check_inverse_polar_convexity(const ShadowSystem& s, std::size_t samples, double rel_tol) {
  if (samples < 5) throw Error(ErrorCode::InvalidArgument, "need at least five samples");
  if (!(s.half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "half-width must be positive");
  ConvexityReport r;
  r.t = uniform_samples(s.half_width, samples);
  for (double t : r.t) {
    const double f = 1.0 / volume(polar(deform(s.base, s.theta, s.alpha, t))).value();
    r.inverse_polar_volume.push_back(f);
    r.max_abs = std::max(r.max_abs, std::fabs(f));
  }
  r.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < samples; ++k) {
    const auto& f = r.inverse_polar_volume;
    r.min_second_difference = std::min(r.min_second_difference, f[k - 1] - 2.0 * f[k] + f[k + 1]);
  }
  if (r.min_second_difference < -rel_tol * r.max_abs) {
    throw Error(ErrorCode::ConvexityViolation, "1/|P_t^o| is not convex along the shadow system",
                nlohmann::json{{"min_second_difference", r.min_second_difference}, {"max_abs", r.max_abs}});
  }
  return r;
}

}  // namespace mahler
