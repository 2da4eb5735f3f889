// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "mahler/combinatorics.hpp"
#include "mahler/error.hpp"
#include "mahler/optimizer.hpp"
#include "mahler/polarity.hpp"

#include "../oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace mahler;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kBound = 32.0 / 3.0;
constexpr std::size_t kCorpusSize = 50;
constexpr std::uint64_t kCorpusSeed = 2024;
constexpr std::size_t kDescentTraces = 25;
/// Fraction of descent traces ending within 0.15 * 32/3 of the bound,
/// recorded on the first run of this seeded suite and pinned.
constexpr double kPinnedDescentFraction = 1.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const Error& e) {
    o = {false, "unexpected " + e.to_json().dump()};
  } catch (const std::exception& e) {
    o = {false, std::string("unexpected exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream timing;
  timing << secs << " s";
  if (limit_s > 0.0 && secs >= limit_s) {
    o.pass = false;
    timing << " exceeds " << limit_s << " s";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d %-18s %s  %s [%s]\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
              timing.str().c_str());
  std::fflush(stdout);
}

std::vector<SymPolytope> make_corpus() {
  std::vector<SymPolytope> out;
  std::mt19937_64 rng(kCorpusSeed);
  for (std::size_t i = 0; i < kCorpusSize; ++i) out.push_back(random_symmetric_polytope(3 + i % 6, rng()));
  return out;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)); }

Direction gaussian_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    const Point3 v{g(rng), g(rng), g(rng)};
    if (norm(v) > 1e-3) return Direction(v);
  }
}

Outcome endpoint_values() {
  Outcome o;
  std::ostringstream d;
  for (const auto& [name, body] : {std::pair{"cube", shapes::cube()}, std::pair{"octahedron", shapes::octahedron()}}) {
    const VolumeProductReport r = volume_product(body);
    const bool exact = r.product.is_exact() && r.product.rational() == mahler_bound();
    const double dbl = volume_product(to_double_kernel(body)).product.value();
    const bool close = rel(dbl, kBound) <= 1e-12;
    o.pass = o.pass && exact && close;
    d << name << " rational=" << r.product.str() << " double_rel_err=" << rel(dbl, kBound) << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome duality(const std::vector<SymPolytope>& corpus) {
  double worst_vertex = 0.0, worst_product = 0.0;
  std::size_t count_mismatch = 0;
  for (const auto& p : corpus) {
    const SymPolytope q = polar(p);
    const SymPolytope pp = polar(q);
    if (q.size() != p.lattice().num_facets() || q.lattice().num_facets() != p.size()) ++count_mismatch;
    if (pp.size() != p.size()) {
      ++count_mismatch;
      continue;
    }
    for (std::size_t i = 0; i < p.size(); ++i) worst_vertex = std::max(worst_vertex, norm(pp.vertices()[i] - p.vertices()[i]));
    worst_product = std::max(worst_product, rel(volume_product(p).product.value(), volume_product(q).product.value()));
    if (!verify_incidence_duality(p).incidence_transposed) ++count_mismatch;
  }
  std::ostringstream d;
  d << corpus.size() << " bodies, bipolar max vertex error " << worst_vertex << ", product rel error " << worst_product
    << ", count mismatches " << count_mismatch;
  return {worst_vertex <= 1e-9 && worst_product <= 1e-9 && count_mismatch == 0, d.str()};
}

Outcome affine_invariance(const std::vector<SymPolytope>& corpus) {
  std::mt19937_64 rng(kCorpusSeed + 3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  std::size_t maps = 0;
  for (const auto& p : corpus) {
    const double base = volume_product(p).product.value();
    for (int k = 0; k < 20;) {
      Matrix3 a;
      for (auto& row : a) {
        for (auto& x : row) x = u(rng);
      }
      // Well-conditioned enough to stay clear of the hull tolerance.
      if (std::fabs(determinant(a)) < 0.05) continue;
      worst = std::max(worst, rel(volume_product(linear_image(p, a)).product.value(), base));
      ++maps;
      ++k;
    }
  }
  std::ostringstream d;
  d << maps << " maps, max rel deviation " << worst;
  return {worst <= 1e-6, d.str()};
}

/// Edge directions of the body first (they exercise the parallel bonus),
/// then Gaussian directions.
std::vector<Direction> sweep(const SymPolytope& p, std::mt19937_64& rng, std::size_t count) {
  std::vector<Direction> out;
  for (const auto& e : p.lattice().edges()) {
    if (out.size() >= count / 2) break;
    out.emplace_back(p.vertices()[e[1]] - p.vertices()[e[0]]);
  }
  while (out.size() < count) out.push_back(gaussian_direction(rng));
  return out;
}

Outcome dimension_sweep(const std::vector<SymPolytope>& corpus) {
  std::mt19937_64 rng(kCorpusSeed + 4);
  std::size_t checks = 0, violations = 0, ambiguous = 0, oracle_mismatch = 0, min_dirs = SIZE_MAX;
  for (const auto& p : corpus) {
    std::size_t done = 0;
    auto dirs = sweep(p, rng, 64);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      try {
        const DimensionReport r = dimension_bound(p, dirs[k]);
        ++checks;
        ++done;
        if (k % 8 == 0 && r.dim_actual != oracle::admissible_dimension(p.vertices(), dirs[k].unit())) ++oracle_mismatch;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::BoundViolation) {
          ++violations;
          ++done;
        } else if (e.code() == ErrorCode::ParallelismAmbiguity) {
          ++ambiguous;
          dirs.push_back(gaussian_direction(rng));  // keep 64 decided directions
        } else {
          throw;
        }
      }
    }
    min_dirs = std::min(min_dirs, done);
  }

  // Reference values, cross-checked against the SVD nullspace oracle.
  bool refs = true;
  const SymPolytope cube = shapes::cube();
  const DimensionReport rc = dimension_bound(cube, Direction(QPoint3{0, 0, 1}));
  refs = refs && rc.bound == 3 && rc.dim_actual == oracle::admissible_dimension(cube.vertices(), Point3{0, 0, 1});
  const SymPolytope octa = shapes::octahedron();
  const Direction generic(QPoint3{3, 5, 7});
  const DimensionReport ro = dimension_bound(octa, generic);
  refs = refs && ro.bound == 3 && ro.dim_actual == 3 && oracle::admissible_dimension(octa.vertices(), generic.unit()) == 3;
  const SymPolytope co = shapes::cuboctahedron();
  const Direction square(QPoint3{1, 1, 0});
  const DimensionReport rq = dimension_bound(co, square);
  refs = refs && rq.bound == 4 && rq.nontrivial_certified && rq.witness_speed &&
         is_admissible(co, square, *rq.witness_speed) &&
         !is_trivial(admissible_space(co, square), *rq.witness_speed) &&
         rq.dim_actual == oracle::admissible_dimension(co.vertices(), square.unit());

  std::ostringstream d;
  d << checks << " checks (>= " << min_dirs << " directions per body), violations " << violations << ", ambiguous "
    << ambiguous << " (replaced), oracle mismatches " << oracle_mismatch << "; cube/e3 bound " << format_rational(rc.bound)
    << " dim " << rc.dim_actual << ", octa generic bound " << format_rational(ro.bound) << " dim " << ro.dim_actual
    << ", cubocta square bound " << format_rational(rq.bound) << " dim " << rq.dim_actual
    << (rq.nontrivial_certified ? " non-trivial" : " trivial");
  return {violations == 0 && oracle_mismatch == 0 && min_dirs >= 64 && refs, d.str()};
}

Outcome shadow_mechanics(const std::vector<SymPolytope>& corpus) {
  std::mt19937_64 rng(kCorpusSeed + 5);
  std::size_t systems = 0, lattice_breaks = 0, no_persistence = 0;
  double worst_curv = 0.0, worst_second = std::numeric_limits<double>::infinity();
  for (const auto& p : corpus) {
    for (int k = 0; k < 4; ++k) {
      const Direction theta = gaussian_direction(rng);
      const auto alpha = nontrivial_component(admissible_space(p, theta));
      if (!alpha) continue;
      double c = 0.0;
      try {
        c = persistence_interval(p, theta, *alpha);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoPersistence) throw;
        ++no_persistence;
        continue;
      }
      ++systems;
      const ShadowSystem s{p, theta, *alpha, c};
      const AffinenessReport a = check_volume_affine(s, 21, 1.0);
      worst_curv = std::max(worst_curv, a.relative_curvature);
      const ConvexityReport cv = check_inverse_polar_convexity(s, 21, 1.0);
      worst_second = std::min(worst_second, cv.min_second_difference);
      for (double t : a.t) {
        if (!deform(p, theta, *alpha, t).lattice().same_labeled(p.lattice())) ++lattice_breaks;
      }
      for (double t : persistence_schedule(c)) {
        if (!deform(p, theta, *alpha, t).lattice().same_labeled(p.lattice())) ++lattice_breaks;
      }
    }
  }
  std::ostringstream d;
  d << systems << " certified systems (" << no_persistence << " without persistence), max relative quadratic "
    << worst_curv << ", lattice changes " << lattice_breaks << ", min second difference of 1/|P_t polar| "
    << worst_second;
  return {systems > 0 && worst_curv <= 1e-8 && lattice_breaks == 0 && worst_second >= -1e-8, d.str()};
}

bool witness_checks_out(const SymPolytope& p, const Witness& w) {
  const SymPolytope body = w.side == Side::Primal ? p : polar(p);
  return w.bound > 3 && is_admissible(body, w.theta, w.speed) && !is_trivial(admissible_space(body, w.theta), w.speed) &&
         oracle::admissible_dimension(body.vertices(), w.theta.unit()) >= 4;
}

Outcome classification() {
  const auto c = classify_minimizer_candidate(shapes::cube());
  const auto o = classify_minimizer_candidate(shapes::octahedron());
  const auto q = classify_minimizer_candidate(shapes::cuboctahedron());
  const bool witness = q.evidence.witness && witness_checks_out(shapes::cuboctahedron(), *q.evidence.witness);
  std::ostringstream d;
  d << "cube " << to_string(c.verdict) << ", octahedron " << to_string(o.verdict) << ", cuboctahedron "
    << to_string(q.verdict) << " (rule " << q.evidence.rule << ", witness " << (witness ? "verified" : "missing/invalid")
    << ")";
  return {c.verdict == Verdict::Parallelepiped && o.verdict == Verdict::AffineOctahedron &&
              q.verdict == Verdict::Excluded && witness,
          d.str()};
}

Outcome descent() {
  std::size_t non_monotone = 0, below = 0, close = 0, terminal = 0, oversize = 0;
  double worst_gap = 0.0;
  for (std::size_t s = 0; s < kDescentTraces; ++s) {
    const SymPolytope start = random_symmetric_polytope(3 + s % 4, 1000 + s);
    DescentConfig cfg;
    cfg.seed = s;
    cfg.max_vertices = 12;
    const DescentTrace t = descend(start, cfg);
    double prev = t.initial_product;
    for (const auto& st : t.steps) {
      if (st.product_after > st.product_before || st.product_before != prev) ++non_monotone;
      prev = st.product_after;
    }
    if (t.final_product < kBound - 1e-6) ++below;
    if (t.final_gap <= 0.15 * kBound) ++close;
    if (t.stop_reason == "terminal-lattice") ++terminal;
    if (t.final.size() > 12) ++oversize;
    worst_gap = std::max(worst_gap, t.final_gap);
  }
  const double fraction = static_cast<double>(close) / kDescentTraces;
  std::ostringstream d;
  d << kDescentTraces << " traces, non-monotone steps " << non_monotone << ", below bound " << below
    << ", within 0.15*32/3: " << close << " (" << 100.0 * fraction << "%, pinned " << 100.0 * kPinnedDescentFraction
    << "%), terminal lattices " << terminal << ", worst gap " << worst_gap;
  return {non_monotone == 0 && below == 0 && oversize == 0 && fraction >= 0.6 && fraction >= kPinnedDescentFraction,
          d.str()};
}

Outcome property_alarm() {
  const CorpusSummary s = corpus_verify(200, 8, kCorpusSeed + 8);
  std::ostringstream d;
  d << s.count << " bodies, min product " << s.min_product << " (bound " << kBound << "), bound checks "
    << s.bound_checks << ", no alarm";
  return {s.count == 200 && s.min_product >= kBound - 1e-9, d.str()};
}

}  // namespace

int main() {
  const std::vector<SymPolytope> corpus = make_corpus();
  report(1, "endpoint-values", 1.0, endpoint_values);
  report(2, "duality", 30.0, [&] { return duality(corpus); });
  report(3, "affine-invariance", 0.0, [&] { return affine_invariance(corpus); });
  report(4, "dimension-bound", 120.0, [&] { return dimension_sweep(corpus); });
  report(5, "shadow-systems", 0.0, [&] { return shadow_mechanics(corpus); });
  report(6, "classification", 0.0, classification);
  report(7, "descent", 600.0, descent);
  report(8, "property-alarm", 0.0, property_alarm);
  std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
