#include "mahler/optimizer.hpp"

#include "mahler/error.hpp"
#include "mahler/polarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace mahler {

namespace {

Point3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Point3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double len = norm(v);
    if (len > 1e-6) return v / len;
  }
}

nlohmann::json dump_vertices(const SymPolytope& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : p.vertices()) out.push_back({format_double(v.x), format_double(v.y), format_double(v.z)});
  return out;
}

}  // namespace

SymPolytope random_symmetric_polytope(std::size_t n_pairs, std::uint64_t seed, Kernel kernel) {
  if (n_pairs < 3) throw Error(ErrorCode::InvalidArgument, "need at least three vertex pairs");
  std::mt19937_64 rng(seed);
  constexpr int kRetries = 64;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    std::vector<Point3> pts;
    for (std::size_t i = 0; i < n_pairs; ++i) pts.push_back(random_unit(rng));
    try {
      if (kernel == Kernel::Rational) {
        std::vector<QPoint3> q;
        for (const auto& v : pts) q.push_back(to_rational(v));
        SymPolytope p = build_sym_polytope(q, 0.0);
        if (p.size() == 2 * n_pairs) return p;
      } else {
        SymPolytope p = build_sym_polytope(pts, 1e-9);
        if (p.size() == 2 * n_pairs) return p;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput && e.code() != ErrorCode::NumericalDegeneracy &&
          e.code() != ErrorCode::ToleranceConflict) {
        throw;
      }
    }
  }
  throw Error(ErrorCode::GenerationFailure, "random polytope generation kept degenerating",
              nlohmann::json{{"n_pairs", n_pairs}, {"seed", seed}});
}

double product_value(const SymPolytope& p) { return volume(p).value() * volume(polar(p)).value(); }

namespace {

/// Deformed bodies that cannot be evaluated are treated as infinitely bad.
bool unusable(const Error& e) {
  return e.code() == ErrorCode::DegenerateDeformation || e.code() == ErrorCode::NumericalDegeneracy ||
         e.code() == ErrorCode::ToleranceConflict;
}

constexpr std::size_t kEventCandidates = 3;

struct Candidate {
  Side side;
  Direction theta;
  SpeedVector alpha;
  double half_width = 0.0;
  double t = 0.0;
  double value = std::numeric_limits<double>::infinity();
  double spread = 0.0;
  bool event = false;
};

struct LineResult {
  double t = 0.0;
  double value = 0.0;
  double spread = 0.0;
};

/// Grid over [-c, c] (endpoints included), then golden-section refinement in
/// the cell pair around the best grid point. Ties go to the smaller |t|.
template <class F>
LineResult line_search(F&& f, double c, double f0, std::size_t samples) {
  const std::size_t n = std::max<std::size_t>(samples, 3) | 1;  // odd, so t = 0 is on the grid
  std::vector<double> ts(n), vs(n);
  LineResult best{0.0, f0, 0.0};
  double lo = f0, hi = f0;
  for (std::size_t j = 0; j < n; ++j) {
    ts[j] = -c + 2.0 * c * double(j) / double(n - 1);
    vs[j] = j == n / 2 ? f0 : f(ts[j]);
    if (std::isfinite(vs[j])) {
      lo = std::min(lo, vs[j]);
      hi = std::max(hi, vs[j]);
    }
  }
  std::size_t jb = n / 2;
  for (std::size_t j = 0; j < n; ++j) {
    const double tie = 1e-15 * std::fabs(vs[jb]);
    if (vs[j] < vs[jb] - tie || (std::fabs(vs[j] - vs[jb]) <= tie && std::fabs(ts[j]) < std::fabs(ts[jb]))) jb = j;
  }
  best = {ts[jb], vs[jb], hi - lo};
  double a = ts[jb > 0 ? jb - 1 : 0];
  double b = ts[jb + 1 < n ? jb + 1 : n - 1];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 40 && b - a > 1e-12 * c; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  const double tg = f1 <= f2 ? x1 : x2;
  const double vg = std::min(f1, f2);
  if (vg < best.value - 1e-15 * std::fabs(best.value)) {
    best.t = tg;
    best.value = vg;
  }
  return best;
}

std::vector<Direction> candidate_directions(const SymPolytope& l, const DescentConfig& cfg, std::mt19937_64& rng) {
  std::vector<Direction> dirs;
  const FaceLattice& lat = l.lattice();
  const auto& v = l.vertices();
  if (cfg.facet_directions) {
    for (std::size_t k = 0; k < lat.num_facets(); ++k) {
      if (lat.facet_size(k) <= 3 || l.opposite_facet(k) < k) continue;
      const auto& cyc = lat.facets()[k];
      const Point3 e1 = v[cyc[1]] - v[cyc[0]];
      const Point3 e2 = v[cyc[2]] - v[cyc[1]];
      const Point3 d = e1 / norm(e1) + 0.6180339887498949 * e2 / norm(e2);
      const Point3& n = lat.planes()[k].normal;
      dirs.emplace_back(d - dot(d, n) * n);
    }
    for (std::size_t e = 0; e < lat.num_edges(); ++e) {
      const auto [f, g] = lat.edge_facets()[e];
      if (lat.facet_size(f) != 4 || lat.facet_size(g) != 4) continue;
      const auto [a, b] = lat.edges()[e];
      if (l.partner(a) < a) continue;  // the opposite edge gives the same direction
      (void)b;
      dirs.emplace_back(cross(lat.planes()[f].normal, lat.planes()[g].normal));
    }
  }
  for (std::size_t k = 0; k < cfg.direction_budget; ++k) dirs.emplace_back(random_unit(rng));
  return dirs;
}

}  // namespace

DescentTrace descend(const SymPolytope& p0, const DescentConfig& cfg) {
  if (cfg.max_vertices < 6 || cfg.max_vertices % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "max_vertices must be even and at least 6");
  }
  if (p0.size() > cfg.max_vertices) {
    throw Error(ErrorCode::InvalidArgument, "initial body has too many vertices",
                nlohmann::json{{"vertices", p0.size()}, {"max_vertices", cfg.max_vertices}});
  }
  SymPolytope p = p0.kernel() == Kernel::Double ? p0 : to_double_kernel(p0);
  DescentTrace trace{p, p, {}, {}, 0.0, 0.0, 0.0, 0, false, false, ""};
  std::mt19937_64 rng(cfg.seed);
  double current = product_value(p);
  trace.initial_product = current;

  for (std::size_t iter = 0;; ++iter) {
    if (terminal_lattice(p)) {
      trace.stop_reason = "terminal-lattice";
      break;
    }
    if (iter >= cfg.max_iterations) {
      trace.budget_exhausted = true;
      trace.stop_reason = "iteration-budget";
      break;
    }
    std::vector<Candidate> all;
    bool varied = false;
    bool speed_found = false;
    const std::array<SymPolytope, 2> sides{p, polar(p)};
    for (Side side : {Side::Primal, Side::Polar}) {
      const SymPolytope& l = sides[side == Side::Primal ? 0 : 1];
      for (const Direction& theta : candidate_directions(l, cfg, rng)) {
        std::optional<SpeedVector> alpha;
        try {
          alpha = nontrivial_component(admissible_space(l, theta));
        } catch (const Error& e) {
          if (e.code() == ErrorCode::ParallelismAmbiguity) continue;
          throw;
        }
        if (!alpha) continue;
        speed_found = true;
        ++trace.candidates_evaluated;
        double c = 0.0;
        try {
          c = persistence_interval(l, theta, *alpha, cfg.persistence);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::NoPersistence) continue;
          throw;
        }
        auto f = [&](double t) {
          try {
            return product_value(deform(l, theta, *alpha, t));
          } catch (const Error& e) {
            if (unusable(e)) return std::numeric_limits<double>::infinity();
            throw;
          }
        };
        const LineResult r = line_search(f, c, current, cfg.line_search_samples);
        if (r.spread > 10.0 * cfg.termination_tol) varied = true;
        all.push_back(Candidate{side, theta, *alpha, c, r.t, r.value, r.spread});
      }
    }
    std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });

    std::optional<Candidate> best;
    if (!all.empty() && current - all.front().value > cfg.termination_tol) best = all.front();
    // The product is quasi-concave along a shadow system, so good steps sit
    // at an end of the certified interval; the lattice event just beyond it
    // is the limit of those steps. It is taken when it improves, or when it
    // simplifies the lattice at no cost, which also ends the slow approach
    // to an event through ever shorter certified intervals.
    for (std::size_t k = 0; k < std::min<std::size_t>(all.size(), kEventCandidates); ++k) {
      const Candidate& cand = all[k];
      const SymPolytope& l = sides[cand.side == Side::Primal ? 0 : 1];
      // A flat system (best value at t = 0) may still end in a simplifying event.
      std::vector<double> ends;
      if (std::fabs(cand.t) >= 0.999 * cand.half_width) ends.push_back(cand.t);
      else if (cand.spread <= 10.0 * cfg.termination_tol) ends = {cand.half_width, -cand.half_width};
      for (double from : ends) {
        const auto te = lattice_event(l, cand.theta, cand.alpha, from, cfg.persistence);
        if (!te) continue;
        try {
          const SymPolytope q = deform(l, cand.theta, cand.alpha, *te);
          const bool shrinks = q.size() <= l.size() && q.lattice().num_facets() <= l.lattice().num_facets() &&
                               q.size() + q.lattice().num_facets() < l.size() + l.lattice().num_facets();
          if (!shrinks) continue;
          const double v = product_value(q);
          if (v <= current && (!best || v < best->value)) {
            best = cand;
            best->t = *te;
            best->value = v;
            best->event = true;
          }
        } catch (const Error& e) {
          if (!unusable(e)) throw;
        }
      }
    }
    if (!best) {
      trace.stall_with_nontrivial_speed = varied;
      trace.stop_reason = !speed_found ? "no-nontrivial-speed" : all.empty() ? "no-persistence" : "no-improving-move";
      break;
    }
    const SymPolytope l = best->side == Side::Primal ? p : polar(p);
    const SymPolytope moved = deform(l, best->theta, best->alpha, best->t);
    SymPolytope next = best->side == Side::Primal ? moved : polar(moved);
    if (next.size() > cfg.max_vertices) {
      throw Error(ErrorCode::InternalInconsistency, "descent step left the admissible vertex class",
                  nlohmann::json{{"vertices", next.size()}, {"side", to_string(best->side)}});
    }
    const double after = product_value(next);
    trace.steps.push_back(
        DescentStep{iter, p, best->side, best->theta, best->alpha, best->half_width, best->t, current, after, best->event});
    p = std::move(next);
    current = after;
  }
  trace.final = p;
  trace.final_product = current;
  trace.final_gap = current - mahler_bound().get_d();
  trace.final_classification = classify_minimizer_candidate(p);
  return trace;
}

CorpusSummary corpus_verify(std::span<const SymPolytope> bodies, std::uint64_t seed, std::size_t directions) {
  if (bodies.empty()) throw Error(ErrorCode::InvalidArgument, "corpus is empty");
  CorpusSummary s;
  s.count = bodies.size();
  s.seed = seed;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const Rational bound = mahler_bound();
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const SymPolytope& p = bodies[i];
    const VolumeProductReport r = volume_product(p);
    const bool below = r.product.is_exact() ? r.product.rational() < bound - Rational(1, 1000000000)
                                             : r.product.value() < bound.get_d() - 1e-9;
    if (below) {
      throw Error(ErrorCode::CounterexampleAlarm, "volume product below 32/3",
                  nlohmann::json{{"index", i}, {"product", r.product.str()}, {"vertices", dump_vertices(p)}});
    }
    s.products.push_back(r.product.value());
    for (std::size_t k = 0; k < directions; ++k) {
      try {
        dimension_bound(p, Direction(random_unit(rng)));
        ++s.bound_checks;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ParallelismAmbiguity) throw;
      }
    }
  }
  std::vector<double> sorted = s.products;
  std::sort(sorted.begin(), sorted.end());
  s.min_product = sorted.front();
  s.max_product = sorted.back();
  s.median_product = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                       : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  s.argmin = static_cast<std::size_t>(std::min_element(s.products.begin(), s.products.end()) - s.products.begin());
  return s;
}

CorpusSummary corpus_verify(std::size_t count, std::size_t n_pairs_max, std::uint64_t seed, std::size_t directions) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "count must be at least 1");
  if (n_pairs_max < 3) throw Error(ErrorCode::InvalidArgument, "pairs-max must be at least 3");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pairs(3, n_pairs_max);
  std::vector<SymPolytope> bodies;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = pairs(rng);
    bodies.push_back(random_symmetric_polytope(n, rng()));
  }
  CorpusSummary s = corpus_verify(bodies, seed, directions);
  s.n_pairs_max = n_pairs_max;
  return s;
}

}  // namespace mahler
