#pragma once

#include "mahler/combinatorics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mahler {

/// n_pairs points uniform on the unit sphere (seeded), symmetrized and
/// hulled. Retries when a pair is lost or the hull degenerates; throws
/// GenerationFailure after the retry budget.
SymPolytope random_symmetric_polytope(std::size_t n_pairs, std::uint64_t seed, Kernel kernel = Kernel::Double);

struct DescentConfig {
  std::size_t max_vertices = 12;
  /// Random directions tried per iteration and side, on top of the
  /// facet-plane and shared-edge candidates.
  std::size_t direction_budget = 6;
  std::size_t line_search_samples = 24;
  double termination_tol = 1e-9;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 300;
  bool facet_directions = true;
  PersistenceOptions persistence;
};

struct DescentStep {
  std::size_t iteration = 0;
  SymPolytope before;
  Side side = Side::Primal;
  Direction theta{Point3{1.0, 0.0, 0.0}};
  SpeedVector alpha;
  double half_width = 0.0;
  double t = 0.0;
  double product_before = 0.0;
  double product_after = 0.0;
  /// The step went to the end of its certified interval, where facets
  /// merge or a vertex stops being extreme.
  bool lattice_event = false;
};

struct DescentTrace {
  SymPolytope initial;
  SymPolytope final;
  std::vector<DescentStep> steps;
  MinimizerClassification final_classification;
  double initial_product = 0.0;
  double final_product = 0.0;
  double final_gap = 0.0;
  std::size_t candidates_evaluated = 0;
  /// A non-trivial speed existed, the product varied along it, yet no
  /// sampled step improved it.
  bool stall_with_nontrivial_speed = false;
  bool budget_exhausted = false;
  std::string stop_reason;
};

/// Volume-product descent in the double kernel. Each move deforms P or its
/// polar along a non-trivial admissible speed inside a certified
/// persistence interval or to its closing lattice event, so the vertex
/// count never grows. Heuristic: the
/// absence of an improving move is evidence of local minimality, not proof.
DescentTrace descend(const SymPolytope& p0, const DescentConfig& cfg = {});

/// |P| |P°| in double precision.
double product_value(const SymPolytope& p);

struct CorpusSummary {
  std::size_t count = 0;
  std::size_t n_pairs_max = 0;
  std::uint64_t seed = 0;
  double min_product = 0.0;
  double median_product = 0.0;
  double max_product = 0.0;
  std::size_t argmin = 0;
  std::size_t bound_checks = 0;
  std::vector<double> products;
};

/// Products of `count` random bodies with 3..n_pairs_max pairs, plus
/// dimension-bound checks along `directions` random directions per body.
/// Throws CounterexampleAlarm (with a vertex dump) if a product falls below
/// 32/3 - 1e-9, and BoundViolation if the bound fails.
CorpusSummary corpus_verify(std::size_t count, std::size_t n_pairs_max, std::uint64_t seed,
                            std::size_t directions = 8);
CorpusSummary corpus_verify(std::span<const SymPolytope> bodies, std::uint64_t seed, std::size_t directions = 8);

}  // namespace mahler
