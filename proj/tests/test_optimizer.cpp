#include "mahler/error.hpp"
#include "mahler/optimizer.hpp"
#include "mahler/polarity.hpp"

#include <doctest.h>

using namespace mahler;

TEST_CASE("random bodies are reproducible and symmetric") {
  const SymPolytope a = random_symmetric_polytope(6, 42);
  const SymPolytope b = random_symmetric_polytope(6, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.vertices()[i] == b.vertices()[i]);
  CHECK(a.size() <= 12);
  CHECK(a.size() % 2 == 0);
  const SymPolytope c = random_symmetric_polytope(6, 43);
  CHECK_FALSE(a.vertices()[0] == c.vertices()[0]);
  CHECK_THROWS_AS(random_symmetric_polytope(2, 1), Error);
}

TEST_CASE("descent stops at once on the endpoint bodies") {
  for (const auto& body : {shapes::cube(Kernel::Double), shapes::octahedron(Kernel::Double)}) {
    const DescentTrace t = descend(body);
    CHECK(t.steps.empty());
    CHECK(t.stop_reason == "terminal-lattice");
    CHECK(std::fabs(t.final_gap) < 1e-12);
  }
}

TEST_CASE("descent traces are monotone and stay in the vertex class") {
  for (std::uint64_t s : {2u, 6u, 9u}) {
    const SymPolytope p = random_symmetric_polytope(3 + s % 4, 1000 + s);
    DescentConfig cfg;
    cfg.seed = s;
    const DescentTrace t = descend(p, cfg);
    CHECK(t.initial_product == doctest::Approx(volume_product(p).product.value()));
    double prev = t.initial_product;
    for (const auto& st : t.steps) {
      CHECK(st.product_before == prev);
      CHECK(st.product_after <= st.product_before);
      CHECK(std::fabs(st.t) > 0.0);
      prev = st.product_after;
    }
    CHECK(t.final.size() <= cfg.max_vertices);
    CHECK(t.final_product >= 32.0 / 3.0 - 1e-6);
    CHECK(t.final_product == doctest::Approx(product_value(t.final)));
    CHECK_FALSE(t.stop_reason.empty());
  }
}

TEST_CASE("a descent that reaches a terminal lattice lands on 32/3") {
  const SymPolytope p = random_symmetric_polytope(5, 1009);
  DescentConfig cfg;
  cfg.seed = 9;
  const DescentTrace t = descend(p, cfg);
  if (t.stop_reason == "terminal-lattice") {
    CHECK(t.final_gap == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    CHECK(t.final_classification.verdict != Verdict::Excluded);
  }
}

TEST_CASE("corpus verification") {
  const CorpusSummary s = corpus_verify(15, 6, 4);
  CHECK(s.count == 15);
  CHECK(s.products.size() == 15);
  CHECK(s.min_product >= 32.0 / 3.0 - 1e-9);
  CHECK(s.min_product <= s.median_product);
  CHECK(s.median_product <= s.max_product);
  CHECK(s.bound_checks > 0);
  CHECK(s.products[s.argmin] == s.min_product);

  const std::vector<SymPolytope> exact{shapes::cube(), shapes::octahedron(), shapes::cuboctahedron()};
  const CorpusSummary e = corpus_verify(exact, 1, 4);
  CHECK(e.min_product == doctest::Approx(32.0 / 3.0));
  CHECK_THROWS_AS(corpus_verify(std::span<const SymPolytope>{}, 1), Error);
}
