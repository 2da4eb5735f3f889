// Seeded property checks over random symmetric bodies.

#include "mahler/combinatorics.hpp"
#include "mahler/error.hpp"
#include "mahler/io.hpp"
#include "mahler/optimizer.hpp"
#include "mahler/polarity.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace mahler;

namespace {

std::vector<SymPolytope> corpus(std::size_t n, std::uint64_t seed) {
  std::vector<SymPolytope> out;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_symmetric_polytope(3 + i % 6, rng()));
  return out;
}

Matrix3 random_map(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    Matrix3 a;
    for (auto& row : a) {
      for (auto& x : row) x = u(rng);
    }
    if (std::fabs(determinant(a)) > 0.2) return a;
  }
}

}  // namespace

TEST_CASE("polarity exchanges vertices and facets and the product is at least 32/3") {
  for (const auto& p : corpus(30, 1)) {
    const SymPolytope q = polar(p);
    CHECK(q.size() == p.lattice().num_facets());
    CHECK(q.lattice().num_facets() == p.size());
    const double a = volume_product(p).product.value();
    const double b = volume_product(q).product.value();
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
    CHECK(a >= 32.0 / 3.0 - 1e-9);
    CHECK(volume(q).value() == doctest::Approx(oracle::polar_volume_about(p.vertices(), Point3{})).epsilon(1e-8));
  }
}

TEST_CASE("affine invariance of the product") {
  std::mt19937_64 rng(2);
  for (const auto& p : corpus(10, 2)) {
    const double base = volume_product(p).product.value();
    for (int k = 0; k < 5; ++k) {
      const SymPolytope img = linear_image(p, random_map(rng));
      CHECK(volume_product(img).product.value() == doctest::Approx(base).epsilon(1e-6));
      CHECK(img.lattice().num_facets() == p.lattice().num_facets());
    }
  }
}

TEST_CASE("rational bodies: exact duality and exact product invariance") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> d(-6, 6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<QPoint3> pts;
    for (int k = 0; k < 4; ++k) pts.push_back({Rational(d(rng)), Rational(d(rng)), Rational(d(rng))});
    std::optional<SymPolytope> p;
    try {
      p.emplace(build_sym_polytope(pts, 0.0));
    } catch (const Error&) {
      continue;
    }
    const SymPolytope q = polar(*p);
    CHECK(volume_product(q).product.rational() == volume_product(*p).product.rational());
    CHECK(volume_product(*p).product.rational() >= mahler_bound());
    const Matrix3 a{{{1, 1, 0}, {0, 2, 1}, {1, 0, 1}}};
    CHECK(volume_product(linear_image(*p, a)).product.rational() == volume_product(*p).product.rational());
  }
}

TEST_CASE("dimension bound and oracle dimension agree over many directions") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (const auto& p : corpus(12, 4)) {
    for (int k = 0; k < 8; ++k) {
      const Direction theta(Point3{g(rng), g(rng), g(rng)});
      const DimensionReport r = dimension_bound(p, theta);
      CHECK(r.dim_actual == oracle::admissible_dimension(p.vertices(), theta.unit()));
    }
    // Directions inside facet planes exercise the parallel bonus.
    for (std::size_t e = 0; e < std::min<std::size_t>(p.lattice().num_edges(), 6); ++e) {
      const auto [a, b] = p.lattice().edges()[e];
      const Direction theta(p.vertices()[b] - p.vertices()[a]);
      try {
        const DimensionReport r = dimension_bound(p, theta);
        CHECK(Rational(static_cast<long>(r.dim_actual)) >= r.bound);
      } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ParallelismAmbiguity);
      }
    }
  }
}

TEST_CASE("labeled lattice persists on certified intervals") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (const auto& p : corpus(10, 5)) {
    const Direction theta(Point3{g(rng), g(rng), g(rng)});
    const auto alpha = nontrivial_component(admissible_space(p, theta));
    if (!alpha) continue;
    CHECK(is_admissible(p, theta, *alpha));
    CHECK(is_odd(p, *alpha, 1e-12));
    double c = 0.0;
    try {
      c = persistence_interval(p, theta, *alpha);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoPersistence);
      continue;
    }
    for (double t : persistence_schedule(c)) {
      CHECK(deform(p, theta, *alpha, t).lattice().same_labeled(p.lattice()));
    }
  }
}

TEST_CASE("polytope JSON round-trips for every corpus body") {
  for (const auto& p : corpus(10, 6)) {
    const SymPolytope q = polytope_from_json(nlohmann::json::parse(polytope_to_json(p).dump()));
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(q.vertices()[i] == p.vertices()[i]);
  }
}
