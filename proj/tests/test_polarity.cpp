#include "mahler/error.hpp"
#include "mahler/optimizer.hpp"
#include "mahler/polarity.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace mahler;

namespace {

std::set<std::array<std::string, 3>> keyset(const std::vector<QPoint3>& pts) {
  std::set<std::array<std::string, 3>> s;
  for (const auto& p : pts) s.insert({format_rational(p.x), format_rational(p.y), format_rational(p.z)});
  return s;
}

SymPolytope integer_body(std::uint64_t seed, std::size_t pairs) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> d(-9, 9);
  for (;;) {
    std::vector<QPoint3> pts;
    while (pts.size() < pairs) {
      QPoint3 p{Rational(d(rng)), Rational(d(rng)), Rational(d(rng))};
      if (!(p == QPoint3{0, 0, 0})) pts.push_back(p);
    }
    try {
      return build_sym_polytope(pts, 0.0);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST_CASE("the polar of the cube is the octahedron") {
  const SymPolytope q = polar(shapes::cube());
  CHECK(q.kernel() == Kernel::Rational);
  CHECK(keyset(q.exact_vertices()) == keyset(shapes::octahedron().exact_vertices()));
  CHECK(volume(q).rational() == Rational(4, 3));
}

TEST_CASE("volume product of the endpoint bodies is 32/3") {
  for (const auto& body : {shapes::cube(), shapes::octahedron()}) {
    const VolumeProductReport r = volume_product(body);
    REQUIRE(r.product.is_exact());
    CHECK(r.product.rational() == Rational(32, 3));
    CHECK(r.mahler_gap.rational() == 0);
    CHECK(r.santalo_point == Point3{0, 0, 0});
  }
  for (const auto& body : {shapes::cube(Kernel::Double), shapes::octahedron(Kernel::Double)}) {
    const double p = volume_product(body).product.value();
    CHECK(std::fabs(p - 32.0 / 3.0) <= 1e-12 * 32.0 / 3.0);
  }
  CHECK(mahler_bound() == Rational(32, 3));
}

TEST_CASE("polar volume matches the half-space oracle exactly") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const SymPolytope p = integer_body(seed, 3 + seed % 4);
    const SymPolytope q = polar(p);
    const auto hv = oracle::halfspace_vertices(p.exact_vertices());
    CHECK(keyset(hv) == keyset(q.exact_vertices()));
    CHECK(volume(q).rational() == oracle::hull_volume(hv));
  }
}

TEST_CASE("bipolar recovers the vertex set and the labels") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const SymPolytope p = integer_body(100 + seed, 4 + seed % 3);
    const SymPolytope pp = polar(polar(p));
    REQUIRE(pp.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(pp.exact_vertices()[i] == p.exact_vertices()[i]);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SymPolytope p = random_symmetric_polytope(3 + seed % 5, 900 + seed);
    const SymPolytope pp = polar(polar(p));
    REQUIRE(pp.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(norm(pp.vertices()[i] - p.vertices()[i]) <= 1e-9);
  }
}

TEST_CASE("incidence duality") {
  for (const auto& body : {shapes::cube(), shapes::octahedron(), shapes::cuboctahedron()}) {
    const DualityReport r = verify_incidence_duality(body);
    CHECK(r.polar_vertices == r.primal_facets);
    CHECK(r.polar_facets == r.primal_vertices);
    CHECK(r.incidence_transposed);
  }
  // Polar vertex k is dual to facet k.
  const SymPolytope p = shapes::cuboctahedron();
  const SymPolytope q = polar(p);
  for (std::size_t k = 0; k < p.lattice().num_facets(); ++k) {
    for (std::size_t i : p.lattice().facets()[k]) {
      const auto& polar_facet = q.lattice().facets()[i];
      CHECK(std::find(polar_facet.begin(), polar_facet.end(), k) != polar_facet.end());
    }
  }
}

TEST_CASE("Santalo point of a simplex is its centroid") {
  const std::vector<Point3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const Polytope simplex = Polytope::hull(pts);
  const SantaloResult r = santalo_point(simplex);
  CHECK(norm(r.point - Point3{0.25, 0.25, 0.25}) < 1e-5);
  // |S^c| for the centroid c of a simplex, from the half-space oracle.
  CHECK(r.polar_volume == doctest::Approx(oracle::polar_volume_about(pts, r.point)).epsilon(1e-8));
}

TEST_CASE("Santalo point of an irregular body agrees with a grid search") {
  const std::vector<Point3> pts{{0, 0, 0}, {2, 0, 0}, {0, 1, 0}, {0, 0, 1.5}, {1.2, 0.9, 0.2}, {0.3, 0.2, 1.4}};
  const Polytope body = Polytope::hull(pts);
  const SantaloResult r = santalo_point(body);
  Point3 centre{};
  for (const auto& v : body.vertices()) centre = centre + v;
  centre = centre / static_cast<double>(body.size());
  const Point3 grid = oracle::santalo_grid(body.vertices(), centre, 0.5);
  CHECK(norm(r.point - grid) < 1e-3);
  CHECK(r.polar_volume <= oracle::polar_volume_about(body.vertices(), grid) * (1 + 1e-9));
}

TEST_CASE("santalo_polar rejects centres outside the body") {
  const Polytope cube = shapes::cube(Kernel::Double).body();
  try {
    santalo_polar(cube, Point3{2, 0, 0});
    FAIL("outside centre accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CenterOutsideBody);
  }
  const Polytope moved = santalo_polar(cube, Point3{0.5, 0, 0});
  CHECK(volume(moved).value() == doctest::Approx(oracle::polar_volume_about(cube.vertices(), Point3{0.5, 0, 0})));
}

TEST_CASE("the product is invariant under linear maps") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  const SymPolytope p = random_symmetric_polytope(5, 31);
  const double base = volume_product(p).product.value();
  for (int k = 0; k < 10; ++k) {
    Matrix3 a;
    for (auto& row : a) {
      for (auto& x : row) x = u(rng);
    }
    if (std::fabs(determinant(a)) < 0.1) continue;
    CHECK(volume_product(linear_image(p, a)).product.value() == doctest::Approx(base).epsilon(1e-9));
  }
  // Exactly, in the rational kernel.
  const Matrix3 a{{{1, 2, 0}, {0, 1, 3}, {1, 0, 1}}};
  CHECK(volume_product(linear_image(shapes::cuboctahedron(), a)).product.rational() == Rational(40, 3));
}
