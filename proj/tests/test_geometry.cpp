#include "mahler/error.hpp"
#include "mahler/optimizer.hpp"
#include "mahler/polytope.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace mahler;

namespace {

std::vector<QPoint3> random_integer_points(std::mt19937_64& rng, std::size_t pairs, long range) {
  std::uniform_int_distribution<long> d(-range, range);
  std::vector<QPoint3> pts;
  while (pts.size() < pairs) {
    QPoint3 p{Rational(d(rng)), Rational(d(rng)), Rational(d(rng))};
    if (p == QPoint3{0, 0, 0}) continue;
    pts.push_back(p);
  }
  return pts;
}

std::vector<QPoint3> with_negatives(const std::vector<QPoint3>& pts) {
  std::vector<QPoint3> all = pts;
  for (const auto& p : pts) all.push_back(-p);
  return all;
}

std::set<std::array<std::string, 3>> keyset(const std::vector<QPoint3>& pts) {
  std::set<std::array<std::string, 3>> s;
  for (const auto& p : pts) s.insert({format_rational(p.x), format_rational(p.y), format_rational(p.z)});
  return s;
}

void check_lattice_invariants(const SymPolytope& p) {
  const FaceLattice& lat = p.lattice();
  CHECK(lat.num_vertices() + lat.num_facets() == lat.num_edges() + 2);
  std::size_t incidences = 0;
  for (const auto& f : lat.facets()) {
    CHECK(f.size() >= 3);
    incidences += f.size();
  }
  CHECK(incidences == 2 * lat.num_edges());
  for (std::size_t e = 0; e < lat.num_edges(); ++e) {
    const auto [f, g] = lat.edge_facets()[e];
    CHECK(f != g);
  }
  for (std::size_t i = 0; i < lat.num_vertices(); ++i) {
    CHECK(lat.degree(i) >= 3);
    CHECK(p.partner(p.partner(i)) == i);
    CHECK(p.partner(i) != i);
  }
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    const std::size_t o = p.opposite_facet(k);
    CHECK(p.opposite_facet(o) == k);
    // Counter-clockwise from outside: the vector area points along the normal.
    const auto& cyc = lat.facets()[k];
    Point3 area{};
    for (std::size_t j = 0; j < cyc.size(); ++j) {
      area = area + cross(p.vertices()[cyc[j]], p.vertices()[cyc[(j + 1) % cyc.size()]]);
    }
    CHECK(dot(area, lat.planes()[k].normal) > 0.0);
  }
}

}  // namespace

TEST_CASE("cube, octahedron and cuboctahedron in the rational kernel") {
  const SymPolytope cube = shapes::cube();
  CHECK(cube.kernel() == Kernel::Rational);
  CHECK(cube.size() == 8);
  CHECK(cube.lattice().num_facets() == 6);
  CHECK(cube.lattice().num_edges() == 12);
  CHECK(volume(cube).rational() == 8);

  const SymPolytope octa = shapes::octahedron();
  CHECK(octa.size() == 6);
  CHECK(octa.lattice().num_facets() == 8);
  CHECK(volume(octa).rational() == Rational(4, 3));

  const SymPolytope co = shapes::cuboctahedron();
  CHECK(co.size() == 12);
  CHECK(co.lattice().num_facets() == 14);
  CHECK(volume(co).rational() == Rational(20, 3));
  // Volumes from the plane-enumeration oracle.
  CHECK(oracle::hull_volume(co.exact_vertices()) == Rational(20, 3));
  CHECK(oracle::hull_volume(cube.exact_vertices()) == 8);

  for (const auto* p : {&cube, &octa, &co}) check_lattice_invariants(*p);
}

TEST_CASE("rational hulls agree with brute-force plane enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto pts = random_integer_points(rng, 3 + trial % 5, 20);
    std::optional<SymPolytope> body;
    try {
      body.emplace(build_sym_polytope(pts, 0.0));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateInput);  // coplanar draw
      continue;
    }
    const SymPolytope& p = *body;
    std::vector<QPoint3> all = p.exact_vertices();
    const auto input = with_negatives(pts);
    const auto facets = oracle::enumerate_facets(input);
    const auto extreme = oracle::extreme_points(input, facets);
    std::vector<QPoint3> expected;
    for (auto i : extreme) expected.push_back(input[i]);
    CHECK(keyset(all) == keyset(expected));
    CHECK(volume(p).rational() == oracle::hull_volume(input));
    CHECK(p.lattice().num_facets() == facets.size());
    check_lattice_invariants(p);
  }
}

TEST_CASE("double hulls agree with the oracle on random sphere bodies") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SymPolytope p = random_symmetric_polytope(3 + seed % 5, 500 + seed);
    CHECK(p.kernel() == Kernel::Double);
    const double v = volume(p).value();
    CHECK(v == doctest::Approx(oracle::hull_volume(p.vertices(), 1e-10)).epsilon(1e-9));
    check_lattice_invariants(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p.vertices()[p.partner(i)] == -p.vertices()[i]);
    }
  }
}

TEST_CASE("interior and repeated points are dropped") {
  std::vector<QPoint3> pts{{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}, {Rational(1, 2), 0, 0}, {1, 1, 1}};
  const SymPolytope p = build_sym_polytope(pts, 0.0);
  CHECK(p.size() == 8);
  CHECK(volume(p).rational() == 8);
}

TEST_CASE("near-antipodal pairs are symmetrized exactly") {
  const std::vector<Point3> pts{{1, 0, 0}, {-1 + 1e-12, 1e-13, 0}, {0, 1, 0}, {0, 0, 1}};
  const SymPolytope p = build_sym_polytope(pts, 1e-9);
  CHECK(p.size() == 6);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.vertices()[p.partner(i)] == -p.vertices()[i]);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(build_sym_polytope(std::vector<QPoint3>{}, 0.0), Error);
  try {
    build_sym_polytope(std::vector<QPoint3>{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, 0.0);
    FAIL("planar input accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateInput);
  }
  try {
    build_sym_polytope(std::vector<Point3>{{1, 0, 0}, {1 + 1e-12, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 1e-9);
    FAIL("near-duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ToleranceConflict);
  }
  CHECK_THROWS_AS(build_sym_polytope(std::vector<Point3>{{0, 0, 0}}, 1e-9), Error);
}

TEST_CASE("dimension certificate is four affinely independent vertices") {
  const SymPolytope p = shapes::cuboctahedron();
  const auto c = p.dim_certificate();
  const auto& v = p.exact_vertices();
  CHECK(det3(v[c[1]] - v[c[0]], v[c[2]] - v[c[0]], v[c[3]] - v[c[0]]) != 0);
}

TEST_CASE("linear images scale the volume by |det|") {
  const Matrix3 a{{{2, 1, 0}, {0, 1, 0}, {0.5, 0, 3}}};
  const SymPolytope cube = shapes::cube();
  const SymPolytope img = linear_image(cube, a);
  CHECK(img.kernel() == Kernel::Rational);
  CHECK(volume(img).rational() == Rational(8) * to_rational(std::fabs(determinant(a))));
  const Matrix3 singular{{{1, 2, 3}, {2, 4, 6}, {0, 0, 1}}};
  try {
    linear_image(cube, singular);
    FAIL("singular map accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
  }
}

TEST_CASE("snap_to_rational keeps the lattice of a generic body") {
  const SymPolytope p = random_symmetric_polytope(5, 77);
  const SymPolytope q = snap_to_rational(p);
  CHECK(q.kernel() == Kernel::Rational);
  CHECK(q.size() == p.size());
  CHECK(q.lattice().same_labeled(p.lattice()));
  CHECK(volume(q).value() == doctest::Approx(volume(p).value()).epsilon(1e-9));
}

TEST_CASE("kernel conversion") {
  const SymPolytope d = to_double_kernel(shapes::cuboctahedron());
  CHECK(d.kernel() == Kernel::Double);
  CHECK(d.lattice().num_facets() == 14);
  CHECK(volume(d).value() == doctest::Approx(20.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("inradius and circumradius") {
  const SymPolytope cube = shapes::cube();
  CHECK(cube.inradius() == doctest::Approx(1.0));
  CHECK(cube.circumradius() == doctest::Approx(std::sqrt(3.0)));
  const SymPolytope octa = shapes::octahedron();
  CHECK(octa.inradius() == doctest::Approx(1.0 / std::sqrt(3.0)));
}
