#include "mahler/error.hpp"
#include "mahler/io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace mahler;
using nlohmann::json;

TEST_CASE("loader mirrors symmetric input") {
  const SymPolytope cube = load_polytope(std::string(MAHLER_TEST_DATA) + "/cube.json");
  CHECK(cube.kernel() == Kernel::Rational);
  CHECK(cube.size() == 8);
  CHECK(volume(cube).rational() == 8);

  const SymPolytope d = load_polytope(std::string(MAHLER_TEST_DATA) + "/cube.json", Kernel::Double);
  CHECK(d.kernel() == Kernel::Double);
  CHECK(volume(d).value() == doctest::Approx(8.0));
}

TEST_CASE("coordinates may be numbers, decimals or fractions") {
  const json j = json::parse(R"({"vertices": [[1, 0, 0], ["0", "1/3", "0"], [0, 0, 0.5]], "symmetric": true})");
  const SymPolytope p = polytope_from_json(j);
  CHECK(volume(p).rational() == Rational(4, 3) * Rational(1, 3) * Rational(1, 2));
  CHECK(p.exact_vertices()[2].z == Rational(1, 2));
  const SymPolytope q = polytope_from_json(json::parse(R"({"vertices": [["0.1", "0", "0"], [0, 1, 0], [0, 0, 1]]})"));
  CHECK(q.exact_vertices()[0].x == Rational(1, 10));
}

TEST_CASE("non-symmetric lists are rejected unless mirrored") {
  const json open = json::parse(R"({"vertices": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "symmetric": false})");
  CHECK_THROWS_AS(polytope_from_json(open), Error);
  const json closed = json::parse(
      R"({"vertices": [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], "symmetric": false})");
  CHECK(polytope_from_json(closed).size() == 6);
}

TEST_CASE("malformed polytope JSON") {
  for (const char* text : {R"({"points": []})", R"({"vertices": []})", R"({"vertices": [[1, 2]]})",
                           R"({"vertices": [["x", 0, 0]]})", R"({"vertices": [[true, 0, 0]]})"}) {
    CHECK_THROWS_AS(polytope_from_json(json::parse(text)), Error);
  }
  CHECK_THROWS_AS(load_polytope(std::string(MAHLER_TEST_DATA) + "/malformed.json"), Error);
  CHECK_THROWS_AS(load_polytope("/nonexistent/file.json"), Error);
}

TEST_CASE("rational round trip is exact") {
  const SymPolytope p = linear_image(shapes::cuboctahedron(), Matrix3{{{1, 0.5, 0}, {0, 1, 0.25}, {0.125, 0, 1}}});
  const SymPolytope q = polytope_from_json(json::parse(polytope_to_json(p).dump()));
  REQUIRE(q.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(q.exact_vertices()[i] == p.exact_vertices()[i]);
  CHECK(q.lattice().same_labeled(p.lattice()));
}

TEST_CASE("double round trip is bit-exact") {
  const SymPolytope p = random_symmetric_polytope(6, 123);
  const json j = polytope_to_json(p);
  CHECK(j["kernel"] == "double");
  const SymPolytope q = polytope_from_json(json::parse(j.dump()));
  REQUIRE(q.kernel() == Kernel::Double);
  REQUIRE(q.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(q.vertices()[i] == p.vertices()[i]);
  CHECK(q.lattice().same_labeled(p.lattice()));
}

TEST_CASE("sha256 digests") {
  CHECK(hex_sha256("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hex_sha256("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifests") {
  RunManifest m{"product", json{{"tol", "1e-9"}}, Kernel::Rational, "", 7u, hex_sha256("x")};
  const json j = to_json(m);
  CHECK(j["command"] == "product");
  CHECK(j["kernel"] == "rational");
  CHECK(j["seed"] == "7");
  CHECK(j["version"] == std::string(tool_version()));
  const std::string line = csv_manifest_line(m);
  CHECK(line.rfind("# manifest {", 0) == 0);
  CHECK(line.back() == '\n');
  CHECK(std::count(line.begin(), line.end(), '\n') == 1);
}

TEST_CASE("reports are decimal strings") {
  const json r = to_json(volume_product(shapes::cube()));
  CHECK(r["product"] == "32/3");
  CHECK(r["volume_primal"] == "8");
  CHECK(r["volume_polar"] == "4/3");
  CHECK(r["mahler_gap"] == "0");
  const json d = to_json(volume_product(shapes::octahedron(Kernel::Double)));
  CHECK(d["product"].get<std::string>().substr(0, 16) == "10.6666666666666");

  const json c = to_json(classify_minimizer_candidate(shapes::cuboctahedron()));
  CHECK(c["verdict"] == "Excluded");
  CHECK(c["evidence"]["witness"]["bound"] == "4");

  const json a = analyze_json(shapes::cuboctahedron());
  CHECK(a["V"] == 12);
  CHECK(a["E"] == 24);
  CHECK(a["F"] == 14);
  CHECK(a["volume"] == "20/3");
}

TEST_CASE("descent CSV") {
  DescentConfig cfg;
  cfg.seed = 9;
  const DescentTrace t = descend(random_symmetric_polytope(4, 1009), cfg);
  const std::string csv = descent_csv(t);
  CHECK(csv.rfind("step,product,gap,move_side,theta,t\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == t.steps.size() + 2);
  const json j = to_json(t);
  CHECK(j["steps"].size() == t.steps.size());
  // The initial body in the trace reloads.
  CHECK(polytope_from_json(j["initial"]).size() == t.initial.size());
}

TEST_CASE("write_file and read_file") {
  const auto path = std::filesystem::temp_directory_path() / "mahler_io_test.txt";
  write_file(path, "hello\n");
  CHECK(read_file(path) == "hello\n");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_file("/nonexistent-dir/x.txt", "x"), Error);
}
