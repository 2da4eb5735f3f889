#include "mahler/io.hpp"

#include "mahler/error.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mahler {

namespace {

using nlohmann::json;

Rational exact_coordinate(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.dump());
  // dump() prints the shortest decimal that reads back to the same double,
  // which is what a person typing 0.1 meant.
  if (v.is_number_float()) return parse_rational(v.dump());
  throw Error(ErrorCode::InvalidArgument, "coordinate must be a number or a decimal string",
              json{{"value", v.dump()}});
}

double double_coordinate(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) {
    throw Error(ErrorCode::InvalidArgument, "coordinate must be a number or a decimal string",
                json{{"value", v.dump()}});
  }
  const std::string s = v.get<std::string>();
  if (s.find('/') != std::string::npos) return Rational(parse_rational(s)).get_d();
  parse_rational(s);  // validates the syntax
  return std::strtod(s.c_str(), nullptr);
}

template <class T>
std::vector<Vec3<T>> read_points(const json& list, T (*coord)(const json&)) {
  std::vector<Vec3<T>> out;
  for (const auto& row : list) {
    if (!row.is_array() || row.size() != 3) {
      throw Error(ErrorCode::InvalidArgument, "each vertex must have three coordinates", json{{"vertex", out.size()}});
    }
    out.push_back({coord(row[0]), coord(row[1]), coord(row[2])});
  }
  return out;
}

template <class T>
void require_closed(const std::vector<Vec3<T>>& pts, double tol) {
  double radius = 0.0;
  for (const auto& p : pts) radius = std::max(radius, norm(to_double(p)));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool found = false;
    for (const auto& q : pts) {
      if constexpr (is_exact_v<T>) {
        found = q == -pts[i];
      } else {
        found = norm(q + pts[i]) <= tol * radius;
      }
      if (found) break;
    }
    if (!found) {
      throw Error(ErrorCode::InvalidArgument, "vertex list is not closed under negation; set \"symmetric\": true",
                  json{{"vertex", i}});
    }
  }
}

}  // namespace

SymPolytope polytope_from_json(const json& j, std::optional<Kernel> kernel, std::optional<double> tol) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array()) {
    throw Error(ErrorCode::InvalidArgument, "polytope JSON needs a \"vertices\" array");
  }
  if (j["vertices"].empty()) throw Error(ErrorCode::DegenerateInput, "empty vertex list");
  const bool symmetric = j.value("symmetric", true);
  if (!kernel) kernel = j.contains("kernel") ? parse_kernel(j["kernel"].get<std::string>()) : Kernel::Rational;

  if (*kernel == Kernel::Rational) {
    auto pts = read_points<Rational>(j["vertices"], exact_coordinate);
    if (!symmetric) require_closed(pts, 0.0);
    return build_sym_polytope(pts, 0.0);
  }
  const double t = tol.value_or(1e-9);
  auto pts = read_points<double>(j["vertices"], double_coordinate);
  if (!symmetric) require_closed(pts, t);
  return build_sym_polytope(pts, t);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

SymPolytope load_polytope(const std::filesystem::path& path, std::optional<Kernel> kernel, std::optional<double> tol) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, "malformed JSON in " + path.string(), json{{"parser", e.what()}});
  }
  return polytope_from_json(j, kernel, tol);
}

json polytope_to_json(const SymPolytope& p) {
  json verts = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.kernel() == Kernel::Rational) {
      const QPoint3& v = p.exact_vertices()[i];
      verts.push_back({format_rational(v.x), format_rational(v.y), format_rational(v.z)});
    } else {
      const Point3& v = p.vertices()[i];
      verts.push_back({format_double(v.x), format_double(v.y), format_double(v.z)});
    }
  }
  return json{{"vertices", verts}, {"symmetric", true}, {"kernel", to_string(p.kernel())}};
}

std::string hex_sha256(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string_view tool_version() { return "0.3.0"; }

json to_json(const RunManifest& m) {
  json j{{"command", m.command},
         {"config", m.config},
         {"kernel", to_string(m.kernel)},
         {"version", m.version.empty() ? std::string(tool_version()) : m.version},
         {"input_digest", m.input_digest}};
  j["seed"] = m.seed ? json(std::to_string(*m.seed)) : json(nullptr);
  return j;
}

std::string csv_manifest_line(const RunManifest& m) { return "# manifest " + to_json(m).dump() + "\n"; }

json to_json(const Point3& v) { return json{format_double(v.x), format_double(v.y), format_double(v.z)}; }

json to_json(const SpeedVector& s) {
  json out = json::array();
  if (s.has_exact()) {
    for (const auto& q : s.exact) out.push_back(format_rational(q));
  } else {
    for (double v : s.values) out.push_back(format_double(v));
  }
  return out;
}

json to_json(const FaceLattice& lat) {
  json edges = json::array();
  for (const auto& e : lat.edges()) edges.push_back({e[0], e[1]});
  json edge_facets = json::array();
  for (const auto& e : lat.edge_facets()) edge_facets.push_back({e[0], e[1]});
  return json{{"vertices", lat.num_vertices()}, {"edges", edges},           {"facets", lat.facets()},
              {"phi1", lat.vertex_edges()},     {"phi2", edge_facets}};
}

json to_json(const VolumeProductReport& r) {
  return json{{"volume_primal", r.volume_primal.str()},
              {"volume_polar", r.volume_polar.str()},
              {"product", r.product.str()},
              {"santalo_point", to_json(r.santalo_point)},
              {"mahler_gap", r.mahler_gap.str()},
              {"exact", r.product.is_exact()}};
}

json to_json(const DualityReport& r) {
  return json{{"primal_vertices", r.primal_vertices},
              {"primal_facets", r.primal_facets},
              {"polar_vertices", r.polar_vertices},
              {"polar_facets", r.polar_facets},
              {"incidence_transposed", r.incidence_transposed}};
}

json to_json(const DimensionReport& r) {
  json j{{"theta", to_json(r.theta.unit())},
         {"c_theta", format_rational(r.c_theta)},
         {"bound", format_rational(r.bound)},
         {"dim", r.dim_actual},
         {"nontrivial", r.nontrivial_certified}};
  if (r.witness_speed) j["witness_speed"] = to_json(*r.witness_speed);
  return j;
}

json to_json(const Witness& w) {
  return json{{"side", to_string(w.side)},
              {"theta", to_json(w.theta.unit())},
              {"c_theta", format_rational(w.c_theta)},
              {"bound", format_rational(w.bound)},
              {"dim", w.dim},
              {"speed", to_json(w.speed)}};
}

json to_json(const MinimizerClassification& c) {
  const ClassificationEvidence& e = c.evidence;
  json sizes = json::object();
  for (const auto& [m, count] : e.facet_sizes) sizes[std::to_string(m)] = count;
  json ev{{"vertices", e.vertices}, {"edges", e.edges},  {"facets", e.facets},
          {"max_degree", e.max_degree}, {"facet_sizes", sizes}, {"rule", e.rule},
          {"kernel", to_string(e.kernel)}};
  if (e.adjacent_quads) ev["adjacent_quads"] = {(*e.adjacent_quads)[0], (*e.adjacent_quads)[1]};
  if (e.shared_edge) ev["shared_edge"] = {(*e.shared_edge)[0], (*e.shared_edge)[1]};
  ev["witness"] = e.witness ? to_json(*e.witness) : json(nullptr);
  return json{{"verdict", to_string(c.verdict)}, {"evidence", ev}};
}

json to_json(const DescentTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"iteration", s.iteration},
                     {"side", to_string(s.side)},
                     {"theta", to_json(s.theta.unit())},
                     {"speed", to_json(s.alpha)},
                     {"half_width", format_double(s.half_width)},
                     {"t", format_double(s.t)},
                     {"product_before", format_double(s.product_before)},
                     {"product_after", format_double(s.product_after)},
                     {"lattice_event", s.lattice_event},
                     {"vertices_before", s.before.size()}});
  }
  return json{{"initial", polytope_to_json(t.initial)},
              {"final", polytope_to_json(t.final)},
              {"initial_product", format_double(t.initial_product)},
              {"final_product", format_double(t.final_product)},
              {"final_gap", format_double(t.final_gap)},
              {"steps", steps},
              {"candidates_evaluated", t.candidates_evaluated},
              {"stall_with_nontrivial_speed", t.stall_with_nontrivial_speed},
              {"budget_exhausted", t.budget_exhausted},
              {"stop_reason", t.stop_reason},
              {"final_classification", to_json(t.final_classification)}};
}

json to_json(const CorpusSummary& s) {
  json products = json::array();
  for (double p : s.products) products.push_back(format_double(p));
  return json{{"count", s.count},
              {"pairs_max", s.n_pairs_max},
              {"seed", std::to_string(s.seed)},
              {"min_product", format_double(s.min_product)},
              {"median_product", format_double(s.median_product)},
              {"max_product", format_double(s.max_product)},
              {"argmin", s.argmin},
              {"bound_checks", s.bound_checks},
              {"alarm", false},
              {"products", products}};
}

json analyze_json(const SymPolytope& p) {
  const FaceLattice& lat = p.lattice();
  json sizes = json::object();
  for (std::size_t k = 0; k < lat.num_facets(); ++k) {
    const std::string key = std::to_string(lat.facet_size(k));
    sizes[key] = sizes.value(key, 0) + 1;
  }
  json planes = json::array();
  for (const auto& pl : lat.planes()) planes.push_back({{"normal", to_json(pl.normal)}, {"offset", format_double(pl.offset)}});
  return json{{"kernel", to_string(p.kernel())},
              {"V", lat.num_vertices()},
              {"E", lat.num_edges()},
              {"F", lat.num_facets()},
              {"max_degree", lat.max_degree()},
              {"facet_sizes", sizes},
              {"volume", volume(p).str()},
              {"pairing", p.pairing()},
              {"dim_certificate", p.dim_certificate()},
              {"lattice", to_json(lat)},
              {"planes", planes},
              {"polytope", polytope_to_json(p)}};
}

json speeds_json(const SpeedSpace& s, const DimensionReport& r) {
  json basis = json::array();
  for (const auto& b : s.basis) basis.push_back(to_json(b));
  json j{{"dim", s.dim()},
         {"bound", format_rational(r.bound)},
         {"c_theta", format_rational(r.c_theta)},
         {"nontrivial", r.witness_speed.has_value() || nontrivial_component(s).has_value()},
         {"basis", basis},
         {"theta", to_json(s.theta.unit())}};
  return j;
}

std::string descent_csv(const DescentTrace& t) {
  const double bound = mahler_bound().get_d();
  std::string out = "step,product,gap,move_side,theta,t\n";
  out += "0," + format_double(t.initial_product) + "," + format_double(t.initial_product - bound) + ",,,\n";
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    const Point3& th = s.theta.unit();
    out += std::to_string(k + 1) + "," + format_double(s.product_after) + "," +
           format_double(s.product_after - bound) + "," + to_string(s.side) + "," + format_double(th.x) + " " +
           format_double(th.y) + " " + format_double(th.z) + "," + format_double(s.t) + "\n";
  }
  return out;
}

}  // namespace mahler
