// mahler: command-line front end over the JSON polytope format.

#include "mahler/error.hpp"
#include "mahler/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <random>
#include <set>

using namespace mahler;
using nlohmann::json;

namespace {

struct Common {
  std::string input;
  std::string kernel;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
};

void add_common(CLI::App* cmd, Common& c, bool positional_input = true) {
  if (positional_input) {
    cmd->add_option("input", c.input, "polytope JSON file")->required()->check(CLI::ExistingFile);
  }
  cmd->add_option("--kernel", c.kernel, "rational or double")->check(CLI::IsMember({"rational", "double"}));
  cmd->add_option("--tol", c.tol, "coplanarity tolerance (double kernel)")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--out", c.out, "output file (default stdout)");
}

Kernel kernel_of(const Common& c, Kernel fallback) { return c.kernel.empty() ? fallback : parse_kernel(c.kernel); }

struct Loaded {
  SymPolytope body;
  std::string digest;
};

Loaded load(const Common& c, Kernel k) {
  const std::string bytes = read_file(c.input);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, "malformed JSON in " + c.input, json{{"parser", e.what()}});
  }
  return {polytope_from_json(j, k, c.tol), hex_sha256(bytes)};
}

RunManifest manifest(const std::string& command, const Common& c, Kernel k, const std::string& digest,
                     json config = json::object(), bool seeded = false) {
  config["tol"] = format_double(c.tol);
  if (!c.input.empty()) config["input"] = c.input;
  RunManifest m{command, std::move(config), k, std::string(tool_version()), std::nullopt, digest};
  if (seeded) m.seed = c.seed;
  return m;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

void emit_json(const Common& c, const RunManifest& m, json body) {
  body["manifest"] = to_json(m);
  emit(c.out, body.dump(2) + "\n");
}

Point3 parse_theta(const std::string& text) {
  std::vector<double> xs;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    xs.push_back(Rational(parse_rational(part)).get_d());
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (xs.size() != 3) throw Error(ErrorCode::InvalidArgument, "--theta needs three comma-separated components");
  const Point3 v{xs[0], xs[1], xs[2]};
  if (norm(v) == 0.0) throw Error(ErrorCode::InvalidArgument, "--theta must be non-zero");
  return v;
}

Direction direction_for(const SymPolytope& p, const std::string& text) {
  // Parsed exactly so that rational bodies see exactly the typed direction.
  if (p.kernel() == Kernel::Rational) {
    std::vector<Rational> q;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      q.push_back(parse_rational(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (q.size() != 3) throw Error(ErrorCode::InvalidArgument, "--theta needs three comma-separated components");
    const QPoint3 v{q[0], q[1], q[2]};
    if (v == QPoint3{0, 0, 0}) throw Error(ErrorCode::InvalidArgument, "--theta must be non-zero");
    return Direction(v);
  }
  return Direction(parse_theta(text));
}

/// Edge directions of every facet, then seeded random integer directions.
std::vector<Direction> sweep_directions(const SymPolytope& p, std::size_t count, std::uint64_t seed) {
  std::vector<Direction> dirs;
  std::set<std::array<std::string, 3>> seen;
  auto push = [&](const Direction& d) {
    if (dirs.size() >= count) return;
    // +/-theta give the same space; keep one sign.
    Point3 u = d.unit();
    const bool flip = u.x < 0 || (u.x == 0 && (u.y < 0 || (u.y == 0 && u.z < 0)));
    const Direction e = flip ? -d : d;
    u = e.unit();
    if (seen.insert({format_double(u.x), format_double(u.y), format_double(u.z)}).second) dirs.push_back(e);
  };
  for (const auto& e : p.lattice().edges()) {
    if (p.kernel() == Kernel::Rational) {
      push(Direction(p.exact_vertices()[e[1]] - p.exact_vertices()[e[0]]));
    } else {
      push(Direction(p.vertices()[e[1]] - p.vertices()[e[0]]));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> coord(-1000, 1000);
  for (std::size_t guard = 0; dirs.size() < count && guard < 100 * count; ++guard) {
    const QPoint3 v{Rational(coord(rng)), Rational(coord(rng)), Rational(coord(rng))};
    if (v == QPoint3{0, 0, 0}) continue;
    push(p.kernel() == Kernel::Rational ? Direction(v) : Direction(to_double(v)));
  }
  return dirs;
}

int fail(const Error& e) {
  std::cerr << e.to_json().dump() << "\n";
  return is_assertion_class(e.code()) ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume products, polarity and shadow systems of origin-symmetric 3D polytopes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  Common c;
  std::string theta;
  std::size_t dirs = 64;
  std::size_t corpus_dirs = 8;
  std::size_t samples = 17;
  std::size_t n_max = 12;
  std::size_t count = 200;
  std::size_t pairs_max = 6;
  std::size_t pairs = 6;
  std::string input_opt;

  auto* analyze = app.add_subcommand("analyze", "census, face lattice and duality check");
  add_common(analyze, c);
  auto* polar_cmd = app.add_subcommand("polar", "polar body and volume product");
  add_common(polar_cmd, c);
  auto* product = app.add_subcommand("product", "volume product report");
  add_common(product, c);
  auto* speeds = app.add_subcommand("speeds", "symmetric admissible speeds along a direction");
  add_common(speeds, c);
  speeds->add_option("--theta", theta, "direction x,y,z")->required();
  auto* sweep = app.add_subcommand("bound-sweep", "dimension bound over many directions (CSV)");
  add_common(sweep, c);
  sweep->add_option("--dirs", dirs, "number of directions")->check(CLI::PositiveNumber);
  sweep->add_option("--csv", c.csv, "CSV file (default: --out or stdout)");
  auto* classify = app.add_subcommand("classify", "classify a minimizer candidate");
  add_common(classify, c);
  auto* deform_cmd = app.add_subcommand("deform", "shadow-system trajectory (CSV)");
  add_common(deform_cmd, c);
  deform_cmd->add_option("--theta", theta, "direction x,y,z")->required();
  deform_cmd->add_option("--samples", samples, "samples on [-c, c]")->check(CLI::Range(3, 10001));
  deform_cmd->add_option("--csv", c.csv, "CSV file (default: --out or stdout)");
  auto* optimize = app.add_subcommand("optimize", "volume-product descent");
  add_common(optimize, c, false);
  optimize->add_option("--input", input_opt, "start polytope (default: random)")->check(CLI::ExistingFile);
  optimize->add_option("--n-max", n_max, "vertex budget")->check(CLI::Range(6, 64));
  optimize->add_option("--pairs", pairs, "pairs of the random start")->check(CLI::Range(3, 32));
  optimize->add_option("--csv", c.csv, "trajectory CSV");
  auto* corpus = app.add_subcommand("corpus", "random corpus check of the lower bound");
  add_common(corpus, c, false);
  corpus->add_option("--count", count, "bodies")->check(CLI::PositiveNumber);
  corpus->add_option("--pairs-max", pairs_max, "max vertex pairs per body")->check(CLI::Range(3, 64));
  corpus->add_option("--dirs", corpus_dirs, "bound checks per body");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    return fail(Error(ErrorCode::InvalidArgument, e.what(), json{{"usage", "run with --help"}}));
  }

  try {
    if (analyze->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Rational);
      const Loaded in = load(c, k);
      json body = analyze_json(in.body);
      body["duality"] = to_json(verify_incidence_duality(in.body));
      emit_json(c, manifest("analyze", c, k, in.digest), body);
    } else if (polar_cmd->parsed() || product->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Rational);
      const Loaded in = load(c, k);
      json body = to_json(volume_product(in.body));
      if (polar_cmd->parsed()) body["polar"] = polytope_to_json(polar(in.body));
      emit_json(c, manifest(polar_cmd->parsed() ? "polar" : "product", c, k, in.digest), body);
    } else if (speeds->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Rational);
      const Loaded in = load(c, k);
      const Direction d = direction_for(in.body, theta);
      const SpeedSpace space = admissible_space(in.body, d);
      const DimensionReport r = dimension_bound(in.body, d);
      emit_json(c, manifest("speeds", c, k, in.digest, json{{"theta", theta}}), speeds_json(space, r));
    } else if (sweep->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Rational);
      const Loaded in = load(c, k);
      std::string csv = csv_manifest_line(manifest("bound-sweep", c, k, in.digest, json{{"dirs", dirs}}, true));
      csv += "theta_x,theta_y,theta_z,c_theta,bound,dim,nontrivial\n";
      std::size_t skipped = 0;
      for (const Direction& d : sweep_directions(in.body, dirs, c.seed)) {
        try {
          const DimensionReport r = dimension_bound(in.body, d);
          const Point3 u = d.unit() + Point3{0.0, 0.0, 0.0};  // no "-0" in the CSV
          csv += format_double(u.x) + "," + format_double(u.y) + "," + format_double(u.z) + "," +
                 format_rational(r.c_theta) + "," + format_rational(r.bound) + "," + std::to_string(r.dim_actual) +
                 "," + (r.nontrivial_certified ? "true" : "false") + "\n";
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ParallelismAmbiguity) throw;
          ++skipped;
        }
      }
      if (skipped > 0) std::cerr << json{{"skipped_ambiguous", skipped}}.dump() << "\n";
      emit(c.csv.empty() ? c.out : c.csv, csv);
    } else if (classify->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Rational);
      const Loaded in = load(c, k);
      emit_json(c, manifest("classify", c, k, in.digest), to_json(classify_minimizer_candidate(in.body)));
    } else if (deform_cmd->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Rational);
      const Loaded in = load(c, k);
      const Direction d = direction_for(in.body, theta);
      const SpeedSpace space = admissible_space(in.body, d);
      std::optional<SpeedVector> alpha = nontrivial_component(space);
      if (!alpha) {
        throw Error(ErrorCode::InvalidArgument, "every admissible speed along this direction is trivial",
                    json{{"dim", space.dim()}});
      }
      const double half = persistence_interval(in.body, d, *alpha);
      std::string csv = csv_manifest_line(manifest("deform", c, k, in.digest,
                                                   json{{"theta", theta}, {"samples", samples},
                                                        {"half_width", format_double(half)}}));
      csv += "t,volume,polar_volume,product\n";
      for (std::size_t i = 0; i < samples; ++i) {
        const double t = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(samples - 1);
        const VolumeProductReport r = volume_product(deform(in.body, d, *alpha, t));
        csv += format_double(t) + "," + r.volume_primal.str() + "," + r.volume_polar.str() + "," + r.product.str() +
               "\n";
      }
      emit(c.csv.empty() ? c.out : c.csv, csv);
    } else if (optimize->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Double);
      if (k != Kernel::Double) throw Error(ErrorCode::InvalidArgument, "the descent runs in the double kernel");
      SymPolytope start = shapes::cube(Kernel::Double);
      std::string digest;
      if (!input_opt.empty()) {
        c.input = input_opt;
        Loaded in = load(c, Kernel::Double);
        start = std::move(in.body);
        digest = in.digest;
      } else {
        start = random_symmetric_polytope(pairs, c.seed);
        digest = hex_sha256(polytope_to_json(start).dump());
      }
      DescentConfig cfg;
      cfg.max_vertices = n_max;
      cfg.seed = c.seed;
      if (start.size() > n_max) {
        throw Error(ErrorCode::InvalidArgument, "start polytope has more vertices than --n-max",
                    json{{"vertices", start.size()}, {"n_max", n_max}});
      }
      const DescentTrace trace = descend(start, cfg);
      const RunManifest m = manifest("optimize", c, k, digest, json{{"n_max", n_max}, {"pairs", pairs}}, true);
      emit_json(c, m, to_json(trace));
      if (!c.csv.empty()) write_file(c.csv, csv_manifest_line(m) + descent_csv(trace));
    } else if (corpus->parsed()) {
      const Kernel k = kernel_of(c, Kernel::Double);
      if (k != Kernel::Double) throw Error(ErrorCode::InvalidArgument, "the corpus is generated in the double kernel");
      const CorpusSummary s = corpus_verify(count, pairs_max, c.seed, corpus_dirs);
      emit_json(c,
                manifest("corpus", c, k, hex_sha256(""),
                         json{{"count", count}, {"pairs_max", pairs_max}, {"dirs", corpus_dirs}}, true),
                to_json(s));
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(Error(ErrorCode::InternalInconsistency, e.what()));
  }
  return 0;
}
