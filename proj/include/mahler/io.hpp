#pragma once

#include "mahler/optimizer.hpp"
#include "mahler/polarity.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace mahler {

/// Polytope file: {"vertices": [[x, y, z], ...], "symmetric": true}.
/// With "symmetric" true only one vertex per +/- pair is needed and the
/// loader adds the negatives; otherwise the list must already be closed
/// under negation. Coordinates are decimal strings ("1/3" is accepted) or
/// JSON numbers. An optional "kernel" field is used when `kernel` is empty.
SymPolytope polytope_from_json(const nlohmann::json& j, std::optional<Kernel> kernel = std::nullopt,
                               std::optional<double> tol = std::nullopt);
SymPolytope load_polytope(const std::filesystem::path& path, std::optional<Kernel> kernel = std::nullopt,
                          std::optional<double> tol = std::nullopt);

/// Every vertex in label order, exact decimal/fraction strings in the
/// rational kernel and 17 significant digits otherwise. Reloading gives the
/// same labeled polytope.
nlohmann::json polytope_to_json(const SymPolytope& p);

std::string hex_sha256(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  Kernel kernel = Kernel::Rational;
  std::string version;
  std::optional<std::uint64_t> seed;
  std::string input_digest;
};

std::string_view tool_version();

nlohmann::json to_json(const RunManifest& m);
/// "# manifest {...}" on one line, placed before the CSV header.
std::string csv_manifest_line(const RunManifest& m);

nlohmann::json to_json(const Point3& v);
nlohmann::json to_json(const SpeedVector& s);
nlohmann::json to_json(const FaceLattice& lat);
nlohmann::json to_json(const VolumeProductReport& r);
nlohmann::json to_json(const DualityReport& r);
nlohmann::json to_json(const DimensionReport& r);
nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const MinimizerClassification& c);
nlohmann::json to_json(const DescentTrace& t);
nlohmann::json to_json(const CorpusSummary& s);

/// Census of a polytope: kernel, counts, volume, pairing and lattice.
nlohmann::json analyze_json(const SymPolytope& p);

/// {"dim", "bound", "nontrivial", "basis"} for the speeds command.
nlohmann::json speeds_json(const SpeedSpace& s, const DimensionReport& r);

/// Rows step, product, gap, move_side, theta, t; step 0 is the start.
std::string descent_csv(const DescentTrace& t);

}  // namespace mahler
