#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ftl/experiments.hpp"
#include "ftl/interpolation.hpp"
#include "ftl/planner.hpp"
#include "ftl/shape_library.hpp"

namespace ftl {

inline constexpr int kFormatVersion = 1;

std::string tool_version();

/// Resolved run parameters echoed into every artifact, in insertion order.
using ConfigValue = std::variant<bool, std::int64_t, std::uint64_t, double, std::string>;
using ConfigEcho = std::vector<std::pair<std::string, ConfigValue>>;

/// printf("%.17g"): enough digits to round-trip any double.
std::string format_double(double value);

/// Writes `content` to a sibling temporary file and renames it into place,
/// so readers never see a partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Library files: {format_version, model_spec, seed, bounds, D, shapes:[{q, points,
// tip_rotation}]}. Streamed out with 17 significant digits, so reading a file
// back reproduces every double bit for bit.
void write_library(const ShapeLibrary& lib, std::ostream& out);
void save_library(const ShapeLibrary& lib, const std::filesystem::path& path);
/// Throws InputError for malformed content.
ShapeLibrary read_library(std::istream& in);
/// Throws IoError when the file cannot be opened, InputError when malformed.
ShapeLibrary load_library(const std::filesystem::path& path);

// Cluster sidecar: {format_version, gamma, library_size, clusters:[{center, members}]}.
std::string clusters_to_json(const ClusteredLibrary& clusters);
void save_clusters(const ClusteredLibrary& clusters, const std::filesystem::path& path);
/// Checks that the clusters partition `lib`. Throws InputError.
ClusteredLibrary load_clusters(const std::filesystem::path& path, LibraryPtr lib);

// Path files: {format_version, waypoints:[[x, y, z], ...]}.
std::string path_to_json(const WaypointPath& path);
void save_path(const WaypointPath& path, const std::filesystem::path& file);
/// Throws InputError for malformed content or invalid waypoints.
WaypointPath parse_path_json(const std::string& text);
WaypointPath load_path(const std::filesystem::path& file);

struct PlanRecord {
  std::string method;
  std::optional<SparsePlan> sparse;
  DensePlan dense;
  Metrics metrics;
  ConfigEcho config;
};

/// Plan file: config echo, tool version, metrics, waypoints, sparse and dense
/// sections.
std::string plan_to_json(const PlanRecord& record, const WaypointPath& path);

}  // namespace ftl
