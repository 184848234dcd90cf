#include "ftl/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ftl/errors.hpp"

#ifndef FTL_VERSION
#define FTL_VERSION "0.0.0"
#endif

namespace ftl {

using nlohmann::json;

std::string tool_version() { return FTL_VERSION; }

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void write_vec(std::ostream& out, const double* v, int n) {
  out << '[';
  for (int k = 0; k < n; ++k) {
    if (k) out << ',';
    out << format_double(v[k]);
  }
  out << ']';
}

json vec_json(const double* v, int n) {
  json a = json::array();
  for (int k = 0; k < n; ++k) a.push_back(v[k]);
  return a;
}

json rotation_json(const Rotation& r) {
  json a = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a.push_back(r(i, j));
  }
  return a;
}

json pose_json(const Pose& p) {
  return json{{"rotation", rotation_json(p.rotation)},
              {"translation", vec_json(p.translation.data(), 3)}};
}

template <int N>
Eigen::Matrix<double, N, 1> read_fixed(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw InputError(std::string(what) + ": expected " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int k = 0; k < N; ++k) {
    if (!j[k].is_number()) throw InputError(std::string(what) + ": expected numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

Shape shape_from_json(const json& j, int d) {
  if (!j.is_object()) throw InputError("library shape must be an object");
  const Configuration q = read_fixed<6>(j.at("q"), "q");
  const json& pts = j.at("points");
  if (!pts.is_array() || pts.size() != static_cast<std::size_t>(d + 1)) {
    throw InputError("library shape must have D + 1 points");
  }
  std::vector<Vec3> points;
  points.reserve(pts.size());
  for (const auto& p : pts) {
    const Vec3 v = read_fixed<3>(p, "point");
    if (!v.allFinite()) throw InputError("library point is not finite");
    points.push_back(v);
  }
  const auto r = read_fixed<9>(j.at("tip_rotation"), "tip_rotation");
  Rotation rot;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) rot(i, k) = r[3 * i + k];
  }
  return Shape(q, std::move(points), rot);
}

}  // namespace

void write_library(const ShapeLibrary& lib, std::ostream& out) {
  const ModelSpec& s = lib.spec;
  out << "{\"format_version\":" << kFormatVersion << ",\"model_spec\":{\"segment_count\":"
      << s.segment_count << ",\"segment_length\":" << format_double(s.segment_length)
      << ",\"intervals\":" << s.intervals << ",\"kappa_max\":" << format_double(s.kappa_max)
      << ",\"symmetry\":\"" << s.symmetry.to_string() << "\"},\"seed\":" << lib.seed
      << ",\"bounds\":{\"lo\":";
  write_vec(out, lib.bounds.lo.data(), kConfigDim);
  out << ",\"hi\":";
  write_vec(out, lib.bounds.hi.data(), kConfigDim);
  out << "},\"D\":" << s.intervals << ",\"shapes\":[";
  for (std::size_t i = 0; i < lib.shapes.size(); ++i) {
    const Shape& sh = lib.shapes[i];
    out << (i ? ",\n" : "\n") << "{\"q\":";
    write_vec(out, sh.config().data(), kConfigDim);
    out << ",\"points\":[";
    for (std::size_t k = 0; k < sh.points().size(); ++k) {
      if (k) out << ',';
      write_vec(out, sh.points()[k].data(), 3);
    }
    out << "],\"tip_rotation\":";
    const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> rm = sh.tip_rotation();
    write_vec(out, rm.data(), 9);
    out << '}';
  }
  out << "\n]}\n";
}

void save_library(const ShapeLibrary& lib, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_library(lib, ss);
  write_file_atomic(path, ss.str());
}

ShapeLibrary read_library(std::istream& in) {
  ShapeLibrary lib;
  std::vector<Shape> shapes;
  std::string key_at_depth1;
  int d = -1;
  try {
    // Shapes are converted as soon as they are parsed and then dropped from
    // the DOM; a full DOM of a large library would need several GB.
    json root = json::parse(in, [&](int depth, json::parse_event_t event, json& parsed) {
      if (event == json::parse_event_t::key && depth == 1) {
        key_at_depth1 = parsed.get<std::string>();
      } else if (event == json::parse_event_t::value && depth == 1 && key_at_depth1 == "D") {
        d = parsed.get<int>();
      } else if (event == json::parse_event_t::object_end && depth == 2 &&
                 key_at_depth1 == "shapes") {
        if (d < 1) throw InputError("library header must precede shapes and have D >= 1");
        shapes.push_back(shape_from_json(parsed, d));
        return false;
      }
      return true;
    });
    if (!root.is_object()) throw InputError("library file must be a JSON object");
    if (root.at("format_version").get<int>() != kFormatVersion) {
      throw InputError("unsupported library format_version");
    }
    const json& ms = root.at("model_spec");
    lib.spec.segment_count = ms.at("segment_count").get<int>();
    lib.spec.segment_length = ms.at("segment_length").get<double>();
    lib.spec.intervals = ms.at("intervals").get<int>();
    lib.spec.kappa_max = ms.at("kappa_max").get<double>();
    lib.spec.symmetry = SymmetryDescriptor::parse(ms.at("symmetry").get<std::string>());
    lib.spec.validate();
    lib.seed = root.at("seed").get<std::uint64_t>();
    lib.bounds.lo = read_fixed<6>(root.at("bounds").at("lo"), "bounds.lo");
    lib.bounds.hi = read_fixed<6>(root.at("bounds").at("hi"), "bounds.hi");
    if (root.at("D").get<int>() != lib.spec.intervals) {
      throw InputError("library D disagrees with model_spec.intervals");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed library file: ") + e.what());
  } catch (const PreconditionError& e) {
    throw InputError(std::string("invalid library header: ") + e.what());
  }
  lib.shapes = std::move(shapes);
  return lib;
}

ShapeLibrary load_library(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open library '" + path.string() + "'");
  return read_library(in);
}

std::string clusters_to_json(const ClusteredLibrary& clusters) {
  json j;
  j["format_version"] = kFormatVersion;
  j["gamma"] = clusters.gamma;
  j["library_size"] = clusters.base ? clusters.base->size() : 0;
  json arr = json::array();
  for (const auto& c : clusters.clusters) arr.push_back({{"center", c.center}, {"members", c.members}});
  j["clusters"] = std::move(arr);
  return j.dump() + "\n";
}

void save_clusters(const ClusteredLibrary& clusters, const std::filesystem::path& path) {
  write_file_atomic(path, clusters_to_json(clusters));
}

ClusteredLibrary load_clusters(const std::filesystem::path& path, LibraryPtr lib) {
  if (!lib) throw PreconditionError("load_clusters: library required");
  ClusteredLibrary out;
  out.base = lib;
  try {
    const json j = json::parse(read_file(path));
    out.gamma = j.at("gamma").get<double>();
    for (const auto& c : j.at("clusters")) {
      Cluster cl;
      cl.center = c.at("center").get<std::size_t>();
      cl.members = c.at("members").get<std::vector<std::size_t>>();
      out.clusters.push_back(std::move(cl));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed cluster file: ") + e.what());
  }
  std::vector<char> seen(lib->size(), 0);
  for (const auto& c : out.clusters) {
    bool has_center = false;
    for (std::size_t m : c.members) {
      if (m >= lib->size() || seen[m]) throw InputError("cluster file does not partition the library");
      seen[m] = 1;
      has_center = has_center || m == c.center;
    }
    if (!has_center) throw InputError("cluster center missing from its members");
  }
  for (char s : seen) {
    if (!s) throw InputError("cluster file does not cover the library");
  }
  return out;
}

std::string path_to_json(const WaypointPath& path) {
  json wp = json::array();
  for (const auto& w : path.waypoints()) wp.push_back(vec_json(w.data(), 3));
  return json{{"format_version", kFormatVersion}, {"waypoints", wp}}.dump() + "\n";
}

void save_path(const WaypointPath& path, const std::filesystem::path& file) {
  write_file_atomic(file, path_to_json(path));
}

WaypointPath parse_path_json(const std::string& text) {
  std::vector<Vec3> pts;
  try {
    const json j = json::parse(text);
    const json& wp = j.is_array() ? j : j.at("waypoints");
    if (!wp.is_array()) throw InputError("waypoints must be an array");
    for (const auto& w : wp) pts.push_back(read_fixed<3>(w, "waypoint"));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed path file: ") + e.what());
  }
  return WaypointPath(std::move(pts));
}

WaypointPath load_path(const std::filesystem::path& file) { return parse_path_json(read_file(file)); }

namespace {

json config_json(const ConfigEcho& config) {
  json j = json::object();
  for (const auto& [key, value] : config) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j;
}

}  // namespace

std::string plan_to_json(const PlanRecord& record, const WaypointPath& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["tool_version"] = tool_version();
  j["method"] = record.method;
  j["config"] = config_json(record.config);
  j["metrics"] = {{"tip_dev_pct", record.metrics.tip_dev_pct},
                  {"shape_dev_pct", record.metrics.shape_dev_pct},
                  {"compute_time_s", record.metrics.compute_time_s},
                  {"max_tip_error", record.metrics.max_tip_error}};
  json wp = json::array();
  for (const auto& w : path.waypoints()) wp.push_back(vec_json(w.data(), 3));
  j["waypoints"] = std::move(wp);
  if (record.sparse) {
    json sparse = json::array();
    for (const auto& e : record.sparse->entries) {
      sparse.push_back({{"config", vec_json(e.config.data(), kConfigDim)},
                        {"base_pose", pose_json(e.base_pose)},
                        {"tip_pose", pose_json(e.tip_world())},
                        {"m_star", e.m_star},
                        {"deviation", e.deviation},
                        {"library_index", e.library_index},
                        {"searched", e.searched}});
    }
    j["sparse"] = {{"evaluations", record.sparse->evaluations}, {"entries", std::move(sparse)}};
  }
  json steps = json::array();
  for (const auto& s : record.dense.steps) {
    steps.push_back({{"interval", s.interval},
                     {"alpha", s.alpha},
                     {"config", vec_json(s.config.data(), kConfigDim)},
                     {"base_pose", pose_json(s.base_pose)},
                     {"desired_tip", pose_json(s.desired_tip)}});
  }
  j["dense"] = {{"h", record.dense.h}, {"steps", std::move(steps)}};
  return j.dump(1) + "\n";
}

}  // namespace ftl
