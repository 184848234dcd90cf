#include "ftl/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace ftl {

using nlohmann::json;

namespace {

json config_json(const ConfigEcho& config) {
  json j = json::object();
  for (const auto& [key, value] : config) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j;
}

json header(const std::string& study, const ConfigEcho& config) {
  return json{{"schema_version", kReportSchemaVersion},
              {"study", study},
              {"tool_version", tool_version()},
              {"config", config_json(config)}};
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::string benchmark_csv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "schema_version,class,seed,method,tip_dev_pct,shape_dev_pct,sparse_dev_pct,time_s,"
         "evaluations\n";
  for (const auto& r : result.rows) {
    out << kReportSchemaVersion << ',' << to_string(r.cls) << ',' << r.seed << ','
        << to_string(r.method) << ',' << fmt(r.tip_dev_pct) << ',' << fmt(r.shape_dev_pct) << ','
        << fmt(r.sparse_dev_pct) << ',' << fmt(r.time_s) << ',' << r.evaluations << '\n';
  }
  return out.str();
}

std::string benchmark_json(const BenchmarkResult& result, const ConfigEcho& config) {
  json j = header("benchmark", config);
  j["gamma"] = result.gamma;
  j["clusters"] = result.clusters;
  json agg = json::array();
  for (const auto& a : result.aggregates) {
    agg.push_back({{"class", to_string(a.cls)},
                   {"method", to_string(a.method)},
                   {"paths", a.paths},
                   {"tip_dev_pct", a.tip_dev_pct},
                   {"shape_dev_pct", a.shape_dev_pct},
                   {"pooled_shape_dev_pct", a.pooled_shape_dev_pct},
                   {"time_s", a.time_s},
                   {"max_tip_error", a.max_tip_error}});
  }
  j["aggregates"] = std::move(agg);
  j["rows"] = result.rows.size();
  return j.dump(1) + "\n";
}

std::string benchmark_table(const BenchmarkResult& result) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-7s %-13s %12s %14s %12s\n", "class", "method",
                "tip dev (%)", "shape dev (%)", "time (s)");
  out << line;
  for (const auto& a : result.aggregates) {
    std::snprintf(line, sizeof line, "%-7s %-13s %12.2f %14.2f %12.4f\n", to_string(a.cls).c_str(),
                  to_string(a.method).c_str(), a.tip_dev_pct, a.shape_dev_pct, a.time_s);
    out << line;
  }
  return out.str();
}

std::string cluster_sweep_csv(const ClusterSweepResult& result) {
  std::ostringstream out;
  out << "schema_version,gamma,clusters,mean_cluster_size,mean_sparse_dev_pct,std_sparse_dev_pct,"
         "mean_time_s,mean_evaluations\n";
  for (const auto& p : result.points) {
    out << kReportSchemaVersion << ',' << fmt(p.gamma) << ',' << p.clusters << ','
        << fmt(p.mean_cluster_size) << ',' << fmt(p.mean_sparse_dev_pct) << ','
        << fmt(p.std_sparse_dev_pct) << ',' << fmt(p.mean_time_s) << ','
        << fmt(p.mean_evaluations) << '\n';
  }
  return out.str();
}

std::string cluster_sweep_json(const ClusterSweepResult& result, const ConfigEcho& config) {
  json j = header("cluster", config);
  j["linear_dev_pct"] = result.linear_dev_pct;
  json pts = json::array();
  for (const auto& p : result.points) {
    pts.push_back({{"gamma", p.gamma},
                   {"clusters", p.clusters},
                   {"mean_cluster_size", p.mean_cluster_size},
                   {"mean_sparse_dev_pct", p.mean_sparse_dev_pct},
                   {"std_sparse_dev_pct", p.std_sparse_dev_pct},
                   {"mean_time_s", p.mean_time_s},
                   {"mean_evaluations", p.mean_evaluations},
                   {"path_dev_pct", p.path_dev_pct}});
  }
  j["points"] = std::move(pts);
  return j.dump(1) + "\n";
}

std::string libsize_csv(const LibSizeResult& result) {
  std::ostringstream out;
  out << "schema_version,n_lib,gamma,clusters,linear_mean_dev_pct,clustered_mean_dev_pct,"
         "linear_time_s,clustered_time_s,linear_evaluations,clustered_evaluations\n";
  for (const auto& p : result.points) {
    double lin = 0.0;
    double clu = 0.0;
    for (double d : p.linear_dev_pct) lin += d;
    for (double d : p.clustered_dev_pct) clu += d;
    const double k = p.linear_dev_pct.empty() ? 1.0 : static_cast<double>(p.linear_dev_pct.size());
    out << kReportSchemaVersion << ',' << p.size << ',' << fmt(p.gamma) << ',' << p.clusters << ','
        << fmt(lin / k) << ',' << fmt(clu / k) << ',' << fmt(p.linear_time_s) << ','
        << fmt(p.clustered_time_s) << ',' << fmt(p.linear_evaluations) << ','
        << fmt(p.clustered_evaluations) << '\n';
  }
  return out.str();
}

std::string libsize_json(const LibSizeResult& result, const ConfigEcho& config) {
  json j = header("libsize", config);
  json classes = json::array();
  for (CurveClass c : result.path_class) classes.push_back(to_string(c));
  j["path_class"] = std::move(classes);
  j["path_seeds"] = result.path_seeds;
  json pts = json::array();
  for (const auto& p : result.points) {
    pts.push_back({{"n_lib", p.size},
                   {"gamma", p.gamma},
                   {"clusters", p.clusters},
                   {"linear_dev_pct", p.linear_dev_pct},
                   {"clustered_dev_pct", p.clustered_dev_pct},
                   {"linear_time_s", p.linear_time_s},
                   {"clustered_time_s", p.clustered_time_s},
                   {"linear_evaluations", p.linear_evaluations},
                   {"clustered_evaluations", p.clustered_evaluations}});
  }
  j["points"] = std::move(pts);
  j["linear_time_slope"] = result.linear_time_slope;
  j["clustered_time_slope"] = result.clustered_time_slope;
  return j.dump(1) + "\n";
}

std::string symmetry_csv(const SymmetryAblationResult& result) {
  std::ostringstream out;
  out << "schema_version,class";
  for (const auto& v : result.config.variants) out << ',' << v.to_string();
  out << '\n';
  const std::vector<std::string> names{"C", "S", "Robot", "Overall"};
  for (std::size_t r = 0; r < result.class_means.size(); ++r) {
    const std::string name =
        r + 1 == result.class_means.size() ? "Overall" : (r < 3 ? names[r] : "?");
    out << kReportSchemaVersion << ',' << name;
    for (double v : result.class_means[r]) out << ',' << fmt(v);
    out << '\n';
  }
  return out.str();
}

std::string symmetry_json(const SymmetryAblationResult& result, const ConfigEcho& config) {
  json j = header("symmetry", config);
  json variants = json::array();
  for (const auto& v : result.config.variants) variants.push_back(v.to_string());
  j["variants"] = std::move(variants);
  j["class_means"] = result.class_means;
  j["overall"] = result.overall;
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"class", to_string(r.cls)},
                    {"seed", r.seed},
                    {"sparse_dev_pct", r.sparse_dev_pct},
                    {"shape_dev_pct", r.shape_dev_pct}});
  }
  j["rows"] = std::move(rows);
  return j.dump(1) + "\n";
}

}  // namespace ftl
