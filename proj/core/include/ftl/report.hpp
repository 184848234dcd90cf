#pragma once

#include <string>

#include "ftl/experiments.hpp"
#include "ftl/serialization.hpp"

namespace ftl {

inline constexpr int kReportSchemaVersion = 1;

/// Per-path rows: schema_version,class,seed,method,tip_dev_pct,shape_dev_pct,
/// sparse_dev_pct,time_s,evaluations.
std::string benchmark_csv(const BenchmarkResult& result);
/// Per-class, per-method aggregates (per-path means and pooled step means) plus the
/// config echo.
std::string benchmark_json(const BenchmarkResult& result, const ConfigEcho& config);
/// Human-readable class x method table.
std::string benchmark_table(const BenchmarkResult& result);

std::string cluster_sweep_csv(const ClusterSweepResult& result);
std::string cluster_sweep_json(const ClusterSweepResult& result, const ConfigEcho& config);

std::string libsize_csv(const LibSizeResult& result);
std::string libsize_json(const LibSizeResult& result, const ConfigEcho& config);

/// Class rows (C, S, Robot, Overall) by symmetry-variant columns.
std::string symmetry_csv(const SymmetryAblationResult& result);
std::string symmetry_json(const SymmetryAblationResult& result, const ConfigEcho& config);

}  // namespace ftl
