#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "ftl/forward_model.hpp"

namespace ftl {

/// Offline sample of the reachable shape space. Immutable once built.
struct ShapeLibrary {
  ModelSpec spec;
  std::uint64_t seed = 0;
  Bounds bounds;
  std::vector<Shape> shapes;

  std::size_t size() const { return shapes.size(); }
  bool empty() const { return shapes.empty(); }
};

using LibraryPtr = std::shared_ptr<const ShapeLibrary>;

/// Samples `count` configurations i.i.d. uniform over `bounds` and evaluates
/// the PCC model on each. The first k shapes of a library equal the library
/// of size k built with the same seed.
ShapeLibrary generate_library(const ModelSpec& spec, const Bounds& bounds, std::size_t count,
                              std::uint64_t seed);

/// Same sampling, arbitrary forward model; `spec` is recorded for the file
/// header only.
ShapeLibrary generate_library(const ForwardModel& model, const ModelSpec& spec,
                              const Bounds& bounds, std::size_t count, std::uint64_t seed);

/// Sum of point-wise distances between two backbones with equal D.
double shape_similarity(const Shape& a, const Shape& b);

/// As shape_similarity, but stops summing once the partial sum exceeds
/// `limit`; the returned value is then only known to be > limit.
double shape_similarity_bounded(const Shape& a, const Shape& b, double limit);

struct Cluster {
  std::size_t center = 0;
  std::vector<std::size_t> members;  // includes center, ascending
};

/// Greedy threshold clustering of a library.
struct ClusteredLibrary {
  LibraryPtr base;
  double gamma = 0.0;
  std::vector<Cluster> clusters;

  std::size_t cluster_count() const { return clusters.size(); }
  std::size_t max_cluster_size() const;
  double mean_cluster_size() const;
};

/// Walks shapes in index order; every still-ungrouped shape becomes a center
/// and absorbs all ungrouped shapes within `gamma` of it.
ClusteredLibrary threshold_cluster(LibraryPtr lib, double gamma);

/// Cluster count that threshold_cluster would produce, giving up (and
/// returning max_clusters + 1) once the count exceeds max_clusters.
std::size_t count_clusters(const ShapeLibrary& lib, double gamma,
                           std::size_t max_clusters = std::numeric_limits<std::size_t>::max());

/// Default cluster target floor(1.5 * sqrt(N_lib)).
std::size_t default_cluster_target(std::size_t library_size);

struct ThresholdSuggestion {
  double gamma = 0.0;
  std::size_t clusters = 0;
  bool within_tolerance = false;
};

/// Bisects gamma so that threshold clustering yields target +/- 20% clusters.
ThresholdSuggestion suggest_threshold_detail(const ShapeLibrary& lib, std::size_t target_clusters);
double suggest_threshold(const ShapeLibrary& lib, std::size_t target_clusters);

struct SearchResult {
  std::size_t index = 0;
  double score = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::size_t cluster = 0;
};

/// Scores every cluster center, then every member of the best cluster. Ties
/// go to the lower cluster (and lower member) index.
template <class Score>
SearchResult two_pass_search(const ClusteredLibrary& clib, Score&& score) {
  SearchResult out;
  if (clib.clusters.empty()) return out;
  double best_center = std::numeric_limits<double>::infinity();
  std::size_t best_cluster = 0;
  for (std::size_t c = 0; c < clib.clusters.size(); ++c) {
    const double s = score(clib.clusters[c].center);
    ++out.evaluations;
    if (s < best_center) {
      best_center = s;
      best_cluster = c;
    }
  }
  out.cluster = best_cluster;
  out.index = clib.clusters[best_cluster].center;
  for (std::size_t m : clib.clusters[best_cluster].members) {
    const double s = score(m);
    ++out.evaluations;
    if (s < out.score) {
      out.score = s;
      out.index = m;
    }
  }
  return out;
}

}  // namespace ftl
