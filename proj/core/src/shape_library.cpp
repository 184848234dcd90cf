#include "ftl/shape_library.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ftl/errors.hpp"
#include "ftl/random.hpp"

namespace ftl {

ShapeLibrary generate_library(const ModelSpec& spec, const Bounds& bounds, std::size_t count,
                              std::uint64_t seed) {
  const PccModel model(spec);
  return generate_library(model, spec, bounds, count, seed);
}

ShapeLibrary generate_library(const ForwardModel& model, const ModelSpec& spec,
                              const Bounds& bounds, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw PreconditionError("library size must be >= 1");
  if (bounds.empty()) throw PreconditionError("sampling bounds are empty");

  ShapeLibrary lib;
  lib.spec = spec;
  lib.seed = seed;
  lib.bounds = bounds;
  lib.shapes.reserve(count);

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    Configuration q;
    for (int k = 0; k < kConfigDim; ++k) {
      q[k] = bounds.lo[k] + (bounds.hi[k] - bounds.lo[k]) * unit_uniform(rng);
    }
    lib.shapes.push_back(model.shape(q));
  }
  return lib;
}

double shape_similarity(const Shape& a, const Shape& b) {
  if (a.points().size() != b.points().size()) {
    throw DimensionError("shape_similarity: shapes have different D");
  }
  // Summed tip-first, matching shape_similarity_bounded bit-for-bit.
  double sum = 0.0;
  for (std::size_t j = a.points().size(); j-- > 0;) {
    sum += (a.points()[j] - b.points()[j]).norm();
  }
  return sum;
}

double shape_similarity_bounded(const Shape& a, const Shape& b, double limit) {
  if (a.points().size() != b.points().size()) {
    throw DimensionError("shape_similarity: shapes have different D");
  }
  double sum = 0.0;
  // Walk from the tip: distal points differ most, so the bound trips early.
  for (std::size_t j = a.points().size(); j-- > 0;) {
    sum += (a.points()[j] - b.points()[j]).norm();
    if (sum > limit) return sum;
  }
  return sum;
}

std::size_t ClusteredLibrary::max_cluster_size() const {
  std::size_t m = 0;
  for (const auto& c : clusters) m = std::max(m, c.members.size());
  return m;
}

double ClusteredLibrary::mean_cluster_size() const {
  if (clusters.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.members.size();
  return static_cast<double>(total) / static_cast<double>(clusters.size());
}

namespace {

// Shared greedy pass; stops once more than `max_clusters` centers exist.
template <class OnCluster>
std::size_t greedy_pass(const ShapeLibrary& lib, double gamma, std::size_t max_clusters,
                        OnCluster&& on_cluster) {
  std::vector<std::size_t> ungrouped(lib.size());
  for (std::size_t i = 0; i < ungrouped.size(); ++i) ungrouped[i] = i;

  std::size_t clusters = 0;
  std::vector<std::size_t> rest;
  while (!ungrouped.empty()) {
    if (clusters == max_clusters) return max_clusters + 1;
    const std::size_t center = ungrouped.front();
    Cluster cluster;
    cluster.center = center;
    cluster.members.push_back(center);
    rest.clear();
    for (std::size_t k = 1; k < ungrouped.size(); ++k) {
      const std::size_t idx = ungrouped[k];
      if (shape_similarity_bounded(lib.shapes[center], lib.shapes[idx], gamma) <= gamma) {
        cluster.members.push_back(idx);
      } else {
        rest.push_back(idx);
      }
    }
    ungrouped.swap(rest);
    ++clusters;
    on_cluster(std::move(cluster));
  }
  return clusters;
}

}  // namespace

ClusteredLibrary threshold_cluster(LibraryPtr lib, double gamma) {
  if (!lib) throw PreconditionError("threshold_cluster: null library");
  if (!(gamma >= 0.0)) throw PreconditionError("threshold_cluster: gamma must be >= 0");
  ClusteredLibrary out;
  out.gamma = gamma;
  greedy_pass(*lib, gamma, std::numeric_limits<std::size_t>::max(),
              [&](Cluster&& c) { out.clusters.push_back(std::move(c)); });
  out.base = std::move(lib);
  return out;
}

std::size_t count_clusters(const ShapeLibrary& lib, double gamma, std::size_t max_clusters) {
  return greedy_pass(lib, gamma, max_clusters, [](Cluster&&) {});
}

std::size_t default_cluster_target(std::size_t library_size) {
  return static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(library_size)) * 1.5));
}

ThresholdSuggestion suggest_threshold_detail(const ShapeLibrary& lib, std::size_t target) {
  if (lib.empty()) throw EmptyLibrary("suggest_threshold: empty library");
  if (target < 1 || target > lib.size()) {
    throw PreconditionError("suggest_threshold: target must be in [1, N_lib]");
  }
  const double t = static_cast<double>(target);
  const auto within = [&](std::size_t c) {
    return static_cast<double>(c) >= 0.8 * t && static_cast<double>(c) <= 1.2 * t;
  };
  const std::size_t cap = static_cast<std::size_t>(std::floor(1.2 * t)) + 1;

  ThresholdSuggestion best;
  double best_gap = std::numeric_limits<double>::infinity();
  const auto consider = [&](double gamma, std::size_t c) {
    const double gap = std::abs(static_cast<double>(c) - t);
    if (gap < best_gap) {
      best_gap = gap;
      best = {gamma, c, within(c)};
    }
  };

  const std::size_t at_zero = count_clusters(lib, 0.0, cap);
  consider(0.0, at_zero);
  if (within(at_zero)) return best;

  // Triangle inequality: every pairwise similarity is at most twice the
  // largest similarity to shape 0, so `hi` yields a single cluster.
  double radius = 0.0;
  for (const auto& s : lib.shapes) radius = std::max(radius, shape_similarity(lib.shapes[0], s));
  double hi = 2.0 * radius * (1.0 + 1e-12) + 1e-12;
  consider(hi, 1);
  if (within(1)) return best;

  double lo = 0.0;
  const double resolution = 1e-6 * hi;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    const std::size_t c = count_clusters(lib, mid, cap);
    consider(mid, c);
    if (within(c)) return best;
    if (c > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

double suggest_threshold(const ShapeLibrary& lib, std::size_t target_clusters) {
  return suggest_threshold_detail(lib, target_clusters).gamma;
}

}  // namespace ftl
