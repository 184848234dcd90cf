#include "ftl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ftl/errors.hpp"
#include "ftl/parallel.hpp"

namespace ftl {

WaypointPath::WaypointPath(std::vector<Vec3> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.empty()) throw InputError("waypoint path is empty");
  cumulative_.assign(waypoints_.size(), 0.0);
  for (std::size_t k = 0; k < waypoints_.size(); ++k) {
    if (!waypoints_[k].allFinite()) throw InputError("waypoint has non-finite coordinates");
    if (k == 0) continue;
    const double step = (waypoints_[k] - waypoints_[k - 1]).norm();
    if (!(step > 0.0)) throw InputError("consecutive waypoints must be distinct");
    cumulative_[k] = cumulative_[k - 1] + step;
  }
}

int active_subset(const Shape& shape, double target_arclen) {
  const auto& pts = shape.points();
  const int d = shape.intervals();
  if (d < 1) return 0;
  // Suffix lengths summed from the tip, exactly as sum_{j=m}^{D-1} |p_j - p_{j+1}|.
  double suffix = 0.0;
  int best = d - 1;
  double best_gap = std::numeric_limits<double>::infinity();
  const double tie = 1e-12 * std::max(1.0, shape.length());
  for (int m = d - 1; m >= 0; --m) {
    suffix += (pts[m] - pts[m + 1]).norm();
    const double gap = std::abs(target_arclen - suffix);
    // Walking towards smaller m, so "<=" (within tie tolerance) prefers it.
    if (gap <= best_gap + tie) {
      best_gap = std::min(gap, best_gap);
      best = m;
    }
  }
  return best;
}

namespace {

struct PoseSolution {
  Pose pose;
  bool t3_skipped = false;
};

// Point at arc-length fraction `r` of the subset p_m..p_D, linearly
// interpolated along the polyline.
Vec3 point_at_fraction(const Shape& shape, int m_star, double r) {
  const auto& s = shape.arclen();
  const auto& pts = shape.points();
  const int d = shape.intervals();
  const double target = s[m_star] + r * (s[d] - s[m_star]);
  const auto it = std::upper_bound(s.begin() + m_star, s.end(), target);
  if (it == s.end()) return pts[d];
  const int hi = static_cast<int>(it - s.begin());
  const int lo = std::max(m_star, hi - 1);
  const double span = s[hi] - s[lo];
  const double u = span > 0.0 ? (target - s[lo]) / span : 0.0;
  return pts[lo] + u * (pts[hi] - pts[lo]);
}

PoseSolution solve_base_pose(const Shape& shape, int m_star, std::span<const Vec3> wp,
                             std::span<const double> cum) {
  PoseSolution out;
  const Vec3& wi = wp.back();
  const Vec3& w1 = wp.front();
  const double path_len = cum.back();
  const double eps = 1e-9 * path_len;

  // T1: tip onto the waypoint.
  const Vec3 t1 = wi - shape.tip();

  // T2: rotate about w_i so the active chord points along the path chord.
  Rotation r2 = Rotation::Identity();
  const Vec3 chord = wi - w1;
  const double chord_len = chord.norm();
  if (chord_len <= eps || wp.size() < 2) {
    out.t3_skipped = true;
    out.pose.rotation = Rotation::Identity();
    out.pose.translation = t1;
    return out;
  }
  const Vec3 v1 = chord / chord_len;
  const Vec3 d2 = wi - (shape.points()[m_star] + t1);
  const double d2_len = d2.norm();
  if (d2_len > 0.0) r2 = align_vectors(d2 / d2_len, v1);

  // T3: roll about the path chord through w_1 and w_i.
  Rotation r3 = Rotation::Identity();
  std::size_t far = 0;
  double far_dist = -1.0;
  for (std::size_t k = 0; k < wp.size(); ++k) {
    const Vec3 rel = wp[k] - w1;
    const double dist = (rel - rel.dot(v1) * v1).norm();
    if (dist > far_dist) {
      far_dist = dist;
      far = k;
    }
  }
  if (far_dist < eps) {
    out.t3_skipped = true;
  } else {
    const double r = cum[far] / path_len;
    const Vec3 pk = r2 * (point_at_fraction(shape, m_star, r) + t1 - wi) + wi;
    try {
      const double phi = signed_angle_about_axis(pk - w1, wp[far] - w1, v1, eps);
      r3 = rotation_from_axis_angle(v1, phi);
    } catch (const DegenerateProjection&) {
      out.t3_skipped = true;
    }
  }

  out.pose.rotation = r3 * r2;
  out.pose.translation = wi - out.pose.rotation * shape.tip();
  return out;
}

double polyline_length(std::span<const Vec3> pts) {
  double len = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) len += (pts[k] - pts[k - 1]).norm();
  return len;
}

}  // namespace

Alignment align_base_pose(const Shape& shape, int m_star, const WaypointPath& path,
                          std::size_t count) {
  if (count < 1 || count > path.size()) throw PreconditionError("align_base_pose: bad prefix");
  if (m_star < 0 || m_star >= shape.intervals()) {
    throw PreconditionError("align_base_pose: active subset needs >= 2 points");
  }
  const auto cum = std::span<const double>(path.cumulative_arclen()).first(count);
  const PoseSolution sol = solve_base_pose(shape, m_star, path.prefix(count), cum);
  Alignment out;
  out.base_pose = sol.pose;
  out.t3_skipped = sol.t3_skipped;
  out.aligned_points = apply_pose(sol.pose, shape.points());
  return out;
}

double shape_deviation(std::span<const Vec3> a, std::span<const Vec3> b,
                       ChamferNormalization normalization) {
  if (a.empty() || b.empty()) throw PreconditionError("shape_deviation: empty point set");
  thread_local std::vector<double> best_b;
  best_b.assign(b.size(), std::numeric_limits<double>::infinity());
  double sum_a = 0.0;
  for (const auto& pa : a) {
    double best_a = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double d2 = (pa - b[k]).squaredNorm();
      best_a = std::min(best_a, d2);
      best_b[k] = std::min(best_b[k], d2);
    }
    sum_a += std::sqrt(best_a);
  }
  double sum_b = 0.0;
  for (double d2 : best_b) sum_b += std::sqrt(d2);

  if (normalization == ChamferNormalization::arc_length) {
    const double la = polyline_length(a);
    const double lb = polyline_length(b);
    return (la > 0.0 ? sum_a / la : 0.0) + (lb > 0.0 ? sum_b / lb : 0.0);
  }
  return sum_a / static_cast<double>(a.size()) + sum_b / static_cast<double>(b.size());
}

AlignedCandidate evaluate_candidate(const Shape& shape, std::size_t library_index,
                                    const WaypointPath& path, std::size_t count,
                                    const PlannerOptions& options) {
  const auto wp = path.prefix(count);
  const auto cum = std::span<const double>(path.cumulative_arclen()).first(count);

  AlignedCandidate c;
  c.library_index = library_index;
  c.m_star = active_subset(shape, cum.back());
  const PoseSolution sol = solve_base_pose(shape, c.m_star, wp, cum);
  c.base_pose = sol.pose;
  c.t3_skipped = sol.t3_skipped;

  thread_local std::vector<Vec3> active;
  const auto& pts = shape.points();
  active.clear();
  for (std::size_t j = static_cast<std::size_t>(c.m_star); j < pts.size(); ++j) {
    active.push_back(sol.pose.apply(pts[j]));
  }
  c.deviation = shape_deviation(wp, active, options.normalization);
  if (options.extra_cost) c.deviation += options.extra_cost(active, wp, sol.pose);
  return c;
}

namespace {

bool better(double score, std::size_t index, double best_score, std::size_t best_index) {
  return score < best_score || (score == best_score && index < best_index);
}

}  // namespace

WaypointSearch search_waypoint(const ShapeLibrary& lib, const ClusteredLibrary* clusters,
                               const WaypointPath& path, std::size_t count,
                               const PlannerOptions& options) {
  if (lib.empty()) throw EmptyLibrary("search_waypoint: empty library");
  if (count < 3 || count > path.size()) {
    throw InputError("search_waypoint: needs at least three active waypoints");
  }

  WaypointSearch out;
  if (options.mode == SearchMode::clustered) {
    if (clusters == nullptr) throw PreconditionError("clustered search without clusters");
    const SearchResult r = two_pass_search(*clusters, [&](std::size_t idx) {
      return evaluate_candidate(lib.shapes[idx], idx, path, count, options).deviation;
    });
    out.best = evaluate_candidate(lib.shapes[r.index], r.index, path, count, options);
    out.evaluations = r.evaluations;
    return out;
  }

  const unsigned threads = resolve_threads(options.threads);
  const std::size_t chunks = chunk_count(lib.size(), threads);
  std::vector<std::size_t> best_idx(chunks, 0);
  std::vector<double> best_score(chunks, std::numeric_limits<double>::infinity());
  parallel_chunks(lib.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t c) {
    for (std::size_t i = begin; i < end; ++i) {
      const double s = evaluate_candidate(lib.shapes[i], i, path, count, options).deviation;
      if (better(s, i, best_score[c], best_idx[c])) {
        best_score[c] = s;
        best_idx[c] = i;
      }
    }
  });
  std::size_t winner = best_idx[0];
  double winner_score = best_score[0];
  for (std::size_t c = 1; c < chunks; ++c) {
    if (better(best_score[c], best_idx[c], winner_score, winner)) {
      winner = best_idx[c];
      winner_score = best_score[c];
    }
  }
  out.best = evaluate_candidate(lib.shapes[winner], winner, path, count, options);
  out.evaluations = lib.size();
  return out;
}

double SparsePlan::mean_searched_deviation() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (!e.searched) continue;
    sum += e.deviation;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

SparsePlan plan_sparse(const ShapeLibrary& lib, const ClusteredLibrary* clusters,
                       const WaypointPath& path, const PlannerOptions& options) {
  const std::size_t n = path.size();
  if (n < 3) throw InputError("planning needs at least three non-collinear active waypoints");
  if (lib.empty()) throw EmptyLibrary("plan_sparse: empty library");
  if (static_cast<std::size_t>(lib.shapes.front().intervals()) <= n) {
    throw InputError("backbone resolution D must exceed the waypoint count");
  }

  SparsePlan plan;
  plan.entries.resize(n);
  for (std::size_t count = 3; count <= n; ++count) {
    const WaypointSearch s = search_waypoint(lib, clusters, path, count, options);
    const Shape& shape = lib.shapes[s.best.library_index];
    SparseEntry& e = plan.entries[count - 1];
    e.config = shape.config();
    e.base_pose = s.best.base_pose;
    e.m_star = s.best.m_star;
    e.deviation = s.best.deviation;
    e.library_index = s.best.library_index;
    e.tip_local = shape.tip_pose();
    e.searched = true;
    plan.evaluations += s.evaluations;
  }

  // Waypoints 1 and 2 reuse the w_3 shape and orientation, translated so the
  // tip sits on the waypoint.
  const SparseEntry& third = plan.entries[2];
  const Shape& shape = lib.shapes[third.library_index];
  for (std::size_t count = 1; count <= 2; ++count) {
    SparseEntry& e = plan.entries[count - 1];
    e = third;
    e.searched = false;
    e.base_pose.translation = path[count - 1] - third.base_pose.rotation * shape.tip();
    e.m_star = count == 1 ? shape.intervals()
                          : active_subset(shape, path.cumulative_arclen()[count - 1]);
    std::vector<Vec3> active;
    for (std::size_t j = static_cast<std::size_t>(e.m_star); j < shape.points().size(); ++j) {
      active.push_back(e.base_pose.apply(shape.points()[j]));
    }
    e.deviation = shape_deviation(path.prefix(count), active, options.normalization);
  }
  return plan;
}

}  // namespace ftl
