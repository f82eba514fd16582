#pragma once

// k-means (k-means++ seeding, Lloyd iterations), elbow selection over the
// SSE curve, Ward agglomerative clustering via Lance-Williams updates, and
// per-cluster gender composition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "scriptaffect/corpus.hpp"
#include "scriptaffect/csv.hpp"
#include "scriptaffect/errors.hpp"
#include "scriptaffect/util.hpp"

namespace scriptaffect {

struct KMeansResult {
  std::vector<std::size_t> assignments;
  Matrix centroids;  // k x d
  double sse = 0.0;
  std::size_t iterations = 0;
  std::vector<double> sse_trace;  // SSE after each centroid update
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxLloydIterations = 300;

namespace detail {

inline void check_points(const Matrix& points, std::size_t k) {
  if (points.rows() == 0) throw DimensionError("no points");
  if (k < 1 || k > points.rows()) {
    throw DimensionError("k=" + std::to_string(k) + " outside [1, " + std::to_string(points.rows()) + "]");
  }
  require_finite(points, "clustering input");
}

// Nearest centroid; ties go to the lowest centroid index.
inline std::size_t nearest(std::span<const double> x, const Matrix& centroids, double* dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(x, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

inline Matrix kmeans_plus_plus(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  Matrix centroids(k, points.cols());
  std::size_t pick = rng.index(n);
  std::copy(points.row(pick).begin(), points.row(pick).end(), centroids.row(0).begin());
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), centroids.row(0));
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n;
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        cum += d2[i];
        if (cum > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      pick = rng.index(n);
    }
    std::copy(points.row(pick).begin(), points.row(pick).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points.row(i), centroids.row(c)));
  }
  return centroids;
}

inline double total_sse(const Matrix& points, const Matrix& centroids, std::span<const std::size_t> assign) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) s += squared_distance(points.row(i), centroids.row(assign[i]));
  return s;
}

}  // namespace detail

inline KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed) {
  detail::check_points(points, k);
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  Rng rng(seed);

  KMeansResult r;
  r.seed = seed;
  r.centroids = detail::kmeans_plus_plus(points, k, rng);
  r.assignments.resize(n);
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) r.assignments[i] = detail::nearest(points.row(i), r.centroids, &dist[i]);

  std::vector<std::size_t> counts(k);
  while (true) {
    // An empty cluster takes the point farthest from its centroid among
    // clusters that can spare one.
    std::fill(counts.begin(), counts.end(), 0);
    for (auto a : r.assignments) ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[r.assignments[i]] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      --counts[r.assignments[far]];
      r.assignments[far] = c;
      counts[c] = 1;
      dist[far] = 0.0;
    }

    Matrix next(k, dim);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = next.row(r.assignments[i]);
      const auto x = points.row(i);
      for (std::size_t j = 0; j < dim; ++j) row[j] += x[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (double& v : next.row(c)) v /= static_cast<double>(counts[c]);
    }
    r.centroids = std::move(next);
    ++r.iterations;

    const double sse = detail::total_sse(points, r.centroids, r.assignments);
    if (!r.sse_trace.empty() && sse > r.sse_trace.back() * (1.0 + 1e-12) + 1e-12) {
      throw std::logic_error("k-means SSE increased during Lloyd iteration");
    }
    r.sse_trace.push_back(sse);
    r.sse = sse;

    if (r.iterations >= kMaxLloydIterations) break;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = detail::nearest(points.row(i), r.centroids, &dist[i]);
      if (a != r.assignments[i]) {
        r.assignments[i] = a;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return r;
}

inline std::uint64_t restart_seed(std::uint64_t base, std::size_t k, std::size_t restart) {
  return mix_seed(base ^ mix_seed((static_cast<std::uint64_t>(k) << 16) | restart));
}

// Lowest SSE over `restarts` runs with derived seeds; ties go to the
// smaller seed.
inline KMeansResult kmeans_best(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t restarts = 10) {
  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto run = kmeans(points, k, restart_seed(seed, k, r));
    if (!have || std::tie(run.sse, run.seed) < std::tie(best.sse, best.seed)) {
      best = std::move(run);
      have = true;
    }
  }
  return best;
}

struct SsePoint {
  std::size_t k = 0;
  double sse = 0.0;

  friend bool operator==(const SsePoint&, const SsePoint&) = default;
};

inline std::vector<SsePoint> sse_curve(const Matrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                                       std::size_t restarts = 10) {
  if (k_min < 1 || k_min > k_max || k_max > points.rows()) {
    throw DimensionError("sse_curve: need 1 <= k_min <= k_max <= n");
  }
  std::vector<SsePoint> curve;
  for (std::size_t k = k_min; k <= k_max; ++k) curve.push_back({k, kmeans_best(points, k, seed, restarts).sse});
  return curve;
}

// k with the largest second difference of the SSE curve. Only interior
// points qualify; ties go to the smaller k.
inline std::size_t elbow_detect(std::span<const SsePoint> curve) {
  if (curve.size() < 3) throw CurveError("elbow detection needs at least 3 curve points");
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].k != curve[i - 1].k + 1) throw CurveError("curve k values must be consecutive");
  }
  std::size_t best_k = curve[1].k;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double second = (curve[i - 1].sse - curve[i].sse) - (curve[i].sse - curve[i + 1].sse);
    if (second > best) {
      best = second;
      best_k = curve[i].k;
    }
  }
  return best_k;
}

// --- Ward ------------------------------------------------------------------

struct Merge {
  std::size_t a = 0;  // cluster ids: points are 0..n-1, merge m creates n+m
  std::size_t b = 0;  // a < b
  double cost = 0.0;  // increase in total within-cluster SSE
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

// Flat labels from the first n-k merges. Labels are numbered in order of
// each cluster's lowest point index.
inline std::vector<std::size_t> cut_dendrogram(const Dendrogram& dendro, std::size_t k) {
  const std::size_t n = dendro.leaves;
  if (k < 1 || k > n) throw DimensionError("cut_dendrogram: k outside [1, n]");
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - k; ++m) {
    const auto& mg = dendro.merges[m];
    parent[find(mg.a)] = n + m;
    parent[find(mg.b)] = n + m;
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> root_label(2 * n, std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    if (root_label[root] == std::numeric_limits<std::size_t>::max()) root_label[root] = next++;
    labels[i] = root_label[root];
  }
  return labels;
}

struct WardResult {
  Dendrogram dendrogram;
  std::vector<std::size_t> assignments;
};

inline constexpr double kWardTieTolerance = 1e-12;

// Each step merges the pair with the smallest Ward cost
//   n_a n_b / (n_a + n_b) * |c_a - c_b|^2,
// ties (relative 1e-12) broken by the lowest (id_a, id_b). Costs are maintained with the
// Lance-Williams recurrence.
inline WardResult ward_cluster(const Matrix& points, std::size_t k) {
  const std::size_t n = points.rows();
  if (n < 2) throw DimensionError("ward_cluster needs at least 2 points");
  detail::check_points(points, k);

  Matrix cost(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = squared_distance(points.row(i), points.row(j)) / 2.0;
      cost(i, j) = c;
      cost(j, i) = c;
    }
  }
  std::vector<std::size_t> id(n);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::iota(id.begin(), id.end(), std::size_t{0});

  WardResult out;
  out.dendrogram.leaves = n;
  for (std::size_t m = 0; m + 1 < n; ++m) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j]) lowest = std::min(lowest, cost(i, j));
      }
    }
    // Costs within rounding of the minimum count as tied.
    const double tied = lowest + kWardTieTolerance * std::max(1.0, std::abs(lowest));
    std::size_t bi = n;
    std::size_t bj = n;
    double best = lowest;
    std::pair<std::size_t, std::size_t> best_key{n * 2, n * 2};
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j] || cost(i, j) > tied) continue;
        const std::pair key{std::min(id[i], id[j]), std::max(id[i], id[j])};
        if (key < best_key) {
          best = cost(i, j);
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = static_cast<double>(size[bi]);
    const double nj = static_cast<double>(size[bj]);
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s] || s == bi || s == bj) continue;
      const double ns = static_cast<double>(size[s]);
      const double c = ((ns + ni) * cost(s, bi) + (ns + nj) * cost(s, bj) - ns * best) / (ns + ni + nj);
      cost(s, bi) = c;
      cost(bi, s) = c;
    }
    out.dendrogram.merges.push_back({best_key.first, best_key.second, best, size[bi] + size[bj]});
    size[bi] += size[bj];
    id[bi] = n + m;
    active[bj] = false;
  }
  out.assignments = cut_dendrogram(out.dendrogram, k);
  return out;
}

// --- composition -----------------------------------------------------------

struct GenderTotals {
  std::size_t female = 0;
  std::size_t male = 0;
};

struct CompositionRow {
  std::size_t cluster = 0;
  std::size_t female = 0;
  std::size_t male = 0;
  std::size_t unknown = 0;
  double ratio = 0.0;            // male per female; inf for all-male clusters
  double expected_female = 0.0;  // (female + male) x global female fraction
  double deviation = 0.0;        // |female - expected_female|
};

inline GenderTotals gender_totals(std::span<const Gender> genders) {
  GenderTotals t;
  for (auto g : genders) {
    if (g == Gender::Female) ++t.female;
    if (g == Gender::Male) ++t.male;
  }
  return t;
}

inline std::vector<CompositionRow> composition_audit(std::span<const std::size_t> assignments,
                                                     std::span<const Gender> genders, GenderTotals global) {
  if (assignments.size() != genders.size()) throw DimensionError("composition_audit: length mismatch");
  std::size_t clusters = 0;
  for (auto a : assignments) clusters = std::max(clusters, a + 1);
  std::vector<CompositionRow> rows(clusters);
  for (std::size_t c = 0; c < clusters; ++c) rows[c].cluster = c;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    auto& row = rows[assignments[i]];
    switch (genders[i]) {
      case Gender::Female: ++row.female; break;
      case Gender::Male: ++row.male; break;
      case Gender::Unknown: ++row.unknown; break;
    }
  }
  const std::size_t denom = global.female + global.male;
  const double female_fraction = denom ? static_cast<double>(global.female) / static_cast<double>(denom) : 0.0;
  for (auto& row : rows) {
    if (row.female > 0) {
      row.ratio = static_cast<double>(row.male) / static_cast<double>(row.female);
    } else {
      row.ratio = row.male > 0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    }
    row.expected_female = static_cast<double>(row.female + row.male) * female_fraction;
    row.deviation = std::abs(static_cast<double>(row.female) - row.expected_female);
  }
  return rows;
}

inline std::vector<CompositionRow> composition_audit(std::span<const std::size_t> assignments,
                                                     std::span<const Gender> genders) {
  return composition_audit(assignments, genders, gender_totals(genders));
}

inline void append_composition_csv(csv::Writer& w, std::string_view method, std::span<const CompositionRow> rows) {
  for (const auto& r : rows) {
    w.row({std::string(method), std::to_string(r.cluster), std::to_string(r.female), std::to_string(r.male),
           std::to_string(r.unknown), format_double(r.ratio), format_double(r.expected_female),
           format_double(r.deviation)});
  }
}

inline csv::Row composition_header() {
  return {"method", "cluster", "female", "male", "unknown", "ratio", "expected_female", "deviation"};
}

inline std::string ssecurve_csv(std::span<const SsePoint> curve) {
  csv::Writer w;
  w.row({"k", "sse"});
  for (const auto& p : curve) w.row({std::to_string(p.k), format_double(p.sse)});
  return w.str();
}

}  // namespace scriptaffect
