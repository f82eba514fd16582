#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scriptaffect/corpus.hpp"
#include "scriptaffect/csv.hpp"
#include "scriptaffect/emotion.hpp"
#include "scriptaffect/errors.hpp"
#include "scriptaffect/util.hpp"

namespace scriptaffect {

// Ranks 1..n; tied values share the mean of the ranks they span.
inline std::vector<double> rank_with_ties(std::span<const double> values) {
  const std::size_t n = values.size();
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteError("rank_with_ties: non-finite value");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) hold ranks i+1..j+1
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

struct UTestResult {
  double u1 = 0.0;  // pairs where a beats b, ties counted one half
  double u2 = 0.0;
  double z = 0.0;
  double p_value = 1.0;  // two-sided
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

// Mann-Whitney U with the two-sided normal approximation, tie-corrected
// variance and a 0.5 continuity correction.
inline UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DegenerateError("mann_whitney_u: both groups need at least one value");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = rank_with_ties(pooled);

  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum_a += ranks[i];

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);

  UTestResult r;
  r.n1 = n1;
  r.n2 = n2;
  r.u1 = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  r.u2 = dn1 * dn2 - r.u1;

  const double variance = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(variance > 0.0)) throw DegenerateError("mann_whitney_u: all pooled values identical");
  const double sigma = std::sqrt(variance);
  const double diff = r.u1 - dn1 * dn2 / 2.0;
  const double corrected = std::max(std::abs(diff) - 0.5, 0.0);
  r.z = std::copysign(corrected / sigma, diff);
  if (corrected == 0.0) r.z = 0.0;
  r.p_value = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  return r;
}

struct BoxSummary {
  double min = 0.0;  // lowest non-outlier (whisker end)
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;  // highest non-outlier
  std::vector<double> outliers;
};

// Linear interpolation between order statistics of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

// Tukey box plot: outliers lie beyond 1.5 IQR from the quartiles. Whisker
// ends never fall inside the box, even when interpolated quartiles sit past
// the nearest non-outlier.
inline BoxSummary box_summary(std::span<const double> values) {
  if (values.empty()) throw DegenerateError("box_summary: no values");
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteError("box_summary: non-finite value");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxSummary s;
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.min = s.q1;
  s.max = s.q3;
  for (double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
    } else {
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
  }
  return s;
}

struct TimeBinRow {
  int bin_start = 0;
  int bin_end = 0;
  std::size_t female = 0;
  std::size_t male = 0;
  std::size_t unknown = 0;
  double female_pct = 0.0;  // of female + male; 0 when that is empty

  friend bool operator==(const TimeBinRow&, const TimeBinRow&) = default;
};

// Bins are anchored at multiples of the width (2000-2004, 2005-2009, ...).
// Empty bins are omitted.
inline std::vector<TimeBinRow> gender_distribution_over_time(const Corpus& corpus, int bin_width = 5) {
  if (bin_width < 1) throw Error("bin width must be at least 1");
  std::map<int, TimeBinRow> bins;
  for (const auto& r : corpus.records) {
    const int start = (r.year / bin_width) * bin_width;
    auto& row = bins[start];
    row.bin_start = start;
    row.bin_end = start + bin_width - 1;
    switch (r.gender) {
      case Gender::Female: ++row.female; break;
      case Gender::Male: ++row.male; break;
      case Gender::Unknown: ++row.unknown; break;
    }
  }
  std::vector<TimeBinRow> out;
  for (auto& [_, row] : bins) {
    const std::size_t denom = row.female + row.male;
    if (denom > 0) row.female_pct = 100.0 * static_cast<double>(row.female) / static_cast<double>(denom);
    out.push_back(row);
  }
  return out;
}

inline std::string timebins_csv(std::span<const TimeBinRow> rows) {
  csv::Writer w;
  w.row({"bin_start", "bin_end", "female", "male", "unknown", "female_pct"});
  for (const auto& r : rows) {
    w.row({std::to_string(r.bin_start), std::to_string(r.bin_end), std::to_string(r.female),
           std::to_string(r.male), std::to_string(r.unknown), format_double(r.female_pct)});
  }
  return w.str();
}

// --- 32-emotion battery ----------------------------------------------------

struct EmotionTestRow {
  std::string emotion;
  std::optional<UTestResult> result;  // empty when the column is degenerate
  std::string higher_group;           // "female", "male", "equal" or "degenerate"
};

// Female is the first group, so u1 counts female-over-male pairs. Rows are
// sorted by ascending p-value; degenerate rows follow in column order.
// Unknown-gender rows are skipped.
inline std::vector<EmotionTestRow> emotion_test_battery(const Matrix& values, std::span<const Gender> genders) {
  if (values.rows() != genders.size()) throw DimensionError("emotion_test_battery: one gender per row required");
  if (values.cols() != kEmotionCount) throw DimensionError("emotion_test_battery: expected 32 emotion columns");
  std::vector<std::size_t> female_rows;
  std::vector<std::size_t> male_rows;
  for (std::size_t i = 0; i < genders.size(); ++i) {
    if (genders[i] == Gender::Female) female_rows.push_back(i);
    if (genders[i] == Gender::Male) male_rows.push_back(i);
  }
  if (female_rows.empty() || male_rows.empty()) {
    throw DegenerateError("emotion_test_battery: need at least one female and one male row");
  }

  std::vector<EmotionTestRow> rows;
  std::vector<double> fa(female_rows.size());
  std::vector<double> ma(male_rows.size());
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    for (std::size_t i = 0; i < female_rows.size(); ++i) fa[i] = values(female_rows[i], e);
    for (std::size_t i = 0; i < male_rows.size(); ++i) ma[i] = values(male_rows[i], e);
    EmotionTestRow row{std::string(kEmotionNames[e]), std::nullopt, "degenerate"};
    try {
      const auto r = mann_whitney_u(fa, ma);
      row.result = r;
      row.higher_group = r.u1 > r.u2 ? "female" : (r.u2 > r.u1 ? "male" : "equal");
    } catch (const DegenerateError&) {
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const EmotionTestRow& a, const EmotionTestRow& b) {
    if (a.result.has_value() != b.result.has_value()) return a.result.has_value();
    if (!a.result) return false;
    return a.result->p_value < b.result->p_value;
  });
  return rows;
}

inline std::string stats_csv(std::span<const EmotionTestRow> rows) {
  csv::Writer w;
  w.row({"emotion", "u1", "u2", "z", "p_value", "higher_group"});
  for (const auto& r : rows) {
    if (r.result) {
      w.row({r.emotion, format_double(r.result->u1), format_double(r.result->u2), format_double(r.result->z),
             format_double(r.result->p_value), r.higher_group});
    } else {
      w.row({r.emotion, "", "", "", "", r.higher_group});
    }
  }
  return w.str();
}

}  // namespace scriptaffect
