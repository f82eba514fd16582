#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "oracles.hpp"
#include "scriptaffect/stats.hpp"

using namespace scriptaffect;

namespace {

std::vector<double> random_sample(std::mt19937& gen, std::size_t n, int levels) {
  std::uniform_int_distribution<int> v(0, levels);
  std::vector<double> out(n);
  for (double& x : out) x = v(gen) / 4.0;  // coarse grid so ties are common
  return out;
}

double tie_term(std::vector<double> pooled) {
  std::map<double, double> counts;
  for (double v : pooled) counts[v] += 1.0;
  double s = 0.0;
  for (auto [_, t] : counts) s += t * t * t - t;
  return s;
}

}  // namespace

TEST(RankWithTies, Examples) {
  const std::vector<double> a{10, 20, 30}, b{5, 5}, c{7, 3, 7};
  EXPECT_EQ(rank_with_ties(a), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(rank_with_ties(b), (std::vector<double>{1.5, 1.5}));
  EXPECT_EQ(rank_with_ties(c), (std::vector<double>{2.5, 1, 2.5}));
  const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(rank_with_ties(bad), NonFiniteError);
}

TEST(MannWhitneyU, CompleteSeparation) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.u1, 0.0);
  EXPECT_EQ(r.u2, 9.0);
  EXPECT_NEAR(r.p_value, 0.0808555983700523, 1e-12);
  EXPECT_LT(r.z, 0.0);
}

TEST(MannWhitneyU, FullTieBetweenGroups) {
  const std::vector<double> a{1, 2}, b{1, 2};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.u1, 2.0);
  EXPECT_EQ(r.u2, 2.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(MannWhitneyU, TiedReferenceValue) {
  const std::vector<double> a{1, 2, 2, 3}, b{2, 3, 3, 5, 7};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.u1, 3.0);
  EXPECT_EQ(r.u2, 17.0);
  EXPECT_NEAR(r.p_value, 0.09934224785346528, 1e-12);
}

TEST(MannWhitneyU, UStatisticsSumToProduct) {
  std::mt19937 gen(5);
  std::uniform_int_distribution<int> v(0, 6);
  std::vector<double> a(37), b(53);
  for (auto& x : a) x = v(gen);
  for (auto& x : b) x = v(gen);
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.u1 + r.u2, 37.0 * 53.0);
}

TEST(MannWhitneyU, DegenerateInputs) {
  const std::vector<double> same{3, 3}, empty{};
  EXPECT_THROW(mann_whitney_u(same, same), DegenerateError);
  EXPECT_THROW(mann_whitney_u(empty, same), DegenerateError);
}

TEST(MannWhitneyU, MatchesPairCountingAndNormalFormula) {
  std::mt19937 gen(101);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_sample(gen, size(gen), 12);
    const auto b = random_sample(gen, size(gen), 12);
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; })) continue;
    const auto r = mann_whitney_u(a, b);
    EXPECT_EQ(r.u1, oracle::pairwise_u(a, b));
    EXPECT_EQ(r.u1 + r.u2, static_cast<double>(a.size() * b.size()));
    EXPECT_NEAR(r.p_value, oracle::mwu_normal_p(r.u1, a.size(), b.size(), tie_term(pooled)), 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);

    const auto swapped = mann_whitney_u(b, a);
    EXPECT_EQ(swapped.u1, r.u2);
    EXPECT_EQ(swapped.u2, r.u1);
    EXPECT_NEAR(swapped.p_value, r.p_value, 1e-15);
  }
}

TEST(MannWhitneyU, ShiftAndMonotoneInvariance) {
  std::mt19937 gen(103);
  std::uniform_int_distribution<std::size_t> size(2, 40);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_sample(gen, size(gen), 20);
    const auto b = random_sample(gen, size(gen), 20);
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; })) continue;
    const auto r = mann_whitney_u(a, b);
    auto shift = [](std::vector<double> v) {
      for (double& x : v) x += 3.0;  // exact on the quarter grid
      return v;
    };
    const auto rs = mann_whitney_u(shift(a), shift(b));
    EXPECT_EQ(rs.u1, r.u1);
    EXPECT_EQ(rs.u2, r.u2);
    EXPECT_EQ(rs.p_value, r.p_value);
    auto warp = [](std::vector<double> v) {
      for (double& x : v) x = std::exp(x) + x * x * x;
      return v;
    };
    const auto rw = mann_whitney_u(warp(a), warp(b));
    EXPECT_EQ(rw.u1, r.u1);
    EXPECT_EQ(rw.u2, r.u2);
  }
}

TEST(MannWhitneyU, PValueFallsWithSeparation) {
  std::mt19937 gen(107);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> base_a(30);
  for (double& x : base_a) x = noise(gen);
  const auto base_b = base_a;  // separation grows from zero
  double prev = 2.0;
  for (int step = 0; step <= 40; ++step) {
    std::vector<double> b = base_b;
    for (double& x : b) x += 0.1 * step;
    const auto p = mann_whitney_u(base_a, b).p_value;
    EXPECT_LE(p, prev) << "shift step " << step;
    prev = p;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(BoxSummary, Examples) {
  const std::vector<double> four{1, 2, 3, 4};
  const auto s = box_summary(four);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q1, 1.75);
  EXPECT_DOUBLE_EQ(s.q3, 3.25);
  EXPECT_TRUE(s.outliers.empty());

  const std::vector<double> one{5};
  const auto t = box_summary(one);
  for (double v : {t.min, t.q1, t.median, t.q3, t.max}) EXPECT_EQ(v, 5.0);

  const std::vector<double> spike{1, 1, 1, 1, 100};
  const auto u = box_summary(spike);
  EXPECT_EQ(u.outliers, (std::vector<double>{100}));
  EXPECT_EQ(u.max, 1.0);

  const std::vector<double> bad{std::numeric_limits<double>::infinity()};
  EXPECT_THROW(box_summary(bad), NonFiniteError);
}

TEST(BoxSummary, OrderedOverNonOutliers) {
  std::mt19937 gen(109);
  std::lognormal_distribution<double> heavy(0.0, 1.5);
  std::uniform_int_distribution<std::size_t> size(1, 60);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(size(gen));
    for (double& x : v) x = heavy(gen);
    const auto s = box_summary(v);
    EXPECT_LE(s.min, s.q1);
    EXPECT_LE(s.q1, s.median);
    EXPECT_LE(s.median, s.q3);
    EXPECT_LE(s.q3, s.max);
    const double iqr = s.q3 - s.q1;
    for (double o : s.outliers) EXPECT_TRUE(o < s.q1 - 1.5 * iqr || o > s.q3 + 1.5 * iqr);
    const auto inliers = std::count_if(v.begin(), v.end(), [&](double x) { return x >= s.min && x <= s.max; });
    EXPECT_EQ(static_cast<std::size_t>(inliers) + s.outliers.size(), v.size());
  }
}

namespace {

Corpus corpus_of(std::initializer_list<std::tuple<int, Gender, int>> groups) {
  Corpus c;
  int id = 0;
  for (auto [year, g, count] : groups) {
    for (int i = 0; i < count; ++i) c.records.push_back({"C" + std::to_string(id++), "M", year, g, {"x"}});
  }
  return c;
}

}  // namespace

TEST(GenderDistributionOverTime, Examples) {
  const auto rows = gender_distribution_over_time(
      corpus_of({{2000, Gender::Female, 1}, {2004, Gender::Female, 2}, {2002, Gender::Male, 17},
                 {2003, Gender::Unknown, 4}, {2016, Gender::Male, 1}}));
  ASSERT_EQ(rows.size(), 2u);  // 2005-2009 and 2010-2014 have no data
  EXPECT_EQ(rows[0].bin_start, 2000);
  EXPECT_EQ(rows[0].bin_end, 2004);
  EXPECT_EQ(rows[0].female, 3u);
  EXPECT_EQ(rows[0].male, 17u);
  EXPECT_EQ(rows[0].unknown, 4u);
  EXPECT_DOUBLE_EQ(rows[0].female_pct, 15.0);
  EXPECT_EQ(rows[1].bin_start, 2015);
  EXPECT_DOUBLE_EQ(rows[1].female_pct, 0.0);

  const auto decade = gender_distribution_over_time(corpus_of({{1999, Gender::Female, 1}}), 10);
  EXPECT_EQ(decade[0].bin_start, 1990);
  EXPECT_EQ(decade[0].bin_end, 1999);
  EXPECT_TRUE(gender_distribution_over_time(Corpus{}).empty());
}

TEST(EmotionTestBattery, PlantedJoy) {
  std::mt19937 gen(113);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t joy = *emotion_index("joy"), fear = *emotion_index("fear");
  Matrix values(40, kEmotionCount);
  std::vector<Gender> genders;
  for (std::size_t i = 0; i < 40; ++i) {
    const bool female = i % 2 == 0;
    genders.push_back(female ? Gender::Female : Gender::Male);
    for (std::size_t e = 0; e < kEmotionCount; ++e) values(i, e) = u(gen);
    values(i, joy) = female ? 0.6 + 0.4 * u(gen) : 0.4 * u(gen);
    values(i, fear) = 0.25;  // constant column
  }
  genders.push_back(Gender::Unknown);
  Matrix with_unknown(41, kEmotionCount, 0.9);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t e = 0; e < kEmotionCount; ++e) with_unknown(i, e) = values(i, e);
  }
  with_unknown(40, fear) = 0.25;
  const auto rows = emotion_test_battery(with_unknown, genders);
  ASSERT_EQ(rows.size(), kEmotionCount);
  EXPECT_EQ(rows.front().emotion, "joy");
  EXPECT_LT(rows.front().result->p_value, 0.01);
  EXPECT_EQ(rows.front().higher_group, "female");
  EXPECT_EQ(rows.back().emotion, "fear");
  EXPECT_FALSE(rows.back().result.has_value());
  EXPECT_EQ(rows.back().higher_group, "degenerate");
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].result.has_value());
    EXPECT_LE(rows[i - 1].result->p_value, rows[i].result->p_value);
    EXPECT_EQ(rows[i].result->u1 + rows[i].result->u2, 400.0);
  }
}

TEST(EmotionTestBattery, IdenticalGroups) {
  std::mt19937 gen(127);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix values(20, kEmotionCount);
  std::vector<Gender> genders;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t e = 0; e < kEmotionCount; ++e) values(i, e) = values(i + 10, e) = u(gen);
    genders.push_back(Gender::Female);
  }
  genders.insert(genders.end(), 10, Gender::Male);
  for (const auto& row : emotion_test_battery(values, genders)) {
    EXPECT_EQ(row.result->p_value, 1.0) << row.emotion;
    EXPECT_EQ(row.higher_group, "equal");
  }
}

TEST(EmotionTestBattery, NeedsBothGroups) {
  Matrix values(2, kEmotionCount, 0.5);
  const std::vector<Gender> one_group{Gender::Male, Gender::Male};
  EXPECT_THROW(emotion_test_battery(values, one_group), DegenerateError);
  const std::vector<Gender> short_labels{Gender::Male};
  EXPECT_THROW(emotion_test_battery(values, short_labels), DimensionError);
}

TEST(StatsCsv, Schema) {
  Matrix values(4, kEmotionCount, 0.0);
  values(0, 0) = 1.0;
  const std::vector<Gender> genders{Gender::Female, Gender::Female, Gender::Male, Gender::Male};
  const auto rows = emotion_test_battery(values, genders);
  const auto text = stats_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), "emotion,u1,u2,z,p_value,higher_group");
  EXPECT_NE(text.find("\njoy,,,,,degenerate\n"), std::string::npos);
  EXPECT_NE(text.find("\nanger,3,1,"), std::string::npos);
}
