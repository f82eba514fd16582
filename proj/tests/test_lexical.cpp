#include <gtest/gtest.h>

#include <random>
#include <set>

#include "scriptaffect/lexical.hpp"

using namespace scriptaffect;

namespace {

FrequencyTable table(std::map<std::string, std::size_t> female, std::map<std::string, std::size_t> male) {
  FrequencyTable t;
  t.counts["female"] = std::move(female);
  t.counts["male"] = std::move(male);
  return t;
}

}  // namespace

TEST(GroupFrequencies, Examples) {
  const WordSet stop{"the"};
  Corpus one{{{"ANA", "M", 2000, Gender::Female, {"the dress"}}}, {}};
  const auto t = group_frequencies(one, stop);
  EXPECT_EQ(t.counts.at("female"), (std::map<std::string, std::size_t>{{"dress", 1}}));

  Corpus both{{{"ANA", "M", 2000, Gender::Female, {"Coffee, coffee!"}},
               {"BO", "M", 2000, Gender::Male, {"coffee a I x"}},
               {"CY", "M", 2000, Gender::Unknown, {"tea"}}},
              {}};
  const auto u = group_frequencies(both, stop);
  EXPECT_EQ(u.counts.at("female").at("coffee"), 2u);
  EXPECT_EQ(u.counts.at("male"), (std::map<std::string, std::size_t>{{"coffee", 1}}));
  EXPECT_FALSE(u.counts.contains("unknown"));

  EXPECT_TRUE(group_frequencies(Corpus{}, stop).counts.empty());
}

TEST(GroupFrequencies, LengthCountsCodePoints) {
  Corpus c{{{"ANA", "M", 2000, Gender::Female, {"é ép"}}}, {}};
  EXPECT_EQ(group_frequencies(c, {}).counts.at("female"), (std::map<std::string, std::size_t>{{"ép", 1}}));
}

TEST(ExclusiveNouns, Examples) {
  const WordSet nouns{"kitchen", "time", "war"};
  const auto out = exclusive_nouns(table({{"kitchen", 5}, {"time", 9}}, {{"time", 40}, {"war", 7}}), nouns, 50);
  EXPECT_EQ(out.at("female"), (std::vector<RankedWord>{{"kitchen", 5}}));
  EXPECT_EQ(out.at("male"), (std::vector<RankedWord>{{"war", 7}}));

  const auto same = exclusive_nouns(table({{"time", 1}}, {{"time", 3}}), nouns, 50);
  EXPECT_TRUE(same.at("female").empty());
  EXPECT_TRUE(same.at("male").empty());
}

TEST(ExclusiveNouns, OrderingAndCutoff) {
  const WordSet nouns{"bed", "cat", "dog", "egg"};
  const auto out = exclusive_nouns(table({{"dog", 3}, {"cat", 3}, {"egg", 9}, {"bed", 1}, {"run", 50}}, {}), nouns, 3);
  EXPECT_EQ(out.at("female"), (std::vector<RankedWord>{{"egg", 9}, {"cat", 3}, {"dog", 3}}));
}

TEST(ExclusiveNouns, PropertiesOnRandomTables) {
  std::mt19937 gen(401);
  std::vector<std::string> vocab;
  for (char a = 'a'; a <= 'h'; ++a) {
    for (char b = 'a'; b <= 'h'; ++b) vocab.push_back(std::string{a, b});
  }
  WordSet nouns(vocab.begin(), vocab.begin() + 40);
  const WordSet stop(vocab.begin() + 30, vocab.begin() + 34);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(1, 30);
  std::bernoulli_distribution female(0.3);
  for (int trial = 0; trial < 100; ++trial) {
    Corpus c;
    for (int i = 0; i < 8; ++i) {
      std::string line;
      for (std::size_t w = len(gen); w > 0; --w) line += vocab[pick(gen)] + " ";
      c.records.push_back({"C" + std::to_string(i), "M", 2000, female(gen) ? Gender::Female : Gender::Male, {line}});
    }
    const auto freq = group_frequencies(c, stop);
    const auto out = exclusive_nouns(freq, nouns, 10);
    std::set<std::string> seen;
    for (const auto& [group, list] : out) {
      EXPECT_LE(list.size(), 10u);
      for (std::size_t i = 0; i < list.size(); ++i) {
        EXPECT_TRUE(nouns.contains(list[i].word));
        EXPECT_FALSE(stop.contains(list[i].word));
        EXPECT_TRUE(seen.insert(list[i].word).second) << "word in two groups: " << list[i].word;
        if (i > 0) {
          const auto& prev = list[i - 1];
          EXPECT_TRUE(prev.count > list[i].count || (prev.count == list[i].count && prev.word < list[i].word));
        }
      }
    }
    EXPECT_EQ(exclusive_nouns(freq, nouns, 10), out);
  }
}

TEST(LoadWordList, CommentsAndCase) {
  const auto words = load_word_list("# header\nDress\n\n  kitchen  \n");
  EXPECT_EQ(words, (WordSet{"dress", "kitchen"}));
}

TEST(WordfreqCsv, Schema) {
  const std::map<std::string, std::vector<RankedWord>> lists{{"female", {{"kitchen", 5}, {"dress", 2}}},
                                                             {"male", {{"war", 7}}}};
  EXPECT_EQ(wordfreq_csv(lists), "group,word,count,rank\nfemale,kitchen,5,1\nfemale,dress,2,2\nmale,war,7,1\n");
}
