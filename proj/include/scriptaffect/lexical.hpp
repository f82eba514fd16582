#pragma once

// Word usage contrast between the female and male groups: token counts,
// noun filtering and the words exclusive to one group.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "scriptaffect/corpus.hpp"
#include "scriptaffect/csv.hpp"
#include "scriptaffect/emotion.hpp"
#include "scriptaffect/utf8.hpp"

namespace scriptaffect {

using WordSet = std::unordered_set<std::string>;

// Group label ("female" / "male") -> word -> token count.
struct FrequencyTable {
  std::map<std::string, std::map<std::string, std::size_t>> counts;
};

// Newline-delimited word list; '#' starts a comment line. Words are
// lowercased.
inline WordSet load_word_list(std::string_view text) {
  WordSet words;
  for (const auto& line : split_lines(text)) {
    const auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.insert(lowercase(w));
  }
  return words;
}

inline std::size_t code_points(std::string_view s) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    utf8::next(s, pos);
    ++n;
  }
  return n;
}

// Counts tokens per gender group, skipping stopwords and one-character
// tokens. Unknown-gender characters are not counted.
inline FrequencyTable group_frequencies(const Corpus& corpus, const WordSet& stopwords) {
  FrequencyTable table;
  for (const auto& r : corpus.records) {
    if (r.gender == Gender::Unknown) continue;
    auto& counts = table.counts[std::string(to_string(r.gender))];
    for (const auto& d : r.dialogues) {
      for (auto& token : tokenize(d)) {
        if (code_points(token) < 2 || stopwords.contains(token)) continue;
        ++counts[std::move(token)];
      }
    }
  }
  return table;
}

struct RankedWord {
  std::string word;
  std::size_t count = 0;

  friend bool operator==(const RankedWord&, const RankedWord&) = default;
};

// Nouns used by exactly one group, top `top_n` per group by count then
// alphabetically.
inline std::map<std::string, std::vector<RankedWord>> exclusive_nouns(const FrequencyTable& freq, const WordSet& nouns,
                                                                      std::size_t top_n) {
  std::map<std::string, std::size_t> groups_using;
  for (const auto& [group, counts] : freq.counts) {
    for (const auto& [word, _] : counts) ++groups_using[word];
  }
  std::map<std::string, std::vector<RankedWord>> out;
  for (const auto& [group, counts] : freq.counts) {
    auto& list = out[group];
    for (const auto& [word, count] : counts) {
      if (nouns.contains(word) && groups_using[word] == 1) list.push_back({word, count});
    }
    std::sort(list.begin(), list.end(), [](const RankedWord& a, const RankedWord& b) {
      return a.count != b.count ? a.count > b.count : a.word < b.word;
    });
    if (list.size() > top_n) list.resize(top_n);
  }
  return out;
}

inline std::string wordfreq_csv(const std::map<std::string, std::vector<RankedWord>>& lists) {
  csv::Writer w;
  w.row({"group", "word", "count", "rank"});
  for (const auto& [group, list] : lists) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      w.row({group, list[i].word, std::to_string(list[i].count), std::to_string(i + 1)});
    }
  }
  return w.str();
}

}  // namespace scriptaffect
