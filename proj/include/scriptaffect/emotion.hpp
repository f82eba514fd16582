#pragma once

// Lexicon-based emotion embedding. A dialogue becomes a probability
// distribution over Plutchik's eight primary emotions; the 24 primary dyads
// are the means of their two constituents, giving a 32-dimensional vector.

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scriptaffect/corpus.hpp"
#include "scriptaffect/csv.hpp"
#include "scriptaffect/errors.hpp"
#include "scriptaffect/utf8.hpp"
#include "scriptaffect/util.hpp"

namespace scriptaffect {

// Alphabetical, which is also the NRC file's affect order.
enum class Primary : std::uint8_t { Anger, Anticipation, Disgust, Fear, Joy, Sadness, Surprise, Trust };

inline constexpr std::size_t kPrimaryCount = 8;
inline constexpr std::size_t kEmotionCount = 32;

inline constexpr std::array<std::string_view, kPrimaryCount> kPrimaryNames{
    "anger", "anticipation", "disgust", "fear", "joy", "sadness", "surprise", "trust"};

// Canonical column order for every 32-dimensional output.
inline constexpr std::array<std::string_view, kEmotionCount> kEmotionNames{
    "anger",  "joy",        "anticipation", "surprise", "trust",     "delight",     "sadness",
    "disgust", "hope",      "curiosity",    "despair",  "confined",  "envy",        "cynicism",
    "pride",  "love",       "submission",   "shame",    "awe",       "disapproval", "remorse",
    "aggression", "anxiety", "outrage",     "fear",     "dominance", "guilt",       "sentimentality",
    "optimism", "pessimism", "contempt",    "morbidness"};

constexpr std::string_view to_string(Primary p) { return kPrimaryNames[static_cast<std::size_t>(p)]; }

inline std::optional<Primary> parse_primary(std::string_view name) {
  for (std::size_t i = 0; i < kPrimaryCount; ++i) {
    if (kPrimaryNames[i] == name) return static_cast<Primary>(i);
  }
  return std::nullopt;
}

// Column index of an emotion name; "aggressiveness" is accepted for
// "aggression".
inline std::optional<std::size_t> emotion_index(std::string_view name) {
  if (name == "aggressiveness") name = "aggression";
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (kEmotionNames[i] == name) return i;
  }
  return std::nullopt;
}

inline std::size_t emotion_index(Primary p) { return *emotion_index(to_string(p)); }

// --- lexicon ---------------------------------------------------------------

using AffectSet = std::bitset<kPrimaryCount>;

struct EmotionLexicon {
  std::unordered_map<std::string, AffectSet> entries;
  std::size_t skipped_phrases = 0;  // multi-word rows, not matchable by tokens

  const AffectSet* find(const std::string& word) const {
    auto it = entries.find(word);
    return it == entries.end() ? nullptr : &it->second;
  }
};

inline std::string lowercase(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) utf8::append(out, utf8::to_lower(utf8::next(s, pos)));
  return out;
}

// NRC word-level format: "word<TAB>affect<TAB>flag". Only flag=1 rows for
// the eight primaries populate the lexicon; positive/negative rows are
// accepted and ignored.
inline EmotionLexicon load_lexicon(std::string_view tsv) {
  EmotionLexicon lex;
  const auto lines = split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (trim(line).empty()) continue;
    std::array<std::string_view, 3> f;
    std::size_t start = 0;
    std::size_t n = 0;
    for (; n < 3; ++n) {
      const auto tab = line.find('\t', start);
      if (n < 2 && tab == std::string_view::npos) break;
      f[n] = n < 2 ? line.substr(start, tab - start) : line.substr(start);
      start = tab + 1;
    }
    if (n != 3 || f[2].find('\t') != std::string_view::npos) {
      throw LexiconError("expected word<TAB>affect<TAB>flag", line_no);
    }
    const auto word = trim(f[0]);
    const auto affect = trim(f[1]);
    const auto flag = trim(f[2]);
    if (word.empty()) throw LexiconError("empty word", line_no);
    if (flag != "0" && flag != "1") throw LexiconError("flag must be 0 or 1", line_no);
    const auto primary = parse_primary(ascii_lower(affect));
    const std::string affect_lower = ascii_lower(affect);
    if (!primary && affect_lower != "positive" && affect_lower != "negative") {
      throw LexiconError("unknown affect '" + std::string(affect) + "'", line_no);
    }
    if (flag == "0" || !primary) continue;
    if (word.find_first_of(" \t") != std::string_view::npos) {
      ++lex.skipped_phrases;
      continue;
    }
    lex.entries[lowercase(word)].set(static_cast<std::size_t>(*primary));
  }
  return lex;
}

// Letters and apostrophes form tokens; everything else separates them.
// Apostrophes at either end of a token are dropped.
inline std::vector<std::string> tokenize(std::string_view dialogue) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    const auto b = current.find_first_not_of('\'');
    if (b != std::string::npos) {
      const auto e = current.find_last_not_of('\'');
      tokens.push_back(current.substr(b, e - b + 1));
    }
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < dialogue.size()) {
    const char32_t cp = utf8::next(dialogue, pos);
    if (utf8::is_letter(cp)) {
      utf8::append(current, utf8::to_lower(cp));
    } else if (utf8::is_apostrophe(cp)) {
      current += '\'';
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

// --- vectors ---------------------------------------------------------------

struct PrimaryVector {
  std::array<double, kPrimaryCount> scores{};
  std::size_t hit_count = 0;

  double operator[](Primary p) const { return scores[static_cast<std::size_t>(p)]; }
  double& operator[](Primary p) { return scores[static_cast<std::size_t>(p)]; }

  friend bool operator==(const PrimaryVector&, const PrimaryVector&) = default;
};

// Every affect of every matched token counts once; scores are the counts
// normalized by the total.
inline PrimaryVector score_dialogue(std::string_view dialogue, const EmotionLexicon& lexicon) {
  std::array<std::size_t, kPrimaryCount> counts{};
  std::size_t total = 0;
  for (const auto& token : tokenize(dialogue)) {
    const AffectSet* affects = lexicon.find(token);
    if (!affects) continue;
    for (std::size_t a = 0; a < kPrimaryCount; ++a) {
      if (affects->test(a)) {
        ++counts[a];
        ++total;
      }
    }
  }
  PrimaryVector pv;
  pv.hit_count = total;
  if (total == 0) return pv;
  for (std::size_t a = 0; a < kPrimaryCount; ++a) {
    pv.scores[a] = static_cast<double>(counts[a]) / static_cast<double>(total);
  }
  return pv;
}

struct Dyad {
  std::string_view name;
  Primary first;
  Primary second;
};

// Names and pairings of the 24 primary dyads. Construction validates the
// structure: 24 distinct unordered pairs of distinct primaries, every
// primary in exactly six of them, names drawn from the canonical list.
class DyadTable {
 public:
  explicit DyadTable(std::vector<Dyad> dyads) : dyads_(std::move(dyads)) { validate(); }

  static const DyadTable& standard() {
    using P = Primary;
    static const DyadTable table({
        {"love", P::Joy, P::Trust},
        {"submission", P::Trust, P::Fear},
        {"awe", P::Fear, P::Surprise},
        {"disapproval", P::Surprise, P::Sadness},
        {"remorse", P::Sadness, P::Disgust},
        {"contempt", P::Disgust, P::Anger},
        {"aggression", P::Anger, P::Anticipation},
        {"optimism", P::Anticipation, P::Joy},
        {"guilt", P::Joy, P::Fear},
        {"curiosity", P::Trust, P::Surprise},
        {"despair", P::Fear, P::Sadness},
        {"confined", P::Surprise, P::Disgust},
        {"envy", P::Sadness, P::Anger},
        {"cynicism", P::Disgust, P::Anticipation},
        {"pride", P::Anger, P::Joy},
        {"hope", P::Anticipation, P::Trust},
        {"delight", P::Joy, P::Surprise},
        {"sentimentality", P::Trust, P::Sadness},
        {"shame", P::Fear, P::Disgust},
        {"outrage", P::Surprise, P::Anger},
        {"pessimism", P::Sadness, P::Anticipation},
        {"morbidness", P::Disgust, P::Joy},
        {"dominance", P::Anger, P::Trust},
        {"anxiety", P::Anticipation, P::Fear},
    });
    return table;
  }

  std::span<const Dyad> entries() const noexcept { return dyads_; }
  std::size_t size() const noexcept { return dyads_.size(); }

 private:
  void validate() const {
    if (dyads_.size() != 24) throw Error("dyad table must have 24 entries, has " + std::to_string(dyads_.size()));
    std::array<int, kPrimaryCount> per_primary{};
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::string_view> names;
    for (const auto& d : dyads_) {
      if (d.first == d.second) throw Error("dyad '" + std::string(d.name) + "' pairs a primary with itself");
      const auto idx = emotion_index(d.name);
      if (!idx || parse_primary(d.name)) throw Error("'" + std::string(d.name) + "' is not a dyad name");
      auto a = static_cast<int>(d.first);
      auto b = static_cast<int>(d.second);
      pairs.emplace_back(std::min(a, b), std::max(a, b));
      names.push_back(d.name);
      ++per_primary[static_cast<std::size_t>(a)];
      ++per_primary[static_cast<std::size_t>(b)];
    }
    std::sort(pairs.begin(), pairs.end());
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) throw Error("duplicate dyad pair");
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) throw Error("duplicate dyad name");
    for (std::size_t p = 0; p < kPrimaryCount; ++p) {
      if (per_primary[p] != 6) {
        throw Error(std::string(kPrimaryNames[p]) + " appears in " + std::to_string(per_primary[p]) +
                    " dyads, expected 6");
      }
    }
  }

  std::vector<Dyad> dyads_;
};

// Scores in kEmotionNames order.
struct EmotionVector32 {
  std::array<double, kEmotionCount> scores{};

  double operator[](std::size_t i) const { return scores[i]; }
  double at(std::string_view name) const {
    const auto i = emotion_index(name);
    if (!i) throw Error("unknown emotion '" + std::string(name) + "'");
    return scores[*i];
  }

  friend bool operator==(const EmotionVector32&, const EmotionVector32&) = default;
};

inline EmotionVector32 dyad_expand(const PrimaryVector& pv, const DyadTable& table = DyadTable::standard()) {
  EmotionVector32 v;
  for (std::size_t p = 0; p < kPrimaryCount; ++p) {
    v.scores[emotion_index(static_cast<Primary>(p))] = pv.scores[p];
  }
  for (const auto& d : table.entries()) {
    v.scores[*emotion_index(d.name)] = (pv[d.first] + pv[d.second]) / 2.0;
  }
  return v;
}

// --- sentiment -------------------------------------------------------------

enum class SentimentLabel { Positive, Negative, Neutral };

constexpr std::string_view to_string(SentimentLabel s) {
  switch (s) {
    case SentimentLabel::Positive: return "positive";
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
  }
  return "neutral";
}

// Joy, anticipation, trust and surprise against anger, fear, sadness and
// disgust.
inline SentimentLabel sentiment_of(const PrimaryVector& pv) {
  if (pv.hit_count == 0) return SentimentLabel::Neutral;
  using P = Primary;
  const double pos = pv[P::Joy] + pv[P::Anticipation] + pv[P::Trust] + pv[P::Surprise];
  const double neg = pv[P::Anger] + pv[P::Fear] + pv[P::Sadness] + pv[P::Disgust];
  if (pos > neg) return SentimentLabel::Positive;
  if (neg > pos) return SentimentLabel::Negative;
  return SentimentLabel::Neutral;
}

// Pluggable dialogue-level sentiment source.
class SentimentClassifier {
 public:
  virtual ~SentimentClassifier() = default;
  virtual SentimentLabel classify(std::string_view dialogue) const = 0;
};

class LexiconSentimentClassifier final : public SentimentClassifier {
 public:
  explicit LexiconSentimentClassifier(std::shared_ptr<const EmotionLexicon> lexicon)
      : lexicon_(std::move(lexicon)) {}

  SentimentLabel classify(std::string_view dialogue) const override {
    return sentiment_of(score_dialogue(dialogue, *lexicon_));
  }

 private:
  std::shared_ptr<const EmotionLexicon> lexicon_;
};

template <typename Label>
struct NamedLabeling {
  std::string name;
  std::vector<Label> labels;
};

struct AgreementMatrix {
  std::vector<std::string> names;
  Matrix accuracy;  // symmetric, unit diagonal
};

// Pairwise fraction of positions on which two labelings agree.
template <typename Label>
AgreementMatrix agreement_matrix(std::span<const NamedLabeling<Label>> labelings) {
  AgreementMatrix out;
  const std::size_t m = labelings.size();
  out.accuracy = Matrix(m, m, 1.0);
  if (m == 0) return out;
  const std::size_t len = labelings.front().labels.size();
  if (len == 0) throw LengthError("labelings must be non-empty");
  for (const auto& l : labelings) {
    if (l.labels.size() != len) {
      throw LengthError("labeling '" + l.name + "' has " + std::to_string(l.labels.size()) +
                        " labels, expected " + std::to_string(len));
    }
    out.names.push_back(l.name);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      std::size_t agree = 0;
      for (std::size_t k = 0; k < len; ++k) agree += labelings[i].labels[k] == labelings[j].labels[k];
      const double acc = static_cast<double>(agree) / static_cast<double>(len);
      out.accuracy(i, j) = acc;
      out.accuracy(j, i) = acc;
    }
  }
  return out;
}

// --- per-character aggregation ---------------------------------------------

struct CharacterEmotion {
  EmotionVector32 vector;
  bool no_affect = true;
  std::size_t scored_dialogues = 0;  // dialogues with at least one hit
};

// Mean over dialogues with at least one lexicon hit. The primaries are
// averaged first and the dyads derived from the mean, which equals the mean
// of the per-dialogue 32-vectors because dyads are linear.
inline CharacterEmotion aggregate_character(std::span<const std::string> dialogues, const EmotionLexicon& lexicon,
                                            const DyadTable& table = DyadTable::standard()) {
  PrimaryVector sum;
  std::size_t scored = 0;
  for (const auto& d : dialogues) {
    const auto pv = score_dialogue(d, lexicon);
    if (pv.hit_count == 0) continue;
    ++scored;
    sum.hit_count += pv.hit_count;
    for (std::size_t a = 0; a < kPrimaryCount; ++a) sum.scores[a] += pv.scores[a];
  }
  CharacterEmotion out;
  out.scored_dialogues = scored;
  out.no_affect = scored == 0;
  if (scored == 0) return out;
  for (double& s : sum.scores) s /= static_cast<double>(scored);
  out.vector = dyad_expand(sum, table);
  return out;
}

inline CharacterEmotion aggregate_character(const CharacterRecord& record, const EmotionLexicon& lexicon,
                                            const DyadTable& table = DyadTable::standard()) {
  return aggregate_character(std::span<const std::string>(record.dialogues), lexicon, table);
}

// --- emotions.csv ----------------------------------------------------------

struct EmotionRow {
  std::string movie;
  std::string name;
  Gender gender = Gender::Unknown;
  EmotionVector32 vector;
  bool no_affect = true;
  std::size_t dialogue_count = 0;

  friend bool operator==(const EmotionRow&, const EmotionRow&) = default;
};

inline std::vector<EmotionRow> score_corpus(const Corpus& corpus, const EmotionLexicon& lexicon,
                                            const DyadTable& table = DyadTable::standard()) {
  std::vector<EmotionRow> rows;
  rows.reserve(corpus.records.size());
  for (const auto& r : corpus.records) {
    const auto ce = aggregate_character(r, lexicon, table);
    rows.push_back({r.movie, r.name, r.gender, ce.vector, ce.no_affect, r.dialogues.size()});
  }
  return rows;
}

inline std::string emotions_csv(std::span<const EmotionRow> rows) {
  csv::Writer w;
  csv::Row header{"movie", "name", "gender"};
  for (auto n : kEmotionNames) header.emplace_back(n);
  header.emplace_back("no_affect");
  header.emplace_back("dialogue_count");
  w.row(header);
  for (const auto& r : rows) {
    csv::Row f{r.movie, r.name, std::string(to_string(r.gender))};
    for (double s : r.vector.scores) f.push_back(format_double(s));
    f.emplace_back(r.no_affect ? "1" : "0");
    f.push_back(std::to_string(r.dialogue_count));
    w.row(f);
  }
  return w.str();
}

inline std::vector<EmotionRow> parse_emotions_csv(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty()) throw FormatError("emotions.csv: missing header");
  const auto& header = records.front().fields;
  if (header.size() != 3 + kEmotionCount + 2) throw FormatError("emotions.csv: unexpected column count");
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (header[3 + i] != kEmotionNames[i]) {
      throw FormatError("emotions.csv: column " + std::to_string(3 + i) + " is '" + header[3 + i] +
                        "', expected '" + std::string(kEmotionNames[i]) + "'");
    }
  }
  std::vector<EmotionRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() != header.size()) {
      throw FormatError("emotions.csv line " + std::to_string(records[r].line) + ": wrong field count");
    }
    EmotionRow row;
    row.movie = f[0];
    row.name = f[1];
    const auto g = parse_gender(f[2]);
    if (!g) throw FormatError("emotions.csv line " + std::to_string(records[r].line) + ": bad gender");
    row.gender = *g;
    for (std::size_t i = 0; i < kEmotionCount; ++i) row.vector.scores[i] = parse_double(f[3 + i]);
    row.no_affect = f[3 + kEmotionCount] == "1";
    row.dialogue_count = static_cast<std::size_t>(parse_integer(f[4 + kEmotionCount]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace scriptaffect
