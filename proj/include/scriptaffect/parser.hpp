#pragma once

// Screenplay parsing: positioned text blocks are classified by their left
// offset into scene headings, action, character cues, parentheticals and
// dialogue, then folded into a per-character dictionary of speeches.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "scriptaffect/errors.hpp"
#include "scriptaffect/utf8.hpp"
#include "scriptaffect/util.hpp"

namespace scriptaffect {

struct RawBlock {
  std::string text;
  int left = 0;            // columns (plain text) or pixels (positional)
  std::size_t order = 0;   // strictly increasing document position

  friend bool operator==(const RawBlock&, const RawBlock&) = default;
};

enum class BlockKind { SceneHeading, Action, CharacterCue, Dialogue, Parenthetical, Other };

constexpr std::string_view to_string(BlockKind k) {
  switch (k) {
    case BlockKind::SceneHeading: return "scene_heading";
    case BlockKind::Action: return "action";
    case BlockKind::CharacterCue: return "character_cue";
    case BlockKind::Dialogue: return "dialogue";
    case BlockKind::Parenthetical: return "parenthetical";
    case BlockKind::Other: return "other";
  }
  return "other";
}

struct IndentProfile {
  int action_indent = 0;
  int dialogue_indent = 0;
  int cue_indent = 0;

  friend bool operator==(const IndentProfile&, const IndentProfile&) = default;
};

enum class InputMode { PlainText, Positional };

// Half-width of the window around each profile level. Centered cues are
// ragged by a column or two in typed scripts and by a few pixels in
// HTML extractions.
constexpr int default_tolerance(InputMode mode) { return mode == InputMode::PlainText ? 2 : 8; }

struct ClassifiedBlock {
  RawBlock block;
  BlockKind kind = BlockKind::Other;
};

// Character name -> speeches in document order. std::map keeps the JSON
// serialization sorted by key.
using CharacterDictionary = std::map<std::string, std::vector<std::string>>;

// Movie title -> that movie's dictionary.
using MovieDictionaries = std::map<std::string, CharacterDictionary>;

// --- input readers ---------------------------------------------------------

// One block per non-blank line. `left` counts leading spaces with tabs
// expanded to the next multiple of 8; `order` is the 0-based line index.
inline std::vector<RawBlock> read_plain_text(std::string_view text) {
  std::vector<RawBlock> blocks;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    int col = 0;
    std::size_t pos = 0;
    for (; pos < line.size(); ++pos) {
      if (line[pos] == ' ') {
        ++col;
      } else if (line[pos] == '\t') {
        col = (col / 8 + 1) * 8;
      } else {
        break;
      }
    }
    auto body = trim(std::string_view(line).substr(pos));
    if (body.empty()) continue;
    blocks.push_back({std::string(body), col, i});
  }
  return blocks;
}

// JSON-lines, one {"text", "left", "top"} object per element, optionally
// with "page". Blocks are re-sorted by (page, top) and renumbered.
inline std::vector<RawBlock> read_positional(std::string_view jsonl) {
  struct Positioned {
    long long page;
    double top;
    std::size_t line;
    RawBlock block;
  };
  std::vector<Positioned> items;
  const auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto body = trim(lines[i]);
    if (body.empty()) continue;
    const std::string where = "positional input line " + std::to_string(i + 1);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string() ||
        !obj.contains("left") || !obj["left"].is_number() || !obj.contains("top") ||
        !obj["top"].is_number()) {
      throw FormatError(where + ": expected {\"text\": string, \"left\": integer, \"top\": number}");
    }
    const double left = obj["left"].get<double>();
    if (left < 0) throw FormatError(where + ": negative left offset");
    long long page = 0;
    if (obj.contains("page")) {
      if (!obj["page"].is_number_integer()) throw FormatError(where + ": page must be an integer");
      page = obj["page"].get<long long>();
    }
    auto text = trim(obj["text"].get_ref<const std::string&>());
    if (text.empty()) continue;
    items.push_back({page, obj["top"].get<double>(), i,
                     RawBlock{std::string(text), static_cast<int>(left + 0.5), 0}});
  }
  std::stable_sort(items.begin(), items.end(), [](const Positioned& a, const Positioned& b) {
    return std::tie(a.page, a.top) < std::tie(b.page, b.top);
  });
  std::vector<RawBlock> blocks;
  blocks.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].block.order = i;
    blocks.push_back(std::move(items[i].block));
  }
  return blocks;
}

// --- classification --------------------------------------------------------

// The three most frequent left offsets, ascending, become action, dialogue
// and cue levels. Frequency ties prefer the smaller offset. With a non-zero
// `merge_within`, an offset that lies that close to a more frequent one adds
// its count to it instead of competing (ragged centering of cues).
inline IndentProfile infer_indent_profile(std::span<const RawBlock> blocks, int merge_within = 0) {
  std::map<int, std::size_t> histogram;
  for (const auto& b : blocks) ++histogram[b.left];
  if (histogram.size() < 3) {
    throw ProfileError("need at least 3 distinct indentation levels, found " +
                       std::to_string(histogram.size()));
  }
  std::vector<std::pair<int, std::size_t>> ranked(histogram.begin(), histogram.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::pair<int, std::size_t>> groups;
  for (const auto& [left, count] : ranked) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return std::abs(g.first - left) <= merge_within; });
    if (it == groups.end()) {
      groups.emplace_back(left, count);
    } else {
      it->second += count;
    }
  }
  if (groups.size() < 3) {
    throw ProfileError("need at least 3 separated indentation levels, found " + std::to_string(groups.size()));
  }
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::array<int, 3> top{groups[0].first, groups[1].first, groups[2].first};
  std::sort(top.begin(), top.end());
  return {top[0], top[1], top[2]};
}

namespace detail {

inline bool is_all_caps(std::string_view text) {
  bool has_letter = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::next(text, pos);
    if (!utf8::is_letter(cp)) continue;
    has_letter = true;
    if ((cp >= 'a' && cp <= 'z') || (cp >= 0xDF && cp <= 0xFF && cp != 0xF7)) return false;
    if (utf8::to_lower(cp) == cp && cp >= 0x100 && cp <= 0x52F) return false;
  }
  return has_letter;
}

inline bool is_wrapped_in_parens(std::string_view text) {
  return text.size() >= 2 && text.front() == '(' && text.back() == ')';
}

inline bool is_slugline(std::string_view text) {
  const std::string upper = ascii_upper(text.substr(0, std::min<std::size_t>(text.size(), 9)));
  for (std::string_view prefix : {"INT./EXT.", "INT/EXT", "I/E.", "INT.", "EXT."}) {
    if (std::string_view(upper).starts_with(prefix)) return true;
  }
  return false;
}

}  // namespace detail

// Every input block appears exactly once in the output, in input order.
inline std::vector<ClassifiedBlock> classify_blocks(std::span<const RawBlock> blocks,
                                                    const IndentProfile& profile,
                                                    int tolerance = default_tolerance(InputMode::PlainText)) {
  enum class Level { None, Action, Dialogue, Cue };
  auto nearest_level = [&](int left) {
    Level best = Level::None;
    int best_dist = tolerance + 1;
    for (auto [level, indent] : {std::pair{Level::Action, profile.action_indent},
                                 std::pair{Level::Dialogue, profile.dialogue_indent},
                                 std::pair{Level::Cue, profile.cue_indent}}) {
      const int d = std::abs(left - indent);
      if (d < best_dist) {
        best = level;
        best_dist = d;
      }
    }
    return best;
  };

  std::vector<ClassifiedBlock> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    BlockKind kind = BlockKind::Other;
    switch (nearest_level(b.left)) {
      case Level::Cue:
        if (detail::is_all_caps(b.text)) kind = BlockKind::CharacterCue;
        break;
      case Level::Dialogue:
        kind = detail::is_wrapped_in_parens(b.text) ? BlockKind::Parenthetical : BlockKind::Dialogue;
        break;
      case Level::Action:
        kind = detail::is_slugline(b.text) ? BlockKind::SceneHeading : BlockKind::Action;
        break;
      case Level::None:
        // Many scripts indent parentheticals between the dialogue and cue columns.
        if (detail::is_wrapped_in_parens(b.text) && b.left > profile.dialogue_indent &&
            b.left < profile.cue_indent) {
          kind = BlockKind::Parenthetical;
        }
        break;
    }
    out.push_back({b, kind});
  }
  return out;
}

// --- names and dictionaries ------------------------------------------------

// Uppercases, removes every "(...)" group (an unclosed one runs to the end)
// and trailing bare extension markers, then trims and collapses whitespace.
inline std::string normalize_character_name(std::string_view raw) {
  std::string stripped;
  int depth = 0;
  for (char c : raw) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth > 0) --depth;
      stripped += ' ';
    } else if (depth == 0) {
      stripped += c;
    }
  }

  std::string upper;
  std::size_t pos = 0;
  while (pos < stripped.size()) {
    char32_t cp = utf8::next(stripped, pos);
    if (cp >= 'a' && cp <= 'z') cp -= 32;
    else if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) cp -= 32;
    else if (cp == 0x2019) cp = '\'';
    utf8::append(upper, cp);
  }

  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < upper.size()) {
    while (i < upper.size() && std::isspace(static_cast<unsigned char>(upper[i]))) ++i;
    std::size_t j = i;
    while (j < upper.size() && !std::isspace(static_cast<unsigned char>(upper[j]))) ++j;
    if (j > i) words.emplace_back(upper.substr(i, j - i));
    i = j;
  }
  while (!words.empty()) {
    const std::string& w = words.back();
    if (w == "V.O." || w == "O.S." || w == "O.C." || w == "CONT'D" || w == "CONT'D." ||
        w == "CONT." || w == "CONT") {
      words.pop_back();
    } else {
      break;
    }
  }
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  if (out.empty()) throw NameError("character name '" + std::string(raw) + "' is empty after normalization");
  return out;
}

// A cue opens a speech; following Dialogue blocks are joined with single
// spaces. Parentheticals are skipped without closing the speech. Any other
// block closes it, so dialogue without a preceding cue is discarded.
inline CharacterDictionary build_character_dictionary(std::span<const ClassifiedBlock> classified) {
  CharacterDictionary dict;
  std::optional<std::string> speaker;
  std::string speech;

  auto flush = [&] {
    if (speaker && !speech.empty()) dict[*speaker].push_back(std::move(speech));
    speech.clear();
  };

  for (const auto& cb : classified) {
    switch (cb.kind) {
      case BlockKind::CharacterCue:
        flush();
        try {
          speaker = normalize_character_name(cb.block.text);
        } catch (const NameError&) {
          speaker.reset();
        }
        break;
      case BlockKind::Dialogue:
        if (speaker) {
          if (!speech.empty()) speech += ' ';
          speech += cb.block.text;
        }
        break;
      case BlockKind::Parenthetical:
        break;
      default:
        flush();
        speaker.reset();
    }
  }
  flush();
  return dict;
}

inline CharacterDictionary filter_min_dialogues(const CharacterDictionary& dict, std::size_t threshold = 5) {
  CharacterDictionary out;
  for (const auto& [name, lines] : dict) {
    if (lines.size() >= threshold) out.emplace(name, lines);
  }
  return out;
}

struct ParsedScript {
  IndentProfile profile;
  std::vector<ClassifiedBlock> blocks;
  CharacterDictionary characters;  // before the minimum-dialogue filter
};

inline ParsedScript parse_script(std::string_view content, InputMode mode) {
  const auto raw = mode == InputMode::PlainText ? read_plain_text(content) : read_positional(content);
  ParsedScript out;
  out.profile = infer_indent_profile(raw, default_tolerance(mode));
  out.blocks = classify_blocks(raw, out.profile, default_tolerance(mode));
  out.characters = build_character_dictionary(out.blocks);
  return out;
}

// --- JSON ------------------------------------------------------------------

inline std::string dump_json(const nlohmann::json& j) {
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

inline std::string to_json(const CharacterDictionary& dict) { return dump_json(nlohmann::json(dict)); }

inline std::string to_json(const MovieDictionaries& movies) { return dump_json(nlohmann::json(movies)); }

inline CharacterDictionary character_dictionary_from_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text).get<CharacterDictionary>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("character dictionary: ") + e.what());
  }
}

inline MovieDictionaries movie_dictionaries_from_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text).get<MovieDictionaries>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("characters.json: ") + e.what());
  }
}

}  // namespace scriptaffect
