#pragma once

// Joins parsed character dictionaries with sidecar metadata (gender, year)
// into the corpus that every analysis stage consumes.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scriptaffect/csv.hpp"
#include "scriptaffect/errors.hpp"
#include "scriptaffect/parser.hpp"
#include "scriptaffect/util.hpp"

namespace scriptaffect {

enum class Gender { Female, Male, Unknown };

constexpr std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::Female: return "female";
    case Gender::Male: return "male";
    case Gender::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<Gender> parse_gender(std::string_view s) {
  const std::string lower = ascii_lower(trim(s));
  if (lower == "female") return Gender::Female;
  if (lower == "male") return Gender::Male;
  if (lower == "unknown") return Gender::Unknown;
  return std::nullopt;
}

constexpr int kMinYear = 1870;
constexpr int kMaxYear = 2100;

struct CharacterRecord {
  std::string name;
  std::string movie;
  int year = 0;
  Gender gender = Gender::Unknown;
  std::vector<std::string> dialogues;

  friend bool operator==(const CharacterRecord&, const CharacterRecord&) = default;
};

struct Corpus {
  std::vector<CharacterRecord> records;        // sorted by (movie, name)
  std::map<std::string, std::string> provenance;  // movie -> source file

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct CorpusSummary {
  std::size_t characters = 0;
  std::size_t dialogues = 0;
  std::size_t female = 0;
  std::size_t male = 0;
  std::size_t unknown = 0;

  friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

inline CorpusSummary summarize(const Corpus& corpus) {
  CorpusSummary s;
  for (const auto& r : corpus.records) {
    ++s.characters;
    s.dialogues += r.dialogues.size();
    switch (r.gender) {
      case Gender::Female: ++s.female; break;
      case Gender::Male: ++s.male; break;
      case Gender::Unknown: ++s.unknown; break;
    }
  }
  return s;
}

struct MetadataEntry {
  Gender gender = Gender::Unknown;
  int year = 0;

  friend bool operator==(const MetadataEntry&, const MetadataEntry&) = default;
};

// (movie, normalized character name) -> entry
using Metadata = std::map<std::pair<std::string, std::string>, MetadataEntry>;

// Parses "movie,character,gender,year". Character names go through the same
// normalization as screenplay cues so the join is exact. A movie must carry
// one release year across all of its rows.
inline Metadata ingest_metadata(std::string_view csv_text) {
  std::vector<csv::Record> rows;
  try {
    rows = csv::parse(csv_text);
  } catch (const FormatError& e) {
    throw MetadataError(e.what(), 0);
  }
  if (rows.empty()) throw MetadataError("missing header row", 1);
  const auto& header = rows.front();
  const std::array<std::string_view, 4> expected{"movie", "character", "gender", "year"};
  bool header_ok = header.fields.size() == expected.size();
  for (std::size_t i = 0; header_ok && i < expected.size(); ++i) {
    header_ok = ascii_lower(trim(header.fields[i])) == expected[i];
  }
  if (!header_ok) throw MetadataError("header must be 'movie,character,gender,year'", header.line);

  Metadata meta;
  std::map<std::string, int> movie_years;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 4) {
      throw MetadataError("expected 4 fields, found " + std::to_string(row.fields.size()), row.line);
    }
    const std::string movie(trim(row.fields[0]));
    if (movie.empty()) throw MetadataError("empty movie title", row.line);
    std::string name;
    try {
      name = normalize_character_name(row.fields[1]);
    } catch (const NameError& e) {
      throw MetadataError(e.what(), row.line);
    }
    const auto gender = parse_gender(row.fields[2]);
    if (!gender) {
      throw MetadataError("gender must be female, male or unknown, got '" + row.fields[2] + "'", row.line);
    }
    long long year = 0;
    try {
      year = parse_integer(trim(row.fields[3]));
    } catch (const FormatError& e) {
      throw MetadataError(e.what(), row.line);
    }
    if (year < kMinYear || year > kMaxYear) {
      throw MetadataError("year " + std::to_string(year) + " outside [1870, 2100]", row.line);
    }
    auto [it, fresh] = movie_years.emplace(movie, static_cast<int>(year));
    if (!fresh && it->second != year) {
      throw MetadataError("conflicting year for movie '" + movie + "'", row.line);
    }
    if (!meta.emplace(std::pair{movie, name}, MetadataEntry{*gender, static_cast<int>(year)}).second) {
      throw MetadataError("duplicate row for (" + movie + ", " + name + ")", row.line);
    }
  }
  return meta;
}

// Builds one record per character. Characters without a metadata row get
// Gender::Unknown and the movie's year; a movie with no rows at all is an
// error.
inline Corpus assemble_corpus(const MovieDictionaries& dicts, const Metadata& meta,
                              std::map<std::string, std::string> provenance = {}) {
  std::map<std::string, int> movie_years;
  for (const auto& [key, entry] : meta) movie_years.emplace(key.first, entry.year);

  Corpus corpus;
  for (const auto& [movie, dict] : dicts) {
    auto year_it = movie_years.find(movie);
    if (year_it == movie_years.end()) {
      throw AssemblyError("no metadata rows for movie '" + movie + "'");
    }
    for (const auto& [name, lines] : dict) {
      CharacterRecord rec{name, movie, year_it->second, Gender::Unknown, lines};
      if (auto it = meta.find({movie, name}); it != meta.end()) rec.gender = it->second.gender;
      corpus.records.push_back(std::move(rec));
    }
  }
  for (const auto& [movie, _] : dicts) {
    if (auto it = provenance.find(movie); it != provenance.end()) corpus.provenance.emplace(movie, it->second);
  }
  return corpus;
}

// --- JSON ------------------------------------------------------------------

inline std::string to_json(const Corpus& corpus) {
  using ojson = nlohmann::ordered_json;
  const auto s = summarize(corpus);
  ojson j;
  j["summary"] = {{"characters", s.characters}, {"dialogues", s.dialogues},
                  {"female", s.female},         {"male", s.male},
                  {"unknown", s.unknown}};
  j["provenance"] = ojson::object();
  for (const auto& [movie, file] : corpus.provenance) j["provenance"][movie] = file;
  j["records"] = ojson::array();
  for (const auto& r : corpus.records) {
    j["records"].push_back({{"movie", r.movie},
                            {"name", r.name},
                            {"year", r.year},
                            {"gender", std::string(to_string(r.gender))},
                            {"dialogues", r.dialogues}});
  }
  return j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

inline Corpus corpus_from_json(std::string_view text) {
  Corpus corpus;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("provenance")) {
      corpus.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
    }
    for (const auto& r : j.at("records")) {
      CharacterRecord rec;
      rec.movie = r.at("movie").get<std::string>();
      rec.name = r.at("name").get<std::string>();
      rec.year = r.at("year").get<int>();
      const auto g = parse_gender(r.at("gender").get<std::string>());
      if (!g) throw FormatError("corpus.json: bad gender for " + rec.name);
      rec.gender = *g;
      rec.dialogues = r.at("dialogues").get<std::vector<std::string>>();
      corpus.records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corpus.json: ") + e.what());
  }
  return corpus;
}

}  // namespace scriptaffect
