#pragma once

// End-to-end orchestration. Each stage reads the persisted artifacts of the
// stages before it from the output directory and writes its own, so any
// stage can be rerun in isolation; run_pipeline is the six stages in order
// followed by report.json.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scriptaffect/clustering.hpp"
#include "scriptaffect/corpus.hpp"
#include "scriptaffect/emotion.hpp"
#include "scriptaffect/errors.hpp"
#include "scriptaffect/lexical.hpp"
#include "scriptaffect/parser.hpp"
#include "scriptaffect/projection.hpp"
#include "scriptaffect/stats.hpp"
#include "scriptaffect/util.hpp"

namespace scriptaffect {

inline constexpr std::string_view kVersion = "0.1.0";

namespace fs = std::filesystem;

enum class TestUnit { Dialogue, Character };

struct RunConfig {
  fs::path script_dir;
  fs::path metadata_path;
  fs::path lexicon_path;
  fs::path nouns_path;
  fs::path stopwords_path;
  fs::path output_dir = "out";
  std::size_t min_dialogues = 5;
  std::optional<std::size_t> k;  // empty = elbow
  std::size_t k_max = 10;
  std::uint64_t seed = 42;
  double perplexity = 30.0;
  std::size_t tsne_iterations = 1000;
  int bin_years = 5;
  TestUnit test_unit = TestUnit::Dialogue;
  std::size_t top_words = 50;
  bool strict = false;
};

// A failure inside one stage, tagged with the stage and the file involved.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& file, const std::string& what)
      : Error("[" + stage + "] " + (file.empty() ? "" : file + ": ") + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// --- config file -----------------------------------------------------------

// `key = value` lines; '#' comments and [section] headers are ignored and
// values may be quoted. Relative paths resolve against the file's directory.
inline void apply_config_text(RunConfig& cfg, std::string_view text, const fs::path& base_dir = {}) {
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#' || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(i + 1) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    } else if (const auto hash = value.find(" #"); hash != std::string::npos) {
      value = std::string(trim(value.substr(0, hash)));
    }
    auto path = [&] { return base_dir.empty() ? fs::path(value) : base_dir / value; };
    auto count = [&]() -> std::size_t {
      try {
        const auto v = parse_integer(value);
        if (v < 0) throw FormatError("negative");
        return static_cast<std::size_t>(v);
      } catch (const FormatError&) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
      }
    };
    if (key == "script_dir" || key == "scripts") cfg.script_dir = path();
    else if (key == "metadata_path" || key == "metadata") cfg.metadata_path = path();
    else if (key == "lexicon_path" || key == "lexicon") cfg.lexicon_path = path();
    else if (key == "nouns_path" || key == "nouns") cfg.nouns_path = path();
    else if (key == "stopwords_path" || key == "stopwords") cfg.stopwords_path = path();
    else if (key == "output_dir" || key == "out") cfg.output_dir = path();
    else if (key == "min_dialogues") cfg.min_dialogues = count();
    else if (key == "k") cfg.k = value == "auto" ? std::nullopt : std::optional<std::size_t>(count());
    else if (key == "k_max") cfg.k_max = count();
    else if (key == "seed") cfg.seed = count();
    else if (key == "tsne_iterations") cfg.tsne_iterations = count();
    else if (key == "bin_years") cfg.bin_years = static_cast<int>(count());
    else if (key == "top_words") cfg.top_words = count();
    else if (key == "perplexity") {
      try {
        cfg.perplexity = parse_double(value);
      } catch (const FormatError&) {
        throw ConfigError("config key 'perplexity': expected a number, got '" + value + "'");
      }
    } else if (key == "test_unit") {
      if (value == "dialogue") cfg.test_unit = TestUnit::Dialogue;
      else if (value == "character") cfg.test_unit = TestUnit::Character;
      else throw ConfigError("test_unit must be 'dialogue' or 'character'");
    } else if (key == "strict") {
      cfg.strict = value == "true" || value == "1";
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

inline void validate_numbers(const RunConfig& cfg) {
  if (cfg.bin_years < 1) throw ConfigError("bin_years must be at least 1");
  if (!(cfg.perplexity > 0.0)) throw ConfigError("perplexity must be positive");
  if (cfg.k && *cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.k_max < 1) throw ConfigError("k_max must be at least 1");
  if (cfg.top_words < 1) throw ConfigError("top_words must be at least 1");
}

// --- artifacts -------------------------------------------------------------

namespace artifact {
inline constexpr const char* kCharacters = "characters.json";
inline constexpr const char* kCorpus = "corpus.json";
inline constexpr const char* kEmotions = "emotions.csv";
inline constexpr const char* kStats = "stats.csv";
inline constexpr const char* kTimebins = "timebins.csv";
inline constexpr const char* kClusters = "clusters.csv";
inline constexpr const char* kComposition = "composition.csv";
inline constexpr const char* kSseCurve = "ssecurve.csv";
inline constexpr const char* kTsne = "tsne.csv";
inline constexpr const char* kTsneSvg = "tsne.svg";
inline constexpr const char* kWordfreq = "wordfreq.csv";
inline constexpr const char* kReport = "report.json";
}  // namespace artifact

namespace detail {

inline void require_file(const std::string& stage, const fs::path& p, const char* what) {
  if (p.empty()) throw StageError(stage, "", std::string("no ") + what + " configured");
  if (!fs::exists(p)) throw StageError(stage, p.string(), std::string(what) + " does not exist");
}

inline std::string read_input(const std::string& stage, const fs::path& p, const char* what) {
  require_file(stage, p, what);
  try {
    return read_file(p.string());
  } catch (const Error& e) {
    throw StageError(stage, p.string(), e.what());
  }
}

inline void write_output(const RunConfig& cfg, const char* name, std::string_view content) {
  fs::create_directories(cfg.output_dir);
  write_file((cfg.output_dir / name).string(), content);
}

inline std::vector<fs::path> script_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".txt" || ext == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Configured source files whose modification should invalidate artifacts.
inline std::vector<fs::path> sources(const RunConfig& cfg) {
  std::vector<fs::path> out;
  if (!cfg.script_dir.empty() && fs::is_directory(cfg.script_dir)) {
    for (auto& f : script_files(cfg.script_dir)) out.push_back(f);
  }
  for (const auto& p : {cfg.metadata_path, cfg.lexicon_path}) {
    if (!p.empty() && fs::exists(p)) out.push_back(p);
  }
  return out;
}

inline void check_fresh(const RunConfig& cfg, const std::string& stage, std::initializer_list<const char*> inputs) {
  const auto srcs = sources(cfg);
  if (srcs.empty()) return;
  fs::path newest = srcs.front();
  for (const auto& s : srcs) {
    if (fs::last_write_time(s) > fs::last_write_time(newest)) newest = s;
  }
  for (const char* name : inputs) {
    const auto p = cfg.output_dir / name;
    if (!fs::exists(p)) continue;
    if (fs::last_write_time(p) < fs::last_write_time(newest)) {
      const std::string msg = "[" + stage + "] " + p.string() + " is older than source " + newest.string() +
                              "; rerun the earlier stages";
      if (cfg.strict) throw StaleInputError(msg);
      std::cerr << "warning: " << msg << "\n";
    }
  }
}

struct EmotionMatrix {
  std::vector<EmotionRow> rows;  // rows with affect evidence only
  Matrix points;
  std::vector<Gender> genders;
  std::size_t excluded = 0;
};

inline EmotionMatrix load_affect_rows(const RunConfig& cfg, const std::string& stage) {
  const auto path = cfg.output_dir / artifact::kEmotions;
  std::vector<EmotionRow> all;
  try {
    all = parse_emotions_csv(read_input(stage, path, "emotions.csv (run 'score' first)"));
  } catch (const FormatError& e) {
    throw StageError(stage, path.string(), e.what());
  }
  EmotionMatrix m;
  std::vector<std::vector<double>> rows;
  for (auto& r : all) {
    if (r.no_affect) {
      ++m.excluded;
      continue;
    }
    rows.emplace_back(r.vector.scores.begin(), r.vector.scores.end());
    m.genders.push_back(r.gender);
    m.rows.push_back(std::move(r));
  }
  m.points = Matrix::from_rows(rows);
  return m;
}

inline Corpus load_corpus(const RunConfig& cfg, const std::string& stage) {
  const auto path = cfg.output_dir / artifact::kCorpus;
  try {
    return corpus_from_json(read_input(stage, path, "corpus.json (run 'parse' first)"));
  } catch (const FormatError& e) {
    throw StageError(stage, path.string(), e.what());
  }
}

inline EmotionLexicon load_lexicon_file(const RunConfig& cfg, const std::string& stage) {
  const auto text = read_input(stage, cfg.lexicon_path, "lexicon");
  try {
    auto lex = load_lexicon(text);
    if (lex.skipped_phrases > 0) {
      std::cerr << "warning: lexicon: skipped " << lex.skipped_phrases << " multi-word entries\n";
    }
    return lex;
  } catch (const LexiconError& e) {
    throw StageError(stage, cfg.lexicon_path.string(), e.what());
  }
}

}  // namespace detail

// --- stage outcomes ----------------------------------------------------------

struct ParseOutcome {
  MovieDictionaries characters;
  CorpusSummary summary;
  std::size_t dropped_characters = 0;  // below min_dialogues
};

struct ScoreOutcome {
  std::size_t rows = 0;
  std::size_t no_affect = 0;
};

struct StatsOutcome {
  std::vector<EmotionTestRow> tests;
  std::vector<TimeBinRow> timebins;
  TestUnit unit = TestUnit::Dialogue;
  std::size_t observations = 0;
};

struct ClusterOutcome {
  std::vector<SsePoint> curve;
  std::size_t k = 0;
  bool k_auto = true;
  std::size_t excluded_no_affect = 0;
  std::vector<EmotionRow> rows;
  std::vector<std::size_t> kmeans_assignments;
  std::vector<std::size_t> ward_assignments;
  std::vector<CompositionRow> kmeans_composition;
  std::vector<CompositionRow> ward_composition;
  double kmeans_sse = 0.0;
};

struct ProjectOutcome {
  std::vector<EmotionRow> rows;
  Embedding2D embedding;
};

struct WordsOutcome {
  std::map<std::string, std::vector<RankedWord>> exclusive;
};

// --- stages ------------------------------------------------------------------

inline ParseOutcome stage_parse(const RunConfig& cfg) {
  const std::string stage = "parse";
  if (cfg.script_dir.empty() || !fs::is_directory(cfg.script_dir)) {
    throw StageError(stage, cfg.script_dir.string(), "script directory does not exist");
  }
  const Metadata meta = [&] {
    const auto text = detail::read_input(stage, cfg.metadata_path, "metadata file");
    try {
      return ingest_metadata(text);
    } catch (const MetadataError& e) {
      throw StageError(stage, cfg.metadata_path.string(), e.what());
    }
  }();

  ParseOutcome out;
  std::map<std::string, std::string> provenance;
  const auto files = detail::script_files(cfg.script_dir);
  if (files.empty()) throw StageError(stage, cfg.script_dir.string(), "no .txt or .jsonl scripts found");
  for (const auto& file : files) {
    const std::string movie = file.stem().string();
    if (out.characters.contains(movie)) throw StageError(stage, file.string(), "duplicate movie title '" + movie + "'");
    const auto mode = file.extension() == ".jsonl" ? InputMode::Positional : InputMode::PlainText;
    try {
      const auto parsed = parse_script(read_file(file.string()), mode);
      auto kept = filter_min_dialogues(parsed.characters, cfg.min_dialogues);
      out.dropped_characters += parsed.characters.size() - kept.size();
      out.characters.emplace(movie, std::move(kept));
    } catch (const Error& e) {
      throw StageError(stage, file.string(), e.what());
    }
    provenance.emplace(movie, file.filename().string());
  }
  Corpus corpus;
  try {
    corpus = assemble_corpus(out.characters, meta, provenance);
  } catch (const AssemblyError& e) {
    throw StageError(stage, cfg.metadata_path.string(), e.what());
  }
  out.summary = summarize(corpus);
  detail::write_output(cfg, artifact::kCharacters, to_json(out.characters));
  detail::write_output(cfg, artifact::kCorpus, to_json(corpus));
  return out;
}

inline ScoreOutcome stage_score(const RunConfig& cfg) {
  const std::string stage = "score";
  detail::check_fresh(cfg, stage, {artifact::kCorpus});
  const auto corpus = detail::load_corpus(cfg, stage);
  const auto lexicon = detail::load_lexicon_file(cfg, stage);
  const auto rows = score_corpus(corpus, lexicon);
  ScoreOutcome out;
  out.rows = rows.size();
  for (const auto& r : rows) out.no_affect += r.no_affect;
  detail::write_output(cfg, artifact::kEmotions, emotions_csv(rows));
  return out;
}

inline StatsOutcome stage_stats(const RunConfig& cfg) {
  const std::string stage = "stats";
  detail::check_fresh(cfg, stage, {artifact::kCorpus, artifact::kEmotions});
  const auto corpus = detail::load_corpus(cfg, stage);
  StatsOutcome out;
  out.unit = cfg.test_unit;

  Matrix values;
  std::vector<Gender> genders;
  if (cfg.test_unit == TestUnit::Dialogue) {
    const auto lexicon = detail::load_lexicon_file(cfg, stage);
    std::vector<std::vector<double>> rows;
    for (const auto& r : corpus.records) {
      if (r.gender == Gender::Unknown) continue;
      for (const auto& d : r.dialogues) {
        const auto pv = score_dialogue(d, lexicon);
        if (pv.hit_count == 0) continue;
        const auto v = dyad_expand(pv);
        rows.emplace_back(v.scores.begin(), v.scores.end());
        genders.push_back(r.gender);
      }
    }
    values = Matrix::from_rows(rows);
  } else {
    auto m = detail::load_affect_rows(cfg, stage);
    values = std::move(m.points);
    genders = std::move(m.genders);
  }
  out.observations = genders.size();
  try {
    out.tests = emotion_test_battery(values, genders);
  } catch (const Error& e) {
    throw StageError(stage, "", e.what());
  }
  out.timebins = gender_distribution_over_time(corpus, cfg.bin_years);
  detail::write_output(cfg, artifact::kStats, stats_csv(out.tests));
  detail::write_output(cfg, artifact::kTimebins, timebins_csv(out.timebins));
  return out;
}

inline ClusterOutcome stage_cluster(const RunConfig& cfg) {
  const std::string stage = "cluster";
  detail::check_fresh(cfg, stage, {artifact::kEmotions});
  auto m = detail::load_affect_rows(cfg, stage);
  ClusterOutcome out;
  out.excluded_no_affect = m.excluded;
  const std::size_t n = m.rows.size();
  if (n < 2) throw StageError(stage, "", "need at least 2 characters with affect evidence to cluster");

  try {
    out.curve = sse_curve(m.points, 1, std::min(cfg.k_max, n), cfg.seed);
    out.k_auto = !cfg.k.has_value();
    out.k = cfg.k ? *cfg.k : elbow_detect(out.curve);
    if (out.k > n) throw DimensionError("k=" + std::to_string(out.k) + " exceeds the " + std::to_string(n) + " characters");
    const auto km = kmeans_best(m.points, out.k, cfg.seed);
    const auto ward = ward_cluster(m.points, out.k);
    out.kmeans_assignments = km.assignments;
    out.kmeans_sse = km.sse;
    out.ward_assignments = ward.assignments;
  } catch (const Error& e) {
    throw StageError(stage, "", e.what());
  }
  const auto totals = gender_totals(m.genders);
  out.kmeans_composition = composition_audit(out.kmeans_assignments, m.genders, totals);
  out.ward_composition = composition_audit(out.ward_assignments, m.genders, totals);

  csv::Writer clusters;
  clusters.row({"movie", "name", "gender", "kmeans_cluster", "ward_cluster"});
  for (std::size_t i = 0; i < n; ++i) {
    clusters.row({m.rows[i].movie, m.rows[i].name, std::string(to_string(m.rows[i].gender)),
                  std::to_string(out.kmeans_assignments[i]), std::to_string(out.ward_assignments[i])});
  }
  csv::Writer composition;
  composition.row(composition_header());
  append_composition_csv(composition, "kmeans", out.kmeans_composition);
  append_composition_csv(composition, "ward", out.ward_composition);

  detail::write_output(cfg, artifact::kClusters, clusters.str());
  detail::write_output(cfg, artifact::kComposition, composition.str());
  detail::write_output(cfg, artifact::kSseCurve, ssecurve_csv(out.curve));
  out.rows = std::move(m.rows);
  return out;
}

inline ProjectOutcome stage_project(const RunConfig& cfg) {
  const std::string stage = "project";
  detail::check_fresh(cfg, stage, {artifact::kEmotions});
  auto m = detail::load_affect_rows(cfg, stage);
  ProjectOutcome out;
  TsneConfig tc;
  tc.perplexity = cfg.perplexity;
  tc.seed = cfg.seed;
  tc.iterations = cfg.tsne_iterations;
  try {
    out.embedding = tsne(m.points, tc);
  } catch (const Error& e) {
    throw StageError(stage, "", e.what());
  }
  csv::Writer w;
  w.row({"movie", "name", "gender", "x", "y"});
  std::vector<std::size_t> groups;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const auto& r = m.rows[i];
    w.row({r.movie, r.name, std::string(to_string(r.gender)), format_double(out.embedding.coords(i, 0)),
           format_double(out.embedding.coords(i, 1))});
    groups.push_back(static_cast<std::size_t>(r.gender));
    labels.push_back(r.name + " (" + r.movie + ")");
  }
  // Palette indexed by Gender: female, male, unknown.
  const std::vector<std::string> palette{"#d62728", "#1f77b4", "#7f7f7f"};
  detail::write_output(cfg, artifact::kTsne, w.str());
  detail::write_output(cfg, artifact::kTsneSvg, scatter_svg(out.embedding.coords, groups, palette, labels));
  out.rows = std::move(m.rows);
  return out;
}

inline WordsOutcome stage_words(const RunConfig& cfg) {
  const std::string stage = "words";
  detail::check_fresh(cfg, stage, {artifact::kCorpus});
  const auto corpus = detail::load_corpus(cfg, stage);
  const auto nouns = load_word_list(detail::read_input(stage, cfg.nouns_path, "noun list"));
  if (nouns.empty()) throw StageError(stage, cfg.nouns_path.string(), "noun list is empty");
  const auto stopwords = load_word_list(detail::read_input(stage, cfg.stopwords_path, "stopword list"));
  WordsOutcome out;
  out.exclusive = exclusive_nouns(group_frequencies(corpus, stopwords), nouns, cfg.top_words);
  detail::write_output(cfg, artifact::kWordfreq, wordfreq_csv(out.exclusive));
  return out;
}

// --- report ------------------------------------------------------------------

struct AnalysisReport {
  RunConfig config;
  ParseOutcome parse;
  ScoreOutcome score;
  StatsOutcome stats;
  ClusterOutcome cluster;
  ProjectOutcome project;
  WordsOutcome words;
  std::string generated_at;
};

inline std::vector<std::string> report_artifacts() {
  using namespace artifact;
  return {kCharacters, kCorpus, kEmotions, kStats, kTimebins, kClusters, kComposition,
          kSseCurve,   kTsne,   kTsneSvg,  kWordfreq, kReport};
}

inline nlohmann::ordered_json report_json(const AnalysisReport& r) {
  using ojson = nlohmann::ordered_json;
  auto num = [](double v) -> ojson {
    if (std::isfinite(v)) return v;
    return format_double(v);
  };
  auto composition = [&](const std::vector<CompositionRow>& rows) {
    ojson arr = ojson::array();
    for (const auto& c : rows) {
      arr.push_back({{"cluster", c.cluster},       {"female", c.female},
                     {"male", c.male},             {"unknown", c.unknown},
                     {"ratio", num(c.ratio)},      {"expected_female", c.expected_female},
                     {"deviation", c.deviation}});
    }
    return arr;
  };

  ojson j;
  j["run"] = {{"version", std::string(kVersion)},
              {"generated_at", r.generated_at},
              {"seed", r.config.seed},
              {"min_dialogues", r.config.min_dialogues},
              {"perplexity", r.config.perplexity},
              {"bin_years", r.config.bin_years},
              {"test_unit", r.config.test_unit == TestUnit::Dialogue ? "dialogue" : "character"}};
  const auto& s = r.parse.summary;
  j["corpus"] = {{"movies", r.parse.characters.size()},
                 {"characters", s.characters},
                 {"dialogues", s.dialogues},
                 {"female", s.female},
                 {"male", s.male},
                 {"unknown", s.unknown},
                 {"dropped_below_min_dialogues", r.parse.dropped_characters},
                 {"no_affect_characters", r.score.no_affect}};

  ojson tests = ojson::array();
  for (const auto& t : r.stats.tests) {
    ojson row = {{"emotion", t.emotion}, {"higher_group", t.higher_group}};
    if (t.result) {
      row["u1"] = t.result->u1;
      row["u2"] = t.result->u2;
      row["z"] = t.result->z;
      row["p_value"] = t.result->p_value;
      row["n1"] = t.result->n1;
      row["n2"] = t.result->n2;
    }
    tests.push_back(row);
  }
  j["mann_whitney"] = {{"observations", r.stats.observations}, {"rows", tests}};

  ojson bins = ojson::array();
  for (const auto& b : r.stats.timebins) {
    bins.push_back({{"bin_start", b.bin_start},
                    {"bin_end", b.bin_end},
                    {"female", b.female},
                    {"male", b.male},
                    {"unknown", b.unknown},
                    {"female_pct", b.female_pct}});
  }
  j["timebins"] = bins;

  ojson curve = ojson::array();
  for (const auto& p : r.cluster.curve) curve.push_back({{"k", p.k}, {"sse", p.sse}});
  ojson assignments = ojson::array();
  for (std::size_t i = 0; i < r.cluster.rows.size(); ++i) {
    const auto& row = r.cluster.rows[i];
    assignments.push_back({{"movie", row.movie},
                           {"name", row.name},
                           {"gender", std::string(to_string(row.gender))},
                           {"kmeans", r.cluster.kmeans_assignments[i]},
                           {"ward", r.cluster.ward_assignments[i]}});
  }
  j["clustering"] = {{"k", r.cluster.k},
                     {"k_source", r.cluster.k_auto ? "elbow" : "config"},
                     {"excluded_no_affect", r.cluster.excluded_no_affect},
                     {"sse_curve", curve},
                     {"kmeans_sse", r.cluster.kmeans_sse},
                     {"assignments", assignments},
                     {"composition", {{"kmeans", composition(r.cluster.kmeans_composition)},
                                      {"ward", composition(r.cluster.ward_composition)}}}};

  ojson coords = ojson::array();
  for (std::size_t i = 0; i < r.project.rows.size(); ++i) {
    const auto& row = r.project.rows[i];
    coords.push_back({{"movie", row.movie},
                      {"name", row.name},
                      {"gender", std::string(to_string(row.gender))},
                      {"x", r.project.embedding.coords(i, 0)},
                      {"y", r.project.embedding.coords(i, 1)}});
  }
  j["tsne"] = {{"perplexity", r.project.embedding.perplexity},
               {"kl_trace", r.project.embedding.kl_trace},
               {"coords", coords}};

  ojson lexical = ojson::object();
  for (const auto& [group, list] : r.words.exclusive) {
    ojson arr = ojson::array();
    for (const auto& w : list) arr.push_back({{"word", w.word}, {"count", w.count}});
    lexical[group] = arr;
  }
  j["exclusive_nouns"] = lexical;
  j["artifacts"] = report_artifacts();
  return j;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Startup validation for a full run: every configured input must exist.
inline void validate_run_inputs(const RunConfig& cfg) {
  validate_numbers(cfg);
  const std::pair<const fs::path*, const char*> required[] = {
      {&cfg.script_dir, "script directory"}, {&cfg.metadata_path, "metadata file"},
      {&cfg.lexicon_path, "lexicon file"},   {&cfg.nouns_path, "noun list"},
      {&cfg.stopwords_path, "stopword list"}};
  for (const auto& [p, what] : required) {
    if (p->empty()) throw ConfigError(std::string("no ") + what + " configured");
    if (!fs::exists(*p)) throw ConfigError(std::string(what) + " not found: " + p->string());
  }
}

inline AnalysisReport run_pipeline(const RunConfig& cfg) {
  validate_run_inputs(cfg);
  AnalysisReport r;
  r.config = cfg;
  r.parse = stage_parse(cfg);
  r.score = stage_score(cfg);
  r.stats = stage_stats(cfg);
  r.cluster = stage_cluster(cfg);
  r.project = stage_project(cfg);
  r.words = stage_words(cfg);
  r.generated_at = utc_timestamp();
  detail::write_output(cfg, artifact::kReport,
                       report_json(r).dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n");
  return r;
}

}  // namespace scriptaffect
