// Command-line front end: one subcommand per pipeline stage plus run-all.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scriptaffect/pipeline.hpp"

#ifndef SCRIPTAFFECT_RESOURCE_DIR
#define SCRIPTAFFECT_RESOURCE_DIR "resources"
#endif

namespace sa = scriptaffect;

int main(int argc, char** argv) {
  CLI::App app{"Screenplay emotion and group-difference analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> scripts, metadata, lexicon, nouns, stopwords, out, k, test_unit;
  std::optional<std::size_t> min_dialogues, k_max, top_words, tsne_iterations;
  std::optional<std::uint64_t> seed;
  std::optional<double> perplexity;
  std::optional<int> bin_years;
  bool strict = false;

  app.add_option("--config", config_path, "key = value config file; flags override it");
  app.add_option("--scripts", scripts, "directory of .txt (plain) and .jsonl (positional) scripts");
  app.add_option("--metadata", metadata, "metadata CSV: movie,character,gender,year");
  app.add_option("--lexicon", lexicon, "emotion lexicon TSV (word, affect, flag)");
  app.add_option("--nouns", nouns, "noun word list (default: bundled)");
  app.add_option("--stopwords", stopwords, "stopword list (default: bundled)");
  app.add_option("--min-dialogues", min_dialogues, "drop characters with fewer dialogues (default 5)");
  app.add_option("--k", k, "cluster count, or 'auto' for the elbow (default auto)");
  app.add_option("--k-max", k_max, "largest k on the SSE curve (default 10)");
  app.add_option("--seed", seed, "random seed (default 42)");
  app.add_option("--perplexity", perplexity, "t-SNE perplexity (default 30)");
  app.add_option("--tsne-iterations", tsne_iterations, "t-SNE iterations (default 1000)");
  app.add_option("--bin-years", bin_years, "width of the year bins (default 5)");
  app.add_option("--test-unit", test_unit, "Mann-Whitney units: dialogue (default) or character")
      ->check(CLI::IsMember({"dialogue", "character"}));
  app.add_option("--top-words", top_words, "exclusive nouns kept per group (default 50)");
  app.add_option("--out", out, "output directory (default ./out)");
  app.add_flag("--strict", strict, "treat stale stage inputs as errors");

  auto* parse = app.add_subcommand("parse", "parse scripts, write characters.json and corpus.json");
  auto* score = app.add_subcommand("score", "score dialogues, write emotions.csv");
  auto* stats = app.add_subcommand("stats", "Mann-Whitney battery and year bins");
  auto* cluster = app.add_subcommand("cluster", "k-means, Ward and composition audit");
  auto* project = app.add_subcommand("project", "t-SNE projection to tsne.csv and tsne.svg");
  auto* words = app.add_subcommand("words", "exclusive noun frequencies");
  auto* run_all = app.add_subcommand("run-all", "every stage in order, then report.json");

  CLI11_PARSE(app, argc, argv);

  sa::RunConfig cfg;
  cfg.nouns_path = sa::fs::path(SCRIPTAFFECT_RESOURCE_DIR) / "nouns.txt";
  cfg.stopwords_path = sa::fs::path(SCRIPTAFFECT_RESOURCE_DIR) / "stopwords.txt";
  try {
    if (!config_path.empty()) {
      if (!sa::fs::exists(config_path)) throw sa::ConfigError("config file not found: " + config_path);
      sa::apply_config_text(cfg, sa::read_file(config_path), sa::fs::path(config_path).parent_path());
    }
    if (scripts) cfg.script_dir = *scripts;
    if (metadata) cfg.metadata_path = *metadata;
    if (lexicon) cfg.lexicon_path = *lexicon;
    if (nouns) cfg.nouns_path = *nouns;
    if (stopwords) cfg.stopwords_path = *stopwords;
    if (out) cfg.output_dir = *out;
    if (min_dialogues) cfg.min_dialogues = *min_dialogues;
    if (k) sa::apply_config_text(cfg, "k = " + *k);
    if (k_max) cfg.k_max = *k_max;
    if (seed) cfg.seed = *seed;
    if (perplexity) cfg.perplexity = *perplexity;
    if (tsne_iterations) cfg.tsne_iterations = *tsne_iterations;
    if (bin_years) cfg.bin_years = *bin_years;
    if (test_unit) cfg.test_unit = *test_unit == "dialogue" ? sa::TestUnit::Dialogue : sa::TestUnit::Character;
    if (top_words) cfg.top_words = *top_words;
    if (strict) cfg.strict = true;
    sa::validate_numbers(cfg);

    if (*parse) {
      const auto r = sa::stage_parse(cfg);
      std::cout << "parsed " << r.characters.size() << " scripts: " << r.summary.characters << " characters, "
                << r.summary.dialogues << " dialogues (" << r.dropped_characters << " characters below "
                << cfg.min_dialogues << " dialogues dropped)\n";
    } else if (*score) {
      const auto r = sa::stage_score(cfg);
      std::cout << "scored " << r.rows << " characters (" << r.no_affect << " without lexicon hits)\n";
    } else if (*stats) {
      const auto r = sa::stage_stats(cfg);
      std::cout << "tested 32 emotions over " << r.observations << " observations\n";
    } else if (*cluster) {
      const auto r = sa::stage_cluster(cfg);
      std::cout << "clustered " << r.rows.size() << " characters into k=" << r.k << (r.k_auto ? " (elbow)" : "")
                << "; " << r.excluded_no_affect << " no-affect characters excluded\n";
    } else if (*project) {
      const auto r = sa::stage_project(cfg);
      std::cout << "projected " << r.rows.size() << " characters; final KL "
                << (r.embedding.kl_trace.empty() ? 0.0 : r.embedding.kl_trace.back()) << "\n";
    } else if (*words) {
      const auto r = sa::stage_words(cfg);
      for (const auto& [group, list] : r.exclusive) std::cout << group << ": " << list.size() << " exclusive nouns\n";
    } else if (*run_all) {
      const auto r = sa::run_pipeline(cfg);
      std::cout << "wrote report for " << r.parse.summary.characters << " characters to "
                << (cfg.output_dir / sa::artifact::kReport).string() << "\n";
    }
  } catch (const sa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
