#include <gtest/gtest.h>

#include <random>

#include "scriptaffect/parser.hpp"

using namespace scriptaffect;

namespace {

std::vector<RawBlock> blocks_with_lefts(std::initializer_list<std::pair<int, int>> levels) {
  std::vector<RawBlock> out;
  std::size_t order = 0;
  for (auto [left, count] : levels) {
    for (int i = 0; i < count; ++i) out.push_back({"x", left, order++});
  }
  return out;
}

ClassifiedBlock cb(BlockKind kind, std::string text) { return {RawBlock{std::move(text), 0, 0}, kind}; }

const IndentProfile kProfile{10, 25, 38};

}  // namespace

TEST(InferIndentProfile, PicksThreeMostFrequentAscending) {
  const auto blocks = blocks_with_lefts({{38, 40}, {10, 120}, {25, 80}});
  EXPECT_EQ(infer_indent_profile(blocks), (IndentProfile{10, 25, 38}));
}

TEST(InferIndentProfile, SingleLevelIsAnError) {
  const auto blocks = blocks_with_lefts({{10, 30}});
  EXPECT_THROW(infer_indent_profile(blocks), ProfileError);
}

TEST(InferIndentProfile, RareOffsetIgnored) {
  const auto blocks = blocks_with_lefts({{10, 50}, {25, 50}, {38, 50}, {30, 2}});
  EXPECT_EQ(infer_indent_profile(blocks), (IndentProfile{10, 25, 38}));
}

TEST(InferIndentProfile, MergeWindowPoolsRaggedCues) {
  // cue column split between 270 and 274 would otherwise outrank the action level
  const auto blocks = blocks_with_lefts({{108, 5}, {180, 20}, {270, 11}, {274, 7}});
  EXPECT_EQ(infer_indent_profile(blocks), (IndentProfile{180, 270, 274}));
  EXPECT_EQ(infer_indent_profile(blocks, 8), (IndentProfile{108, 180, 270}));
}

TEST(ClassifyBlocks, CueParentheticalHeading) {
  const std::vector<RawBlock> blocks{{"HARRY", 38, 0}, {"(whispering)", 25, 1}, {"INT. CASTLE - NIGHT", 10, 2}};
  const auto out = classify_blocks(blocks, kProfile);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].kind, BlockKind::CharacterCue);
  EXPECT_EQ(out[1].kind, BlockKind::Parenthetical);
  EXPECT_EQ(out[2].kind, BlockKind::SceneHeading);
}

TEST(ClassifyBlocks, ToleranceAndCaps) {
  const std::vector<RawBlock> blocks{
      {"HARRY", 40, 0},             // within 2 of cue
      {"Harry waves.", 38, 1},      // cue column but not caps
      {"I know.", 24, 2},           // dialogue
      {"He runs.", 11, 3},          // action
      {"CUT TO:", 55, 4},           // far right transition
      {"EXT. FIELD - DAY", 10, 5},  // slugline
      {"(beat)", 31, 6},            // parenthetical between dialogue and cue
      {"nothing", 32, 7},           // off-grid, not parenthesized
  };
  const auto out = classify_blocks(blocks, kProfile);
  const std::vector<BlockKind> expected{BlockKind::CharacterCue, BlockKind::Other,   BlockKind::Dialogue,
                                        BlockKind::Action,       BlockKind::Other,   BlockKind::SceneHeading,
                                        BlockKind::Parenthetical, BlockKind::Other};
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(out[i].kind, expected[i]) << blocks[i].text;
}

TEST(ClassifyBlocks, TotalOnRandomInput) {
  std::mt19937 gen(7);
  std::uniform_int_distribution<int> left(0, 60);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RawBlock> blocks;
    for (std::size_t i = 0; i < 40; ++i) blocks.push_back({"T" + std::to_string(i), left(gen), i});
    const auto out = classify_blocks(blocks, kProfile);
    ASSERT_EQ(out.size(), blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) EXPECT_EQ(out[i].block, blocks[i]);
  }
}

TEST(NormalizeCharacterName, StripsMarkers) {
  EXPECT_EQ(normalize_character_name("HARRY (V.O.)"), "HARRY");
  EXPECT_EQ(normalize_character_name("RON "), "RON");
  EXPECT_THROW(normalize_character_name("(O.S.)"), NameError);
}

TEST(NormalizeCharacterName, MarkersCaseAndWhitespace) {
  EXPECT_EQ(normalize_character_name("  mara   (cont'd) "), "MARA");
  EXPECT_EQ(normalize_character_name("OLD  MAN (O.S.) (CONT'D)"), "OLD MAN");
  EXPECT_EQ(normalize_character_name("JUNE V.O."), "JUNE");
  EXPECT_EQ(normalize_character_name("DR. WHO (into phone"), "DR. WHO");
  EXPECT_EQ(normalize_character_name("Zoë"), "ZOË");
  EXPECT_THROW(normalize_character_name("   "), NameError);
}

TEST(BuildCharacterDictionary, JoinsConsecutiveDialogue) {
  const std::vector<ClassifiedBlock> in{cb(BlockKind::CharacterCue, "HARRY"), cb(BlockKind::Dialogue, "I know."),
                                        cb(BlockKind::Dialogue, "Trust me.")};
  EXPECT_EQ(build_character_dictionary(in), (CharacterDictionary{{"HARRY", {"I know. Trust me."}}}));
}

TEST(BuildCharacterDictionary, DropsParentheticals) {
  const std::vector<ClassifiedBlock> in{cb(BlockKind::CharacterCue, "HARRY"), cb(BlockKind::Parenthetical, "(quietly)"),
                                        cb(BlockKind::Dialogue, "Yes.")};
  EXPECT_EQ(build_character_dictionary(in), (CharacterDictionary{{"HARRY", {"Yes."}}}));
}

TEST(BuildCharacterDictionary, OrphanDialogueDiscarded) {
  const std::vector<ClassifiedBlock> in{cb(BlockKind::Dialogue, "orphan line")};
  EXPECT_TRUE(build_character_dictionary(in).empty());
}

TEST(BuildCharacterDictionary, SpeechBoundaries) {
  const std::vector<ClassifiedBlock> in{
      cb(BlockKind::CharacterCue, "HARRY (V.O.)"), cb(BlockKind::Dialogue, "One."),
      cb(BlockKind::Parenthetical, "(beat)"),      cb(BlockKind::Dialogue, "Two."),
      cb(BlockKind::Action, "He leaves."),         cb(BlockKind::Dialogue, "stray"),
      cb(BlockKind::CharacterCue, "HARRY (CONT'D)"), cb(BlockKind::Dialogue, "Three."),
      cb(BlockKind::CharacterCue, "(O.S.)"),       cb(BlockKind::Dialogue, "nameless"),
      cb(BlockKind::CharacterCue, "RON"),          cb(BlockKind::SceneHeading, "INT. HALL"),
  };
  EXPECT_EQ(build_character_dictionary(in), (CharacterDictionary{{"HARRY", {"One. Two.", "Three."}}}));
}

TEST(FilterMinDialogues, DefaultThresholdFive) {
  const CharacterDictionary d{{"A", {"1", "2", "3", "4", "5"}}, {"B", {"1", "2", "3", "4"}}};
  EXPECT_EQ(filter_min_dialogues(d, 5), (CharacterDictionary{{"A", {"1", "2", "3", "4", "5"}}}));
  EXPECT_EQ(filter_min_dialogues(d), filter_min_dialogues(d, 5));
  EXPECT_EQ(filter_min_dialogues(d, 0), d);
  EXPECT_TRUE(filter_min_dialogues({}, 5).empty());
}

namespace {

CharacterDictionary random_dictionary(std::mt19937& gen) {
  std::uniform_int_distribution<int> names(0, 8), lines(1, 9), chars(0, 25);
  CharacterDictionary d;
  const int n = names(gen);
  for (int i = 0; i < n; ++i) {
    std::string name = "C" + std::to_string(i);
    std::vector<std::string> speeches;
    const int m = lines(gen);
    for (int j = 0; j < m; ++j) {
      std::string s(static_cast<std::size_t>(lines(gen)), 'a');
      for (auto& c : s) c = static_cast<char>('a' + chars(gen));
      speeches.push_back(s + " \"quoted\" é");
    }
    d.emplace(name, speeches);
  }
  return d;
}

}  // namespace

TEST(FilterMinDialogues, MonotoneInThreshold) {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_dictionary(gen);
    for (std::size_t t1 = 0; t1 < 10; ++t1) {
      const auto loose = filter_min_dialogues(d, t1);
      const auto tight = filter_min_dialogues(d, t1 + 1);
      for (const auto& [name, _] : tight) EXPECT_TRUE(loose.contains(name));
    }
  }
}

TEST(CharacterDictionaryJson, RoundTrip) {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_dictionary(gen);
    EXPECT_EQ(character_dictionary_from_json(to_json(d)), d);
  }
}

TEST(CharacterDictionaryJson, KeysSorted) {
  const CharacterDictionary d{{"ZED", {"z"}}, {"ABE", {"a"}}};
  const auto text = to_json(d);
  EXPECT_LT(text.find("ABE"), text.find("ZED"));
}

TEST(ReadPlainText, IndentsAndBlankLines) {
  const auto blocks = read_plain_text("INT. ROOM\n\n\t\tHARRY\r\n   Hello there.  \n");
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0], (RawBlock{"INT. ROOM", 0, 0}));
  EXPECT_EQ(blocks[1], (RawBlock{"HARRY", 16, 2}));
  EXPECT_EQ(blocks[2], (RawBlock{"Hello there.", 3, 3}));
}

TEST(ReadPositional, SortsByPageThenTop) {
  const auto blocks = read_positional(
      R"({"text": "b", "left": 10, "top": 5, "page": 2})"
      "\n"
      R"({"text": "a", "left": 20, "top": 50})"
      "\n"
      R"({"text": "c", "left": 30.4, "top": 1, "page": 2})"
      "\n");
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0], (RawBlock{"a", 20, 0}));
  EXPECT_EQ(blocks[1], (RawBlock{"c", 30, 1}));
  EXPECT_EQ(blocks[2], (RawBlock{"b", 10, 2}));
}

TEST(ReadPositional, MalformedLines) {
  EXPECT_THROW(read_positional("{\"text\": \"a\", \"left\": 1}\n"), FormatError);
  EXPECT_THROW(read_positional("not json\n"), FormatError);
  EXPECT_THROW(read_positional("{\"text\": \"a\", \"left\": -3, \"top\": 1}\n"), FormatError);
}

TEST(ParseScript, PlainTextEndToEnd) {
  const std::string script =
      "          INT. KITCHEN - DAY\n"
      "\n"
      "          Steam rises from a pot.\n"
      "          Ann stirs it.\n"
      "\n"
      "                                ANN\n"
      "                    It is ready.\n"
      "                    Sit down.\n"
      "\n"
      "                                BEN (O.S.)\n"
      "                          (yelling)\n"
      "                    Coming!\n"
      "\n"
      "          Ben enters.\n";
  const auto parsed = parse_script(script, InputMode::PlainText);
  EXPECT_EQ(parsed.profile, (IndentProfile{10, 20, 32}));
  EXPECT_EQ(parsed.characters, (CharacterDictionary{{"ANN", {"It is ready. Sit down."}}, {"BEN", {"Coming!"}}}));
}
