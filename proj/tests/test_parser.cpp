#include <gtest/gtest.h>

#include "seqtab/parser.hpp"
#include "seqtab/synthetic.hpp"

using namespace seqtab;

namespace {

Table sports() {
  return Table("sports", {"Team", "City", "Wins", "Founded"},
               {{"Eagles", "Lyon", "12", "1950"}, {"Hawks", "Oslo", "7", "1961"}, {"Lions", "Lima", "9", "1972"},
                {"Bears", "Rome", "3", "1948"}});
}

}  // namespace

TEST(MatchTokens, StripsPlurals) {
  EXPECT_EQ(match_tokens("What are all of the teams?"),
            (std::vector<std::string>{"what", "are", "all", "of", "the", "team"}));
  auto t = match_tokens("countries");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], "country");
}

TEST(QuestionNumbers, FindsDecimals) {
  EXPECT_EQ(question_numbers("more than 1,200 or 3.5 but not x5"), (std::vector<std::string>{"1200", "3.5"}));
}

TEST(ScoringCues, Keywords) {
  auto c = scoring_cues("which of those has the most wins?");
  EXPECT_TRUE(c.wants_max);
  EXPECT_TRUE(c.referential);
  EXPECT_FALSE(c.wants_min);
  EXPECT_TRUE(scoring_cues("founded before 1960").wants_less);
}

TEST(Parser, TeamsQuestionSelectsTeamColumn) {
  Table t = sports();
  auto cs = generate_candidates("what are all of the teams?", t, nullptr);
  ASSERT_FALSE(cs.candidates.empty());
  EXPECT_EQ(cs.candidates.front().form, LogicalForm(SelectColumn{0}));
  EXPECT_EQ(parse_and_answer("what are all of the teams?", t, nullptr), t.column_cells(0));
}

TEST(Parser, ComparisonAndExtreme) {
  Table t = sports();
  EXPECT_EQ(parse_and_answer("which team has the most wins?", t, nullptr), (AnswerCoordinates{{0, 0}}));
  AnswerCoordinates wins_gt = parse_and_answer("which wins are more than 8?", t, nullptr);
  EXPECT_EQ(wins_gt, (AnswerCoordinates{{0, 2}, {2, 2}}));
}

TEST(Parser, CandidatesSortedAndBeamRespected) {
  Table t = sports();
  for (size_t beam : {1u, 5u, 50u}) {
    auto cs = generate_candidates("which city won after 1960?", t, nullptr, beam);
    EXPECT_LE(cs.candidates.size(), beam);
    for (size_t i = 1; i < cs.candidates.size(); ++i) EXPECT_GE(cs.candidates[i - 1].score, cs.candidates[i].score);
  }
}

TEST(Parser, DenotationCapSemantics) {
  Table t = sports();
  AnswerCoordinates prev{{0, 0}, {1, 0}};
  for (const char* q : {"what are the cities?", "which of those won more than 5?", "list all teams"}) {
    for (size_t cap : {1u, 2u, 3u, 10u}) {
      auto cs = generate_candidates(q, t, &prev, 1000, cap);
      for (const auto& c : cs.candidates) {
        if (c.denotation) EXPECT_LE(c.denotation->size(), cap) << to_string(c.form);
      }
    }
  }
}

TEST(Parser, RemovingCapGivesSuperset) {
  Table t = sports();
  AnswerCoordinates prev{{1, 1}, {2, 1}};
  for (const char* q : {"what are the cities?", "which of them won the least?", "which were founded after 1950?"}) {
    auto all = generate_candidates(q, t, &prev, 100000);
    std::vector<std::string> uncapped;
    for (const auto& c : all.candidates) uncapped.push_back(to_string(c.form));
    for (size_t cap : {1u, 2u, 4u}) {
      auto capped = generate_candidates(q, t, &prev, 100000, cap);
      for (const auto& c : capped.candidates) {
        EXPECT_NE(std::find(uncapped.begin(), uncapped.end(), to_string(c.form)), uncapped.end());
      }
      EXPECT_LE(capped.candidates.size(), all.candidates.size());
    }
  }
}

TEST(Parser, OneColumnFallback) {
  Table t("one", {"Only"}, {{"a"}, {"b"}});
  EXPECT_EQ(parse_and_answer("zzz qqq?", t, nullptr), t.column_cells(0));
  EXPECT_EQ(parse_and_answer("which is more than 1000?", t, nullptr), t.column_cells(0));
}

TEST(Parser, Deterministic) {
  Table t = sports();
  AnswerCoordinates prev{{0, 0}, {3, 0}};
  for (const char* q : {"which of those has the lowest wins?", "what city?", "founded before 1960"}) {
    auto a = parse(q, t, &prev);
    auto b = parse(q, t, &prev);
    EXPECT_EQ(a.answer, b.answer);
    EXPECT_EQ(a.form, b.form);
  }
}

TEST(Parser, SyntheticPositionOneAccuracy) {
  SyntheticSpec spec;
  spec.n_tables = 200;
  spec.seed = 11;
  auto syn = generate_synthetic(spec);
  size_t correct = 0, total = 0;
  for (const auto& seq : syn.corpus.sequences) {
    const auto& e = seq.entries.front();
    correct += parse_and_answer(e.text, syn.corpus.table_for(seq), nullptr) == e.gold;
    ++total;
  }
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(total), 0.70) << correct << "/" << total;
}
