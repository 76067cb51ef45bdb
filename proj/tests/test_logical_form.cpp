#include <gtest/gtest.h>

#include <random>

#include "seqtab/logical_form.hpp"
#include "support/oracle.hpp"

using namespace seqtab;

TEST(Execute, SelectColumn) {
  Table t("t", {"A", "B"}, {{"x", "1"}, {"y", "2"}, {"z", "3"}});
  EXPECT_EQ(*execute(SelectColumn{0}, t, nullptr), (AnswerCoordinates{{0, 0}, {1, 0}, {2, 0}}));
}

TEST(Execute, FilterGreaterThan) {
  Table t("t", {"Name", "N"}, {{"a", "3"}, {"b", "7"}, {"c", "9"}});
  EXPECT_EQ(*execute(Filter{Scope::kWholeTable, 1, CompareOp::kGt, "5"}, t, nullptr),
            (AnswerCoordinates{{1, 1}, {2, 1}}));
}

TEST(Execute, ArgMaxProjects) {
  Table t("t", {"Name", "N"}, {{"a", "3"}, {"b", "7"}, {"c", "9"}});
  EXPECT_EQ(*execute(ArgExtreme{Scope::kWholeTable, 1, Extreme::kMax, 0}, t, nullptr), (AnswerCoordinates{{2, 0}}));
}

TEST(Execute, EmptyDenotationIsNotAnError) {
  Table t("t", {"Name", "N"}, {{"a", "3"}, {"b", "7"}});
  EXPECT_FALSE(execute(Filter{Scope::kWholeTable, 1, CompareOp::kGt, "100"}, t, nullptr).has_value());
}

TEST(Execute, IllTypedFormsThrow) {
  Table t("t", {"Name", "N"}, {{"a", "3"}, {"b", "7"}});
  EXPECT_THROW(execute(Filter{Scope::kWholeTable, 0, CompareOp::kGt, "5"}, t, nullptr), InvalidFormError);
  EXPECT_THROW(execute(Filter{Scope::kWholeTable, 1, CompareOp::kLt, "abc"}, t, nullptr), InvalidFormError);
  EXPECT_THROW(execute(ArgExtreme{Scope::kWholeTable, 0, Extreme::kMin, 1}, t, nullptr), InvalidFormError);
  EXPECT_THROW(execute(SelectColumn{5}, t, nullptr), InvalidFormError);
  EXPECT_THROW(execute(ProjectRows{Scope::kPreviousRows, 1}, t, nullptr), InvalidFormError);
}

TEST(Execute, YearComparesAtYearGranularity) {
  Table t("t", {"Name", "Date"}, {{"a", "1959-12-31"}, {"b", "1960-06-01"}, {"c", "1961-01-01"}});
  EXPECT_EQ(*execute(Filter{Scope::kWholeTable, 1, CompareOp::kGt, "1960"}, t, nullptr), (AnswerCoordinates{{2, 1}}));
  EXPECT_EQ(*execute(Filter{Scope::kWholeTable, 1, CompareOp::kLt, "1960"}, t, nullptr), (AnswerCoordinates{{0, 1}}));
}

TEST(LogicalForm, TextRoundTrip) {
  std::vector<LogicalForm> forms = {SelectColumn{2}, Filter{Scope::kPreviousRows, 1, CompareOp::kEq, "a \"q\" \\ b"},
                                    Filter{Scope::kWholeTable, 0, CompareOp::kLt, "5"},
                                    ArgExtreme{Scope::kWholeTable, 1, Extreme::kMin, 0},
                                    ProjectRows{Scope::kPreviousRows, 3}};
  for (const auto& f : forms) EXPECT_EQ(parse_logical_form(to_string(f)), f) << to_string(f);
  EXPECT_THROW(parse_logical_form("explode(1)"), InvalidFormError);
}

TEST(Execute, MatchesBruteForceOnRandomSmallTables) {
  std::mt19937 rng(2024);
  size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto g = oracle::random_grid(rng);
    Table t("t", g.headers, g.cells);
    // Column kinds as generated must be what the table infers.
    for (int c = 0; c < t.cols(); ++c) ASSERT_EQ(static_cast<int>(t.kind(c)), static_cast<int>(g.kinds[c]));
    std::set<std::pair<int, int>> prev_set;
    for (int r = 0; r < t.rows(); ++r)
      if (rng() % 2) prev_set.insert({r, static_cast<int>(rng() % t.cols())});
    AnswerCoordinates prev;
    for (auto [r, c] : prev_set) prev.insert({r, c});
    const bool has_prev = !prev.empty();
    for (const auto& form : oracle::all_forms(g, has_prev)) {
      auto got = execute(form, t, has_prev ? &prev : nullptr);
      auto want = oracle::run(form, g, &prev_set);
      std::set<std::pair<int, int>> got_set;
      if (got) {
        EXPECT_FALSE(got->empty());
        for (auto c : *got) got_set.insert({c.row, c.col});
      }
      EXPECT_EQ(got_set, want) << to_string(form) << " trial " << trial;
      ++checked;
    }
  }
  EXPECT_GT(checked, 5000u);
}
