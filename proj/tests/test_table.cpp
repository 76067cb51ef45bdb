#include <gtest/gtest.h>

#include "seqtab/table.hpp"

using namespace seqtab;

namespace {

Table grid(int rows, int cols) {
  std::vector<std::string> headers;
  for (int c = 0; c < cols; ++c) headers.push_back("h" + std::to_string(c));
  std::vector<std::vector<std::string>> cells(rows, std::vector<std::string>(cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) cells[r][c] = "v" + std::to_string(r) + std::to_string(c);
  return Table("t", headers, cells);
}

}  // namespace

TEST(Table, RejectsMalformedGrids) {
  EXPECT_THROW(Table("t", {"a", "b"}, {{"1", "2"}, {"3"}}), ValidationError);
  EXPECT_THROW(Table("t", {"a", "a"}, {{"1", "2"}}), ValidationError);
  EXPECT_THROW(Table("t", {}, {}), ValidationError);
}

TEST(Table, InfersColumnKinds) {
  Table t("t", {"Name", "Points", "Date"}, {{"Ann", "3", "March 4, 2001"}, {"Bo", "1,200", "2002-01-05"}});
  EXPECT_EQ(t.kind(0), ColumnKind::kText);
  EXPECT_EQ(t.kind(1), ColumnKind::kNumber);
  EXPECT_EQ(t.kind(2), ColumnKind::kDate);
}

TEST(Table, ColumnCellsAndBounds) {
  Table t = grid(3, 2);
  EXPECT_EQ(t.column_cells(0), (AnswerCoordinates{{0, 0}, {1, 0}, {2, 0}}));
  EXPECT_NO_THROW(t.check_bounds({{2, 1}}));
  try {
    t.check_bounds({{0, 0}, {3, 1}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(3, 1)"), std::string::npos) << e.what();
  }
}

TEST(Table, SelectRowsKeepsOrder) {
  Table t = grid(4, 2);
  std::vector<int> rows = {2, 0};
  Table s = t.select_rows(rows);
  ASSERT_EQ(s.rows(), 2);
  EXPECT_EQ(s.cell(0, 0), "v20");
  EXPECT_EQ(s.cell(1, 1), "v01");
  EXPECT_EQ(s.headers(), t.headers());
}

TEST(AnswerCoordinates, RowMajorIterationAndFormat) {
  AnswerCoordinates a{{1, 0}, {0, 1}, {0, 0}};
  std::vector<Coord> order(a.begin(), a.end());
  EXPECT_EQ(order, (std::vector<Coord>{{0, 0}, {0, 1}, {1, 0}}));
  EXPECT_EQ(format_coordinates(a), "['(0, 0)', '(0, 1)', '(1, 0)']");
  EXPECT_EQ(a.rows(), (std::set<int>{0, 1}));
  EXPECT_TRUE((AnswerCoordinates{{0, 0}}).is_subset_of(a));
  EXPECT_FALSE(a.is_subset_of(AnswerCoordinates{{0, 0}}));
}

TEST(ClassifyQuestion, DefinitionalCases) {
  Table t = grid(5, 3);
  EXPECT_EQ(classify_question(t.column_cells(0), nullptr, t), QuestionClass::kSelectColumn);
  AnswerCoordinates prev{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_EQ(classify_question({{1, 0}}, &prev, t), QuestionClass::kSelectSubset);
  AnswerCoordinates prev_row{{1, 0}};
  EXPECT_EQ(classify_question({{1, 2}}, &prev_row, t), QuestionClass::kSelectRow);
  EXPECT_EQ(classify_question({{3, 1}, {4, 2}}, &prev, t), QuestionClass::kComplex);
}

TEST(ClassifyQuestion, OutOfBoundsNamesCoordinate) {
  Table t = grid(2, 2);
  try {
    classify_question({{5, 0}}, nullptr, t);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(5, 0)"), std::string::npos);
  }
}

TEST(ClassDistribution, FullColumnsAreSelectColumn) {
  Table t = grid(3, 2);
  TableMap tables{{"t", t}};
  QuestionSequence seq{"s", "", "t", {}};
  seq.entries.push_back({"s", 1, "q1", t.column_cells(0), cell_texts(t, t.column_cells(0))});
  seq.entries.push_back({"s", 2, "q2", t.column_cells(1), cell_texts(t, t.column_cells(1))});
  std::vector<QuestionSequence> corpus{seq};
  auto dist = class_distribution(corpus, tables);
  EXPECT_DOUBLE_EQ(dist.fraction(QuestionClass::kSelectColumn), 1.0);
  EXPECT_DOUBLE_EQ(dist.fraction_at(1, QuestionClass::kSelectColumn), 1.0);
  EXPECT_EQ(dist.n_questions, 2u);
}

TEST(ClassDistribution, EmptyCorpusIsError) {
  std::vector<QuestionSequence> none;
  EXPECT_THROW(class_distribution(none, {}), std::exception);
}

TEST(ClassDistribution, FractionsSumToOne) {
  Table t = grid(4, 3);
  TableMap tables{{"t", t}};
  QuestionSequence seq{"s", "", "t", {}};
  AnswerCoordinates a = t.column_cells(0), b{{1, 0}, {2, 0}}, c{{1, 2}}, d{{0, 1}, {3, 2}};
  int pos = 1;
  for (auto* x : {&a, &b, &c, &d}) seq.entries.push_back({"s", pos++, "q", *x, cell_texts(t, *x)});
  std::vector<QuestionSequence> corpus{seq};
  auto dist = class_distribution(corpus, tables);
  double sum = 0;
  for (double f : dist.overall) sum += f;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (double f : dist.overall) EXPECT_DOUBLE_EQ(f, 0.25);
}

TEST(ValidateSequence, RejectsGaps) {
  Table t = grid(2, 2);
  QuestionSequence seq{"s", "", "t", {}};
  seq.entries.push_back({"s", 1, "q", {{0, 0}}, {"v00"}});
  seq.entries.push_back({"s", 3, "q", {{0, 1}}, {"v01"}});
  EXPECT_THROW(validate_sequence(seq, t), ValidationError);
  seq.entries[1].position = 2;
  EXPECT_NO_THROW(validate_sequence(seq, t));
  seq.entries[1].gold_text = {"wrong"};
  EXPECT_THROW(validate_sequence(seq, t), ValidationError);
}
