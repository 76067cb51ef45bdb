#include <gtest/gtest.h>

#include <cmath>

#include "seqtab/model.hpp"
#include "support/gradcheck.hpp"

using namespace seqtab;

namespace {

Table small_table() { return Table("t", {"Name", "Wins"}, {{"abc", "3"}, {"cab", "7"}, {"bca", "9"}}); }

ModelParams<double> params_for(const Table& t, int d = 4, uint64_t seed = 5) {
  ModelConfig cfg;
  cfg.d = d;
  cfg.char_dim = 3;
  cfg.init_scale = 0.5;
  cfg.seed = seed;
  std::vector<std::string> texts = t.headers();
  for (const auto& row : t.cells()) texts.insert(texts.end(), row.begin(), row.end());
  texts.push_back("what are the names? which of those wins most?");
  return ModelParams<double>::create(cfg, Vocabulary::from_texts(texts));
}

struct Fixture {
  Table table = small_table();
  ModelParams<double> params = params_for(table);
};

ModuleOutputs<double> modules_of(Graph<double>& g, std::vector<double> col, std::vector<double> row,
                                 std::vector<double> cell) {
  const int c = static_cast<int>(col.size()), r = static_cast<int>(row.size());
  return {g.constant(Array<double>({c}, col)), g.constant(Array<double>({r}, row)),
          g.constant(Array<double>({r * c, 1}, cell))};
}

}  // namespace

TEST(Modules, ZeroW5GivesUniformColumns) {
  Fixture f;
  f.params.w5.value.fill(0);
  Graph<double> g;
  auto vars = bind(g, f.params);
  auto q = encode_question("what are the names?", vars, f.params);
  auto m = run_modules(q, encode_table(f.table, vars, f.params), vars);
  ASSERT_EQ(m.m_col.size(), 2u);
  for (double v : m.m_col.value().values()) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(Modules, ZeroW6GivesHalfRows) {
  Fixture f;
  f.params.w6.value.fill(0);
  Graph<double> g;
  auto vars = bind(g, f.params);
  auto q = encode_question("what are the names?", vars, f.params);
  auto m = run_modules(q, encode_table(f.table, vars, f.params), vars);
  ASSERT_EQ(m.m_row.size(), 3u);
  for (double v : m.m_row.value().values()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Modules, SingleColumnIsCertain) {
  Table t("one", {"abc"}, {{"a"}, {"b"}});
  for (uint64_t seed : {1, 2, 3}) {
    auto p = params_for(t, 4, seed);
    Graph<double> g;
    auto vars = bind(g, p);
    auto q = encode_question("what are the names?", vars, p);
    auto m = run_modules(q, encode_table(t, vars, p), vars);
    EXPECT_EQ(m.m_col.value().storage(), (std::vector<double>{1.0}));
  }
}

TEST(Modules, ShapesAndRanges) {
  Fixture f;
  Graph<double> g;
  auto vars = bind(g, f.params);
  auto q = encode_question("which of those wins most?", vars, f.params);
  auto m = run_modules(q, encode_table(f.table, vars, f.params), vars);
  EXPECT_EQ(m.m_cell.shape(), (Shape{6, 1}));
  for (double v : m.m_cell.value().values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  auto att = module_attention(q, vars);
  EXPECT_EQ(att.shape(), (Shape{3}));
  double s = 0;
  for (double v : att.value().values()) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Modules, NormalizationProperty) {
  std::mt19937_64 rng(77);
  for (int draw = 0; draw < 50; ++draw) {
    const int rows = 1 + static_cast<int>(rng() % 4), cols = 1 + static_cast<int>(rng() % 4);
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> cells(rows);
    for (int c = 0; c < cols; ++c) headers.push_back(std::string(1, static_cast<char>('a' + c)) + "x");
    for (auto& row : cells)
      for (int c = 0; c < cols; ++c) row.push_back(std::to_string(rng() % 50));
    Table t("t", headers, cells);
    auto p = params_for(t, 3, rng());
    Graph<double> g;
    auto vars = bind(g, p);
    auto q = encode_question("which ax is more than 5?", vars, p);
    auto m = run_modules(q, encode_table(t, vars, p), vars);
    double sc = 0, sa = 0;
    for (double v : m.m_col.value().values()) sc += v;
    for (double v : module_attention(q, vars).value().values()) sa += v;
    EXPECT_NEAR(sc, 1.0, 1e-6);
    EXPECT_NEAR(sa, 1.0, 1e-6);
  }
}

TEST(Mix, DegenerateWeights) {
  Graph<double> g;
  auto m = modules_of(g, {0.2, 0.8}, {0.1, 0.9, 0.4}, {0.5, 0.6, 0.7, 0.8, 0.9, 0.1});
  auto col = mix_scores(m, g.constant(Array<double>({3}, {1, 0, 0})), 3, 2);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(col.value().at(i, 0), 0.2);
    EXPECT_DOUBLE_EQ(col.value().at(i, 1), 0.8);
  }
  auto row = mix_scores(m, g.constant(Array<double>({3}, {0, 1, 0})), 3, 2);
  EXPECT_DOUBLE_EQ(row.value().at(1, 0), 0.9);
  EXPECT_DOUBLE_EQ(row.value().at(1, 1), 0.9);
  auto cell = mix_scores(m, g.constant(Array<double>({3}, {0, 0, 1})), 3, 2);
  EXPECT_EQ(cell.value().storage(), (std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 0.1}));
  EXPECT_EQ(cell.shape(), (Shape{3, 2}));
}

TEST(Mix, UniformArithmetic) {
  Graph<double> g;
  const int c = 4;
  auto m = modules_of(g, std::vector<double>(c, 1.0 / c), std::vector<double>(2, 0.5), std::vector<double>(2 * c, 0.5));
  auto a = mix_scores(m, g.constant(Array<double>({3}, {1.0 / 3, 1.0 / 3, 1.0 / 3})), 2, c);
  const double want = (1.0 / 3) * (1.0 / c) + (1.0 / 3) * 0.5 + (1.0 / 3) * 0.5;
  for (double v : a.value().values()) EXPECT_NEAR(v, want, 1e-12);
}

TEST(Predict, ThresholdAndFallback) {
  EXPECT_EQ(predict(Array<double>({2, 2}, {0.9, 0.1, 0.2, 0.6})), (AnswerCoordinates{{0, 0}, {1, 1}}));
  EXPECT_EQ(predict(Array<double>({2, 2}, {0.3, 0.3, 0.31, 0.3})), (AnswerCoordinates{{1, 0}}));
  EXPECT_EQ(predict(Array<double>({2, 2}, {0.5, 0.5, 0.5, 0.5})), (AnswerCoordinates{{0, 0}}));
  EXPECT_EQ(predict(Array<float>({1, 3}, {0.1f, 0.4f, 0.4f})), (AnswerCoordinates{{0, 1}}));
}

TEST(Predict, NeverEmpty) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    auto a = gradcheck::random_array(rng, {1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 4)}, 0, 1);
    EXPECT_FALSE(predict(a).empty());
  }
}

TEST(Loss, PerfectScoresNearZero) {
  Graph<double> g;
  auto l = answer_loss(g.constant(Array<double>({2, 2}, {1, 0, 0, 1})), AnswerCoordinates{{0, 0}, {1, 1}});
  EXPECT_LT(l.value().item(), 1e-5);
}

TEST(Loss, UniformHalfIsLn2) {
  Graph<double> g;
  auto l = answer_loss(g.constant(Array<double>({3, 2}, std::vector<double>(6, 0.5))), AnswerCoordinates{{1, 1}});
  EXPECT_NEAR(l.value().item(), std::log(2.0), 1e-6);
}

TEST(Sequence, SingleQuestionIgnoresTeacherForcing) {
  Fixture f;
  std::vector<std::string> qs = {"what are the names?"};
  std::vector<AnswerCoordinates> golds = {f.table.column_cells(0)};
  auto on = answer_sequence(qs, f.table, f.params, true, &golds);
  auto off = answer_sequence(qs, f.table, f.params, false);
  ASSERT_EQ(on.size(), 1u);
  EXPECT_EQ(on[0].scores, off[0].scores);
  EXPECT_EQ(on[0].predicted, off[0].predicted);
}

TEST(Sequence, DeterministicAndConsistent) {
  Fixture f;
  std::vector<std::string> qs = {"what are the names?", "which of those wins most?"};
  auto a = answer_sequence(qs, f.table, f.params, false);
  auto b = answer_sequence(qs, f.table, f.params, false);
  ASSERT_EQ(a.size(), 2u);
  for (size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a[k].scores, b[k].scores);
    EXPECT_EQ(a[k].predicted, predict(a[k].scores));
    EXPECT_EQ(a[k].attention.m_col.size(), 2u);
    double s = a[k].attention.m_att[0] + a[k].attention.m_att[1] + a[k].attention.m_att[2];
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Sequence, TeacherForcingNeedsGolds) {
  Fixture f;
  std::vector<std::string> qs = {"a", "b"};
  EXPECT_THROW(answer_sequence(qs, f.table, f.params, true), std::invalid_argument);
}

TEST(Sequence, PreviousAnswerChangesSecondStep) {
  Fixture f;
  f.params.w3.value[0] = 2.0;
  std::vector<std::string> qs = {"what are the names?", "which of those wins most?"};
  std::vector<AnswerCoordinates> g1 = {{{0, 0}}, {{0, 1}}}, g2 = {{{2, 1}}, {{0, 1}}};
  auto a = answer_sequence(qs, f.table, f.params, true, &g1);
  auto b = answer_sequence(qs, f.table, f.params, true, &g2);
  EXPECT_EQ(a[0].scores, b[0].scores);
  EXPECT_NE(a[1].scores, b[1].scores);
}

TEST(Sequence, LossMatchesMeanOfStepLosses) {
  Fixture f;
  QuestionSequence seq{"s", "", "t", {}};
  seq.entries.push_back({"s", 1, "what are the names?", f.table.column_cells(0), {}});
  seq.entries.push_back({"s", 2, "which of those wins most?", {{2, 1}}, {}});
  Graph<double> g;
  double loss = sequence_loss(g, seq, f.table, f.params, true).value().item();
  std::vector<AnswerCoordinates> golds = {seq.entries[0].gold, seq.entries[1].gold};
  auto steps = answer_sequence(seq, f.table, f.params, true);
  double want = 0;
  for (size_t k = 0; k < 2; ++k) {
    Graph<double> h;
    want += answer_loss(h.constant(steps[k].scores), golds[k]).value().item() / 2;
  }
  EXPECT_NEAR(loss, want, 1e-12);
}
