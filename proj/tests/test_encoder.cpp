#include <gtest/gtest.h>

#include <filesystem>

#include "seqtab/encoder.hpp"
#include "support/gradcheck.hpp"

using namespace seqtab;

namespace {

Table small_table() { return Table("t", {"Name", "Wins"}, {{"abc", "3"}, {"cab", "7"}, {"bca", "9"}}); }

ModelParams<double> params_for(const Table& t, std::vector<std::string> extra = {}, int d = 4) {
  ModelConfig cfg;
  cfg.d = d;
  cfg.char_dim = 3;
  cfg.init_scale = 0.5;
  cfg.seed = 5;
  std::vector<std::string> texts = t.headers();
  for (const auto& row : t.cells()) texts.insert(texts.end(), row.begin(), row.end());
  texts.insert(texts.end(), extra.begin(), extra.end());
  return ModelParams<double>::create(cfg, Vocabulary::from_texts(texts));
}

void zero(Parameter<double>& p) { p.value.fill(0); }

}  // namespace

TEST(Vocabulary, IdsAndEncoding) {
  auto v = Vocabulary::from_texts({"Bca", "  a  b "});
  EXPECT_EQ(v.size(), 2 + 4);  // ' ', a, b, c
  EXPECT_EQ(v.id(U' '), 2);
  EXPECT_EQ(v.id(U'a'), 3);
  EXPECT_EQ(v.id(U'z'), Vocabulary::kUnknown);
  EXPECT_EQ(v.encode("ABz", 10), (std::vector<int>{3, 4, Vocabulary::kUnknown}));
  EXPECT_EQ(v.encode("", 10), (std::vector<int>{Vocabulary::kEmpty}));
  EXPECT_EQ(v.encode("   ", 10), (std::vector<int>{Vocabulary::kEmpty}));
  EXPECT_EQ(v.encode("abcabc", 4).size(), 4u);
}

TEST(Encoder, IdenticalStringsIdenticalQ) {
  auto p = params_for(small_table(), {"which name wins?"});
  Graph<double> g;
  auto vars = bind(g, p);
  auto a = encode_question("which name wins?", vars, p);
  auto b = encode_question("which name wins?", vars, p);
  auto c = encode_question("which name wins!", vars, p);
  EXPECT_EQ(a.value(), b.value());
  EXPECT_NE(a.value(), c.value());
  EXPECT_EQ(a.shape(), (Shape{1, 4}));
}

TEST(Encoder, ZeroLstmGivesZeroQ) {
  auto p = params_for(small_table(), {"q"});
  for (auto* q : p.lstm.list()) zero(*q);
  Graph<double> g;
  auto vars = bind(g, p);
  for (double v : encode_question("what?", vars, p).value().values()) EXPECT_EQ(v, 0.0);
}

TEST(Encoder, TableShapesAndZeroW1) {
  Table t = small_table();
  auto p = params_for(t);
  {
    Graph<double> g;
    auto vars = bind(g, p);
    auto enc = encode_table(t, vars, p);
    EXPECT_EQ(enc.h.shape(), (Shape{2, 4}));
    EXPECT_EQ(enc.t1.shape(), (Shape{6, 4}));
    EXPECT_EQ(enc.t.shape(), (Shape{6, 4}));
    for (double v : enc.t.value().values()) EXPECT_GE(v, 0.0);
  }
  zero(p.w1);
  Graph<double> g;
  auto vars = bind(g, p);
  for (double v : encode_table(t, vars, p).t.value().values()) EXPECT_EQ(v, 0.0);
}

TEST(Encoder, TypedCellDefinition) {
  // t_ij = relu(t1_ij * (h_j W1)), elementwise.
  Table t = small_table();
  auto p = params_for(t);
  Graph<double> g;
  auto vars = bind(g, p);
  auto enc = encode_table(t, vars, p);
  const auto& h = enc.h.value();
  const auto& t1 = enc.t1.value();
  const auto& w1 = p.w1.value;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 4; ++k) {
        double hw = 0;
        for (int m = 0; m < 4; ++m) hw += h.at(j, m) * w1.at(m, k);
        double want = std::max(0.0, t1.at(i * 2 + j, k) * hw);
        EXPECT_NEAR(enc.t.value().at(i * 2 + j, k), want, 1e-12);
      }
    }
  }
}

TEST(Encoder, ConditioningNoOpWithoutPreviousAnswer) {
  Table t = small_table();
  auto p = params_for(t, {"q?"});
  zero(p.w4);
  Graph<double> g;
  auto vars = bind(g, p);
  auto enc = encode_table(t, vars, p);
  auto q = encode_question("q?", vars, p);
  auto cond = condition_on_previous(enc, q, answer_indicators<double>({}, 3, 2), vars);
  EXPECT_EQ(cond.t.value(), enc.t.value());
}

TEST(Encoder, ConditioningDoublesMarkedCell) {
  Table t = small_table();
  auto p = params_for(t, {"q?"});
  zero(p.w4);
  p.w3.value[0] = 1.0;
  Graph<double> g;
  auto vars = bind(g, p);
  auto enc = encode_table(t, vars, p);
  auto q = encode_question("q?", vars, p);
  auto cond = condition_on_previous(enc, q, answer_indicators<double>({{1, 0}}, 3, 2), vars);
  for (int cell = 0; cell < 6; ++cell) {
    for (int k = 0; k < 4; ++k) {
      double factor = cell == 2 ? 2.0 : 1.0;
      EXPECT_NEAR(cond.t.value().at(cell, k), factor * enc.t.value().at(cell, k), 1e-12);
    }
  }
}

TEST(Encoder, ConditioningShapeMismatch) {
  Table t = small_table();
  auto p = params_for(t, {"q?"});
  Graph<double> g;
  auto vars = bind(g, p);
  auto enc = encode_table(t, vars, p);
  auto q = encode_question("q?", vars, p);
  EXPECT_THROW(condition_on_previous(enc, q, Array<double>({2, 2}), vars), ShapeError);
}

TEST(Encoder, AnswerIndicators) {
  auto a = answer_indicators<float>({{0, 1}, {2, 0}}, 3, 2);
  EXPECT_EQ(a.shape(), (Shape{3, 2}));
  EXPECT_EQ(a.storage(), (std::vector<float>{0, 1, 0, 0, 1, 0}));
}

TEST(ModelParams, RecordsRoundTrip) {
  Table t = small_table();
  auto p = params_for(t, {"what?"});
  auto f = ModelParams<float>::create(p.config, p.vocab);
  auto back = ModelParams<float>::from_records(f.to_records());
  EXPECT_EQ(back.vocab, f.vocab);
  EXPECT_EQ(back.config.d, f.config.d);
  auto a = f.list(), b = back.list();
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->name, b[i]->name);
    EXPECT_EQ(a[i]->value, b[i]->value);
  }
  auto records = f.to_records();
  records.erase(records.begin() + 3);
  EXPECT_THROW(ModelParams<float>::from_records(records), CheckpointError);
}

TEST(ModelParams, CreateIsSeeded) {
  Table t = small_table();
  auto a = params_for(t), b = params_for(t);
  EXPECT_EQ(a.w5.value, b.w5.value);
  EXPECT_EQ(a.lstm.h0.value, Array<double>({1, 4}));
  ModelConfig bad;
  bad.d = 0;
  EXPECT_THROW(ModelParams<double>::create(bad, a.vocab), ShapeError);
}
