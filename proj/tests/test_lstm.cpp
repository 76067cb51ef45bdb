#include <gtest/gtest.h>

#include "seqtab/lstm.hpp"
#include "support/gradcheck.hpp"

using namespace seqtab;

namespace {

LstmParams<double> random_lstm(int in, int d, uint64_t seed) {
  LstmParams<double> p("l", in, d);
  UniformInit init(seed);
  p.init(init, 0.5);
  init.fill(p.h0.value, 0.5);
  init.fill(p.c0.value, 0.5);
  return p;
}

}  // namespace

TEST(Lstm, ZeroWeightsAndInputsGiveZero) {
  LstmParams<double> p("l", 3, 4);
  Graph<double> g;
  auto vars = bind(g, p);
  auto emb = g.constant(Array<double>({5, 3}));
  auto h = lstm_encode(emb, {1, 2, 3}, vars);
  for (double v : h.value().values()) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, EmptySequenceReturnsInitialState) {
  auto p = random_lstm(2, 3, 5);
  Graph<double> g;
  auto vars = bind(g, p);
  auto emb = g.constant(Array<double>({4, 2}));
  EXPECT_EQ(lstm_encode(emb, {}, vars).value().storage(), p.h0.value.storage());
  EXPECT_EQ(lstm_encode_batch(emb, {{}}, vars).value().storage(), p.h0.value.storage());
}

TEST(Lstm, OneCharEqualsOneCellStep) {
  auto p = random_lstm(3, 4, 9);
  std::mt19937_64 rng(1);
  Array<double> table = gradcheck::random_array(rng, {6, 3});
  Graph<double> g;
  auto vars = bind(g, p);
  auto emb = g.constant(table);
  auto encoded = lstm_encode(emb, {4}, vars);
  auto x = g.constant(Array<double>({1, 3}, {table.at(4, 0), table.at(4, 1), table.at(4, 2)}));
  auto [h, c] = lstm_cell(x, vars.h0, vars.c0, vars);
  for (size_t i = 0; i < h.size(); ++i) EXPECT_DOUBLE_EQ(encoded.value()[i], h.value()[i]);
}

TEST(Lstm, CellMatchesHandComputedGates) {
  // d = 1, in = 1: gates are scalars.
  LstmParams<double> p("l", 1, 1);
  p.wx.value = Array<double>({1, 4}, {0.5, -0.3, 0.8, 0.1});
  p.wh.value = Array<double>({1, 4}, {0.2, 0.4, -0.6, 0.9});
  p.b.value = Array<double>({1, 4}, {0.1, 0.2, 0.3, 0.4});
  const double x = 0.7, h0 = -0.2, c0 = 0.3;
  auto sig = [](double z) { return 1 / (1 + std::exp(-z)); };
  const double i = sig(0.5 * x + 0.2 * h0 + 0.1), f = sig(-0.3 * x + 0.4 * h0 + 0.2);
  const double gg = std::tanh(0.8 * x - 0.6 * h0 + 0.3), o = sig(0.1 * x + 0.9 * h0 + 0.4);
  const double c = f * c0 + i * gg, h = o * std::tanh(c);
  Graph<double> g;
  auto vars = bind(g, p);
  auto [hv, cv] = lstm_cell(g.constant(Array<double>({1, 1}, {x})), g.constant(Array<double>({1, 1}, {h0})),
                            g.constant(Array<double>({1, 1}, {c0})), vars);
  EXPECT_NEAR(hv.value()[0], h, 1e-12);
  EXPECT_NEAR(cv.value()[0], c, 1e-12);
}

TEST(Lstm, FusedBatchMatchesComposedEncoder) {
  auto p = random_lstm(3, 5, 17);
  std::mt19937_64 rng(2);
  Array<double> table = gradcheck::random_array(rng, {7, 3});
  std::vector<std::vector<int>> seqs = {{1, 2, 3}, {6}, {}, {0, 0, 4, 5, 2}, {3, 3}};
  Graph<double> g;
  auto vars = bind(g, p);
  auto emb = g.constant(table);
  auto batch = lstm_encode_batch(emb, seqs, vars);
  ASSERT_EQ(batch.shape(), (Shape{5, 5}));
  for (size_t s = 0; s < seqs.size(); ++s) {
    auto one = lstm_encode(emb, seqs[s], vars);
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(batch.value().at(static_cast<int>(s), j), one.value()[j], 1e-12);
  }
}

TEST(Lstm, FusedAndComposedGradientsAgree) {
  std::vector<std::vector<int>> seqs = {{1, 2, 3}, {4}, {2, 0}};
  auto run = [&](bool fused) {
    auto p = random_lstm(2, 3, 23);
    std::mt19937_64 rng(3);
    Parameter<double> emb("emb", gradcheck::random_array(rng, {5, 2}));
    Graph<double> g;
    auto vars = bind(g, p);
    auto e = g.param(emb);
    Var<double> out;
    if (fused) {
      out = lstm_encode_batch(e, seqs, vars);
    } else {
      std::vector<Var<double>> rows;
      for (const auto& s : seqs) rows.push_back(lstm_encode(e, s, vars));
      out = ad::concat(rows, 0);
    }
    auto w = gradcheck::random_array(rng, {3, 3});
    g.backward(gradcheck::project(out, w));
    std::vector<double> grads = emb.grad.storage();
    for (auto* q : p.list()) grads.insert(grads.end(), q->grad.storage().begin(), q->grad.storage().end());
    return grads;
  };
  auto a = run(true), b = run(false);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10) << i;
}

TEST(Lstm, ThreeStepFiniteDifferences) {
  auto p = random_lstm(2, 3, 31);
  std::mt19937_64 rng(4);
  Parameter<double> emb("emb", gradcheck::random_array(rng, {4, 2}));
  auto w = gradcheck::random_array(rng, {1, 3});
  std::vector<Parameter<double>*> params = p.list();
  params.push_back(&emb);
  for (bool fused : {false, true}) {
    auto rep = gradcheck::check(params, [&](Graph<double>& g) {
      auto vars = bind(g, p);
      auto e = g.param(emb);
      auto h = fused ? lstm_encode_batch(e, {{0, 3, 1}}, vars) : lstm_encode(e, {0, 3, 1}, vars);
      return gradcheck::project(h, w);
    });
    EXPECT_TRUE(rep.passed()) << (fused ? "fused " : "composed ") << rep.worst;
  }
}

TEST(Lstm, BindIsCachedPerParameter) {
  LstmParams<double> p("l", 2, 2);
  Graph<double> g;
  auto a = bind(g, p);
  auto b = bind(g, p);
  EXPECT_EQ(a.wx.id, b.wx.id);
}
