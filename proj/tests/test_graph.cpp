#include <gtest/gtest.h>

#include <cmath>

#include "support/gradcheck.hpp"

using namespace seqtab;

TEST(Ops, SoftmaxOfZerosIsUniform) {
  Graph<double> g;
  auto s = ad::softmax(g.constant(Array<double>({3})), 0);
  for (double v : s.value().values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(Ops, SoftmaxIsStableForLargeInputs) {
  Graph<double> g;
  auto s = ad::softmax(g.constant(Array<double>({1, 3}, {1000, 1000, -1000})), 1);
  EXPECT_NEAR(s.value()[0], 0.5, 1e-12);
  EXPECT_NEAR(s.value()[2], 0.0, 1e-12);
}

TEST(Ops, Relu) {
  Graph<double> g;
  auto r = ad::relu(g.constant(Array<double>({2}, {-1, 2})));
  EXPECT_EQ(r.value().storage(), (std::vector<double>{0, 2}));
}

TEST(Ops, BilinearIdentity) {
  Graph<double> g;
  Array<double> eye({3, 3});
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1;
  auto e0 = g.constant(Array<double>({3}, {1, 0, 0}));
  EXPECT_DOUBLE_EQ(ad::bilinear(e0, g.constant(eye), e0).value().item(), 1.0);
}

TEST(Ops, MatmulValues) {
  Graph<double> g;
  auto c = ad::matmul(g.constant(Array<double>({2, 2}, {1, 2, 3, 4})), g.constant(Array<double>({2, 1}, {5, 6})));
  EXPECT_EQ(c.value().storage(), (std::vector<double>{17, 39}));
  EXPECT_EQ(c.shape(), (Shape{2, 1}));
}

TEST(Ops, ShapeErrorsNameOpAndShapes) {
  Graph<double> g;
  auto a = g.constant(Array<double>({2, 3}));
  auto b = g.constant(Array<double>({2, 3}));
  try {
    ad::matmul(a, b);
    FAIL();
  } catch (const ShapeError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos) << msg;
  }
  EXPECT_THROW(ad::add(a, g.constant(Array<double>({4}))), ShapeError);
  EXPECT_THROW(ad::concat<double>({a, g.constant(Array<double>({2, 2}))}, 0), ShapeError);
  EXPECT_THROW(ad::softmax(a, 2), ShapeError);
}

TEST(Backward, SumGivesOnes) {
  Parameter<double> x("x", Array<double>({2, 3}, {1, 2, 3, 4, 5, 6}));
  Graph<double> g;
  g.backward(ad::sum_all(g.param(x)));
  for (double v : x.grad.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Backward, SigmoidSlopeAtZero) {
  Parameter<double> w("w", Array<double>::scalar(0));
  Graph<double> g;
  g.backward(ad::sum_all(ad::sigmoid(g.param(w))));
  EXPECT_DOUBLE_EQ(w.grad[0], 0.25);
}

TEST(Backward, NonScalarLossRejected) {
  Graph<double> g;
  auto v = g.variable(Array<double>({2}));
  EXPECT_THROW(g.backward(v), ShapeError);
}

TEST(Backward, ReusedNodeAccumulates) {
  Parameter<double> x("x", Array<double>::scalar(3));
  Graph<double> g;
  auto v = g.param(x);
  g.backward(ad::sum_all(ad::mul(v, v)));
  EXPECT_DOUBLE_EQ(x.grad[0], 6.0);
}

TEST(Backward, VariableLeafGradient) {
  Graph<double> g;
  auto v = g.variable(Array<double>({2}, {1, -2}));
  g.backward(ad::sum_all(ad::mul(v, g.constant(Array<double>({2}, {3, 4})))));
  EXPECT_EQ(g.grad(v).storage(), (std::vector<double>{3, 4}));
}

TEST(Backward, BceClipRegionHasZeroGradient) {
  Parameter<double> a("a", Array<double>({2}, {0.0, 1.0}));
  Graph<double> g;
  g.backward(ad::bce_mean(g.param(a), Array<double>({2}, {1, 0})));
  EXPECT_DOUBLE_EQ(a.grad[0], 0.0);
  EXPECT_DOUBLE_EQ(a.grad[1], 0.0);
}

TEST(GradCheck, EveryOpMatchesFiniteDifferences) {
  for (uint64_t trial = 0; trial < 10; ++trial) {
    std::mt19937_64 rng(trial);
    for (auto& c : gradcheck::op_cases(rng)) {
      auto rep = c.run();
      EXPECT_TRUE(rep.passed()) << c.name << " trial " << trial << ": " << rep.worst << " rel "
                                << rep.max_rel_error;
      EXPECT_GT(rep.n_checked, 0u);
    }
  }
}

TEST(GradCheck, PipelineOnTwoByTwoTable) {
  for (uint64_t trial = 0; trial < 10; ++trial) {
    gradcheck::Pipeline p(100 + trial);
    auto rep = p.run();
    EXPECT_TRUE(rep.passed()) << "trial " << trial << ": " << rep.worst << " rel " << rep.max_rel_error;
  }
}
