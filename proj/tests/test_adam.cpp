#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "seqtab/adam.hpp"

using namespace seqtab;

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Parameter<double> p("p", Array<double>({3}, {1, -2, 3}));
  AdamState<double> st;
  for (int i = 0; i < 10; ++i) {
    p.zero_grad();
    adam_step<double>({&p}, st);
  }
  EXPECT_EQ(p.value.storage(), (std::vector<double>{1, -2, 3}));
}

TEST(Adam, FirstUpdateIsAlpha) {
  Parameter<double> p("p", Array<double>::scalar(0));
  AdamState<double> st;
  p.grad[0] = 1;
  adam_step<double>({&p}, st);
  EXPECT_NEAR(p.value[0], -0.001, 1e-9);
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, ConvergesOnQuadratic) {
  Parameter<double> w("w", Array<double>::scalar(0));
  AdamState<double> st;
  st.config.alpha = 0.1;
  for (int i = 0; i < 100; ++i) {
    w.grad[0] = 2 * (w.value[0] - 3);
    adam_step<double>({&w}, st);
  }
  EXPECT_LT(std::abs(w.value[0] - 3), 0.5);
}

TEST(Adam, NonFiniteGradientNamesParameterAndModifiesNothing) {
  Parameter<float> a("alpha_w", Array<float>::scalar(1));
  Parameter<float> b("beta_w", Array<float>::scalar(2));
  AdamState<float> st;
  a.grad[0] = 1;
  b.grad[0] = std::numeric_limits<float>::quiet_NaN();
  try {
    adam_step<float>({&a, &b}, st);
    FAIL();
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("beta_w"), std::string::npos);
  }
  EXPECT_EQ(a.value[0], 1.0f);
  EXPECT_EQ(st.step, 0);
}

TEST(Adam, ClipGradNorm) {
  Parameter<double> a("a", Array<double>({2}, {3, 0}));
  Parameter<double> b("b", Array<double>({1}, {4}));
  a.grad = Array<double>({2}, {3, 0});
  b.grad = Array<double>({1}, {4});
  EXPECT_DOUBLE_EQ(grad_norm<double>({&a, &b}), 5.0);
  clip_grad_norm<double>({&a, &b}, 1.0);
  EXPECT_NEAR(grad_norm<double>({&a, &b}), 1.0, 1e-12);
  EXPECT_NEAR(a.grad[0], 0.6, 1e-12);
  clip_grad_norm<double>({&a, &b}, 10.0);
  EXPECT_NEAR(grad_norm<double>({&a, &b}), 1.0, 1e-12);
}
