#include "trustsim/adam.h"

#include <cmath>

#include <gtest/gtest.h>

namespace trustsim {
namespace {

TEST(Adam, ZeroGradientLeavesWeights) {
  std::vector<double> w{0.5, -1.0};
  const std::vector<double> g{0.0, 0.0};
  AdamState s;
  AdamStep(w, g, s, AdamConfig{});
  EXPECT_EQ(w, (std::vector<double>{0.5, -1.0}));
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> w{1.0, 1.0, 1.0};
  const std::vector<double> g{3.0, -0.02, 1e3};
  AdamState s;
  AdamConfig cfg;
  AdamStep(w, g, s, cfg);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(w[i], 1.0 - cfg.learning_rate * (g[i] > 0 ? 1 : -1), 1e-9);
  }
}

TEST(Adam, MatchesHandComputedSecondStep) {
  std::vector<double> w{0.0};
  AdamState s;
  const AdamConfig cfg{0.1, 0.9, 0.999, 1e-8, 0.0};
  AdamStep(w, std::vector<double>{1.0}, s, cfg);
  AdamStep(w, std::vector<double>{0.5}, s, cfg);
  const double m = 0.9 * 0.1 + 0.1 * 0.5, v = 0.999 * 0.001 + 0.001 * 0.25;
  const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
  EXPECT_NEAR(w[0], -0.1 / (1 + 1e-8) - 0.1 * mhat / (std::sqrt(vhat) + 1e-8), 1e-12);
}

TEST(Adam, ConvergesOnQuadratic) {
  std::vector<double> w{1.0};
  AdamState s;
  const AdamConfig cfg{1e-3, 0.9, 0.999, 1e-8, 0.0};
  for (int i = 0; i < 10000; ++i) AdamStep(w, std::vector<double>{2 * w[0]}, s, cfg);
  EXPECT_LT(std::abs(w[0]), 1e-3);
}

TEST(Adam, SizeMismatchThrows) {
  std::vector<double> w{1.0, 2.0};
  AdamState s;
  EXPECT_THROW(AdamStep(w, std::vector<double>{1.0}, s, AdamConfig{}), std::invalid_argument);
  AdamStep(w, std::vector<double>{1.0, 1.0}, s, AdamConfig{});
  std::vector<double> w3{1.0, 2.0, 3.0};
  EXPECT_THROW(AdamStep(w3, std::vector<double>{1.0, 1.0, 1.0}, s, AdamConfig{}),
               std::invalid_argument);
}

}  // namespace
}  // namespace trustsim
