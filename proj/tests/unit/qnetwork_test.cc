#include "trustsim/qnetwork.h"

#include <fstream>

#include <gtest/gtest.h>

#include "json.hpp"

namespace trustsim {
namespace {

TEST(QNetwork, ZeroWeightsReturnBias) {
  QNetwork net({4, 3, 2});
  net.Bias(1)(0) = 0.25;
  net.Bias(1)(1) = -1.5;
  const auto q = net.Forward(std::vector<double>{0.3, -2.0, 7.0, 1.0});
  EXPECT_EQ(q, (std::vector<double>{0.25, -1.5}));
}

TEST(QNetwork, MatchesPublishedTestVector) {
  std::ifstream in(std::string(TRUSTSIM_FIXTURE_DIR) + "/qnet_test_vector.json");
  ASSERT_TRUE(in);
  const auto j = nlohmann::json::parse(in);
  QNetwork net(j["widths"].get<std::vector<int>>());
  for (int l = 0; l < net.num_layers(); ++l) {
    const auto& layer = j["layers"][l];
    for (int o = 0; o < net.widths()[l + 1]; ++o) {
      for (int i = 0; i < net.widths()[l]; ++i) {
        net.Weights(l)(o, i) = layer["weight"][o][i].get<double>();
      }
      net.Bias(l)(o) = layer["bias"][o].get<double>();
    }
  }
  for (std::size_t k = 0; k < j["inputs"].size(); ++k) {
    const auto q = net.Forward(j["inputs"][k].get<std::vector<double>>());
    const auto want = j["outputs"][k].get<std::vector<double>>();
    ASSERT_EQ(q.size(), want.size());
    for (std::size_t a = 0; a < q.size(); ++a) EXPECT_NEAR(q[a], want[a], 1e-10);
  }
}

TEST(QNetwork, ForwardIsPureAndBatchConsistent) {
  Rng rng(1);
  const QNetwork net = QNetwork::Initialized({5, 8, 8, 2}, rng);
  Eigen::MatrixXd x(5, 6);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform() * 2 - 1;
  const Eigen::MatrixXd a = net.Forward(x);
  const Eigen::MatrixXd b = net.Forward(x);
  EXPECT_EQ(a, b);
  for (int c = 0; c < 6; ++c) {
    std::vector<double> col(x.col(c).data(), x.col(c).data() + 5);
    const auto q = net.Forward(col);
    EXPECT_NEAR(q[0], a(0, c), 1e-14);
    EXPECT_NEAR(q[1], a(1, c), 1e-14);
  }
}

TEST(QNetwork, InitializationRangeAndSeeding) {
  Rng r1(3), r2(3);
  const QNetwork a = QNetwork::Initialized({5, 64, 64, 2}, r1);
  const QNetwork b = QNetwork::Initialized({5, 64, 64, 2}, r2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.num_params(), 5u * 64 + 64 + 64 * 64 + 64 + 64 * 2 + 2);
  for (int l = 0; l < a.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(a.widths()[l]);
    EXPECT_LE(a.Weights(l).cwiseAbs().maxCoeff(), bound);
    EXPECT_EQ(a.Bias(l).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(QNetwork, RejectsBadInput) {
  QNetwork net({4, 3, 2});
  EXPECT_THROW(net.Forward(Eigen::MatrixXd::Zero(5, 1)), std::invalid_argument);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 1);
  x(2, 0) = std::nan("");
  EXPECT_THROW(net.Forward(x), std::invalid_argument);
}

TEST(QNetwork, BackwardMatchesFiniteDifferences) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    QNetwork net = QNetwork::Initialized({4, 3, 2}, rng);
    for (double& p : net.params()) p += 0.1 * (rng.Uniform() - 0.5);
    Eigen::MatrixXd x(4, 8), w(2, 8);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform() * 2 - 1;
    for (int i = 0; i < w.size(); ++i) w.data()[i] = rng.Uniform() * 2 - 1;
    auto loss = [&](const QNetwork& n) { return (n.Forward(x).array() * w.array()).sum(); };
    QNetwork::Tape tape;
    net.Forward(x, &tape);
    std::vector<double> grad(net.num_params(), 0.0);
    net.Backward(tape, w, grad);
    for (std::size_t i = 0; i < net.num_params(); ++i) {
      QNetwork plus = net, minus = net;
      plus.params()[i] += 1e-5;
      minus.params()[i] -= 1e-5;
      const double fd = (loss(plus) - loss(minus)) / 2e-5;
      EXPECT_NEAR(grad[i], fd, 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

}  // namespace
}  // namespace trustsim
