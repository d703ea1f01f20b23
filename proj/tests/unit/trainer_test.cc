#include "trustsim/trainer.h"

#include <gtest/gtest.h>

#include "test_util.h"
#include "trustsim/checkpoint.h"

namespace trustsim {
namespace {

// Three-state chain: action 1 moves right, action 0 stays; entering state 2
// pays 1 and terminates.
FeatureDataset ChainData(int copies) {
  FeatureDataset d;
  const int n = 4 * copies;
  d.features = Eigen::MatrixXd::Zero(3, n);
  d.next_features = Eigen::MatrixXd::Zero(3, n);
  int col = 0;
  for (int c = 0; c < copies; ++c) {
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a, ++col) {
        const int next = s + a;
        d.features(s, col) = 1.0;
        d.next_features(next, col) = 1.0;
        d.actions.push_back(a);
        d.rewards.push_back(next == 2 ? 1.0 : 0.0);
        d.done.push_back(next == 2);
      }
    }
  }
  return d;
}

TEST(Trainer, TabularChainMatchesValueIteration) {
  constexpr double kGamma = 0.9;
  // Value iteration by hand: Q(1,1) = 1, Q(1,0) = 0.9, Q(0,1) = 0.9, Q(0,0) = 0.81.
  const double want[2][2] = {{0.81, 0.9}, {0.9, 1.0}};

  TrainConfig cfg;
  cfg.gamma = kGamma;
  cfg.cql_alpha = 0.0;
  cfg.learning_rate = 1e-2;
  cfg.batch_size = 8;
  cfg.epochs = 3000;
  cfg.target_sync_interval = 1;
  cfg.checkpoint_interval = 0;
  const auto result = TrainNetwork(ChainData(2), nullptr, QNetwork({3, 2}), cfg);
  for (int s = 0; s < 2; ++s) {
    std::vector<double> x(3, 0.0);
    x[s] = 1.0;
    const auto q = result.network.Forward(x);
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(q[a], want[s][a], 1e-3) << s << "," << a;
  }
}

FeatureDataset SignData(int n, Rng& rng) {
  FeatureDataset d;
  d.features.resize(5, n);
  d.next_features.resize(5, n);
  for (int i = 0; i < d.features.size(); ++i) {
    d.features.data()[i] = rng.Uniform();
    d.next_features.data()[i] = rng.Uniform();
  }
  for (int i = 0; i < n; ++i) {
    const int a = static_cast<int>(rng.UniformInt(0, 1));
    d.actions.push_back(a);
    d.rewards.push_back(a == 1 ? 1.0 : -1.0);
    d.done.push_back(0);
  }
  return d;
}

TrainConfig SmallConfig() {
  TrainConfig cfg;
  cfg.gamma = 0.0;
  cfg.learning_rate = 1e-3;
  cfg.epochs = 20;
  cfg.hidden_widths = {16, 16};
  cfg.checkpoint_interval = 0;
  cfg.seed = 77;
  return cfg;
}

TEST(Trainer, LearnsDominantAction) {
  Rng rng(31);
  const FeatureDataset train = SignData(2000, rng);
  Rng init(1);
  const auto result =
      TrainNetwork(train, nullptr, QNetwork::Initialized({5, 16, 16, 2}, init), SmallConfig());
  int ones = 0;
  constexpr int kHeldOut = 1000;
  for (int i = 0; i < kHeldOut; ++i) {
    std::vector<double> x(5);
    for (double& v : x) v = rng.Uniform();
    const auto q = result.network.Forward(x);
    ones += q[1] > q[0];
  }
  EXPECT_GE(ones, 990);
  EXPECT_LT(result.metrics.back().loss, result.metrics.front().loss);
}

TEST(Trainer, DeterministicForFixedSeed) {
  Rng rng(4);
  const FeatureDataset train = SignData(300, rng);
  const FeatureDataset val = SignData(60, rng);
  auto run = [&] {
    Rng init(2);
    return TrainNetwork(train, &val, QNetwork::Initialized({5, 16, 16, 2}, init),
                        SmallConfig());
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.network, b.network);
  EXPECT_EQ(a.best_network, b.best_network);
  EXPECT_EQ(a.metrics, b.metrics);
  EXPECT_EQ(a.gradient_steps, 20 * 10);  // 300 rows in batches of 32
}

TEST(Trainer, TargetSyncCadenceMatters) {
  Rng rng(4);
  FeatureDataset train = SignData(256, rng);
  TrainConfig cfg = SmallConfig();
  cfg.gamma = 0.9;
  cfg.epochs = 4;
  Rng i1(2), i2(2);
  const auto slow = TrainNetwork(train, nullptr, QNetwork::Initialized({5, 16, 16, 2}, i1), cfg);
  cfg.target_sync_interval = 3;
  const auto fast = TrainNetwork(train, nullptr, QNetwork::Initialized({5, 16, 16, 2}, i2), cfg);
  EXPECT_FALSE(slow.network == fast.network);
}

TEST(Trainer, DivergenceSavesLastGoodCheckpoint) {
  testing::TempDir dir;
  Rng rng(9);
  FeatureDataset train = SignData(100, rng);
  train.rewards[57] = std::numeric_limits<double>::quiet_NaN();
  TrainConfig cfg = SmallConfig();
  TrainOptions opts;
  opts.checkpoint_prefix = dir / "run";
  Rng init(3);
  const QNetwork start = QNetwork::Initialized({5, 16, 16, 2}, init);
  try {
    TrainNetwork(train, nullptr, start, cfg, opts);
    FAIL() << "expected divergence";
  } catch (const TrainingDivergedError& e) {
    EXPECT_EQ(e.epoch(), 1);
    EXPECT_NE(std::find(e.rows().begin(), e.rows().end(), 57), e.rows().end());
  }
  const QNetwork saved = LoadModel(dir / "run.last_good.ckpt");
  EXPECT_TRUE(saved.AllFinite());
}

TEST(Trainer, PeriodicCheckpoints) {
  testing::TempDir dir;
  Rng rng(12);
  const FeatureDataset train = SignData(64, rng);
  TrainConfig cfg = SmallConfig();
  cfg.epochs = 4;
  cfg.checkpoint_interval = 2;
  TrainOptions opts;
  opts.checkpoint_prefix = dir / "p";
  int seen = 0;
  opts.on_epoch = [&](const EpochMetrics& m) { EXPECT_EQ(m.epoch, ++seen); };
  Rng init(3);
  const auto r = TrainNetwork(train, nullptr, QNetwork::Initialized({5, 16, 16, 2}, init), cfg, opts);
  EXPECT_EQ(seen, 4);
  EXPECT_TRUE(std::filesystem::exists(dir / "p.epoch0002.ckpt"));
  EXPECT_EQ(LoadModel(dir / "p.epoch0004.ckpt"), r.network);
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.learning_rate = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.gamma = 1.5;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace trustsim
