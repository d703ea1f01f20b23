#include "trustsim/config.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace trustsim {
namespace {

TEST(Config, DefaultsCarryPublishedConstants) {
  const ExperimentConfig c;
  EXPECT_EQ(c.gains.success_honest, 1.2);
  EXPECT_EQ(c.gains.success_cheat, 0.8);
  EXPECT_EQ(c.gains.failure_honest, 1.2);
  EXPECT_EQ(c.gains.failure_cheat, 0.8);
  EXPECT_EQ(c.reward.reward_alpha, 0.1);
  EXPECT_EQ(c.reward.reward_beta, 0.1);
  EXPECT_EQ(c.reward.theta, 1.0);
  EXPECT_EQ(c.reward.mu, 1.0);
  EXPECT_EQ(c.train.learning_rate, 6.25e-5);
  EXPECT_EQ(c.train.batch_size, 32);
  EXPECT_EQ(c.train.epochs, 600);
  EXPECT_EQ(c.collection_games, 8000);
  EXPECT_EQ(c.eval_games, 2000);
  EXPECT_EQ(c.game.max_rounds, 10);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.master_seed = 123;
  c.train.hidden_widths = {8};
  c.risk.w = -0.3;
  c.robot_observes_p2_action = false;
  c.game.opponent_mode = OpponentMode::kScripted;
  EXPECT_EQ(ConfigFromJson(ConfigToJson(c)), c);
  testing::TempDir dir;
  SaveConfig(c, dir / "c.json");
  EXPECT_EQ(LoadConfig(dir / "c.json"), c);
}

TEST(Config, PartialJsonKeepsDefaults) {
  const auto c = ConfigFromJson(nlohmann::json::parse(R"({"train": {"epochs": 5}})"));
  EXPECT_EQ(c.train.epochs, 5);
  EXPECT_EQ(c.train.batch_size, 32);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(ConfigFromJson(nlohmann::json::parse(R"({"tain": {}})")), std::invalid_argument);
  EXPECT_THROW(ConfigFromJson(nlohmann::json::parse(R"({"game": {"rounds": 3}})")),
               std::invalid_argument);
  ExperimentConfig c;
  c.collection_games = 4;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = ExperimentConfig{};
  c.gains.success_cheat = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace trustsim
