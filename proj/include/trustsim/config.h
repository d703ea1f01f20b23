#pragma once

#include <cstdint>
#include <filesystem>

#include "json.hpp"

#include "trustsim/game.h"
#include "trustsim/human_model.h"
#include "trustsim/robot_mind.h"
#include "trustsim/trainer.h"

namespace trustsim {

struct ExperimentConfig {
  GameConfig game;
  TrustState initial_trust;
  TrustGains gains;
  RiskParams risk;
  BeliefState initial_belief;
  RewardParams reward;
  TrainConfig train;
  // Whether the robot's observation carries P2's actual move.
  bool robot_observes_p2_action = true;
  int collection_games = 8000;
  int eval_games = 2000;
  double trust_bucket_threshold = 0.5;
  std::uint64_t master_seed = 20240917;

  void Validate() const;
  int feature_width() const;
  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json ConfigToJson(const ExperimentConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig ConfigFromJson(const nlohmann::json& j);

ExperimentConfig LoadConfig(const std::filesystem::path& path);
void SaveConfig(const ExperimentConfig& cfg, const std::filesystem::path& path);

}  // namespace trustsim
