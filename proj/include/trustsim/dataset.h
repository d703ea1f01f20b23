#pragma once

// Recorded decision rounds, split by game, stored as JSON lines. Rewards are
// never stored: they are derived from the outcome info per reward scheme.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "trustsim/cql.h"
#include "trustsim/robot_mind.h"

namespace trustsim {

inline constexpr int kDatasetSchemaVersion = 1;

struct TransitionInfo {
  int a_p2 = 0;
  int a_p1 = 0;
  int dc_p1 = 0;
  int dc_p2 = 0;
  double trust_mean = 0.5;  // E(T) of the simulated human
  double trust_draw = 0.5;
  int m = 1;
  int n = 0;
  std::int64_t game_id = 0;
  int round = 0;

  bool operator==(const TransitionInfo&) const = default;
};

struct Transition {
  RobotObservation obs;
  int action = 0;  // a_R
  // For the final round: the post-round belief with the last claim repeated.
  RobotObservation next_obs;
  bool done = false;
  TransitionInfo info;

  bool operator==(const Transition&) const = default;
};

using Episode = std::vector<Transition>;

enum class Split { kTrain, kTest, kValidation };

std::string_view ToString(Split split);
Split ParseSplit(std::string_view text);

struct Dataset {
  Split split = Split::kTrain;
  std::vector<Episode> episodes;

  std::size_t NumTransitions() const;
  bool operator==(const Dataset&) const = default;
};

struct DatasetSplits {
  Dataset train{Split::kTrain, {}};
  Dataset test{Split::kTest, {}};
  Dataset validation{Split::kValidation, {}};
};

// 3:1:1 by game count in episode order: test and validation each get
// round(n / 5) games, train gets the rest.
DatasetSplits SplitEpisodes(std::vector<Episode> episodes);

nlohmann::json TransitionToJson(const Transition& t);
Transition TransitionFromJson(const nlohmann::json& j);

struct DatasetHeader {
  int schema_version = kDatasetSchemaVersion;
  Split split = Split::kTrain;
  std::uint64_t master_seed = 0;
  nlohmann::json config;
};

// One header record, then one record per transition.
void WriteDataset(const std::filesystem::path& path, const Dataset& ds,
                  const DatasetHeader& header);
Dataset ReadDataset(const std::filesystem::path& path,
                    DatasetHeader* header = nullptr);

// Per-transition rewards in episode order, from (dC_P1, dC_P2) and the
// robot belief T = b0 / (b0 + b1) at decision time.
std::vector<double> RelabelRewards(const Dataset& ds, RewardKind kind,
                                   const RewardParams& rp);

// Column-per-transition feature matrices ready for batching.
struct FeatureDataset {
  Eigen::MatrixXd features;
  Eigen::MatrixXd next_features;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<std::uint8_t> done;

  std::size_t size() const { return actions.size(); }
  Batch Gather(std::span<const std::int64_t> rows) const;
  Batch All() const;
};

FeatureDataset BuildFeatureDataset(const Dataset& ds,
                                   const std::vector<double>& rewards,
                                   int feature_width);

}  // namespace trustsim
