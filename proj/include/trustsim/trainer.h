#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustsim/cql.h"
#include "trustsim/dataset.h"
#include "trustsim/qnetwork.h"

namespace trustsim {

struct TrainConfig {
  double learning_rate = 6.25e-5;
  int batch_size = 32;
  int epochs = 600;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.0;
  double gamma = 0.95;
  double cql_alpha = 1.0;
  // Gradient steps between target-network syncs.
  int target_sync_interval = 1000;
  std::vector<int> hidden_widths = {64, 64};
  // Epochs between periodic checkpoints; 0 disables them.
  int checkpoint_interval = 100;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double cql_term = 0.0;
  double td_term = 0.0;
  double val_td = 0.0;  // NaN without a validation set

  bool operator==(const EpochMetrics&) const = default;
};

struct TrainOptions {
  // "<prefix>.epoch0100.ckpt" every checkpoint_interval epochs, and
  // "<prefix>.last_good.ckpt" if training diverges. Empty disables both.
  std::filesystem::path checkpoint_prefix;
  std::function<void(const EpochMetrics&)> on_epoch;
};

struct TrainingResult {
  QNetwork network;       // after the final epoch
  QNetwork best_network;  // lowest validation TD error
  int best_epoch = 0;
  std::vector<EpochMetrics> metrics;
  std::int64_t gradient_steps = 0;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& what, int epoch,
                        std::vector<std::int64_t> rows)
      : std::runtime_error(what), epoch_(epoch), rows_(std::move(rows)) {}
  int epoch() const { return epoch_; }
  const std::vector<std::int64_t>& rows() const { return rows_; }

 private:
  int epoch_;
  std::vector<std::int64_t> rows_;
};

// Mean squared TD error of `online` over a whole feature set.
double MeanTdError(const FeatureDataset& data, const QNetwork& online,
                   const QNetwork& target, double gamma);

// Offline CQL training. Each epoch is one seeded shuffled pass over `train`
// in mini-batches (the last one may be short). Deterministic for a fixed
// config, seed and input.
TrainingResult TrainNetwork(const FeatureDataset& train,
                            const FeatureDataset* validation, QNetwork initial,
                            const TrainConfig& cfg,
                            const TrainOptions& options = {});

// Relabels `train`/`validation` under `kind`, builds a
// feature_width -> hidden -> 2 network and trains it.
TrainingResult Train(const Dataset& train, const Dataset* validation,
                     RewardKind kind, const RewardParams& rp,
                     const TrainConfig& cfg, int feature_width,
                     const TrainOptions& options = {});

}  // namespace trustsim
