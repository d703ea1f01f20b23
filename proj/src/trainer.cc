#include "trustsim/trainer.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "trustsim/adam.h"
#include "trustsim/checkpoint.h"

namespace trustsim {

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in [0,1]");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (target_sync_interval < 1) throw std::invalid_argument("target_sync_interval must be >= 1");
  if (cql_alpha < 0.0) throw std::invalid_argument("cql_alpha must be >= 0");
}

double MeanTdError(const FeatureDataset& data, const QNetwork& online,
                   const QNetwork& target, double gamma) {
  if (data.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  const Batch all = data.All();
  const Eigen::MatrixXd q = online.Forward(all.features);
  const std::vector<double> y = DoubleDqnTargets(online, target, all, gamma);
  double sum = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double err = q(all.actions[i], static_cast<Eigen::Index>(i)) - y[i];
    sum += err * err;
  }
  return sum / static_cast<double>(all.size());
}

TrainingResult TrainNetwork(const FeatureDataset& train,
                            const FeatureDataset* validation, QNetwork initial,
                            const TrainConfig& cfg, const TrainOptions& options) {
  cfg.Validate();
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  if (initial.input_width() != train.features.rows()) {
    throw std::invalid_argument("network input width does not match features");
  }

  const AdamConfig adam{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                        cfg.adam_epsilon, cfg.weight_decay};
  const CqlParams cql{cfg.gamma, cfg.cql_alpha};
  Rng rng(DeriveSeed(cfg.seed, kTrainStream, 1));

  TrainingResult result;
  result.network = std::move(initial);
  QNetwork target = result.network;
  result.best_network = result.network;
  AdamState state;
  double best_val = std::numeric_limits<double>::infinity();

  std::vector<std::int64_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.Shuffle(order.begin(), order.end());
    double loss_sum = 0.0, cql_sum = 0.0, td_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const Batch b = train.Gather(std::span<const std::int64_t>(order).subspan(start, len));
      CqlLossResult step;
      std::string diverged;
      try {
        step = CqlLoss(b, result.network, target, cql);
        for (double g : step.grad) {
          if (!std::isfinite(g)) {
            diverged = "non-finite gradient";
            break;
          }
        }
      } catch (const NonFiniteLossError& e) {
        diverged = e.what();
      }
      if (!diverged.empty()) {
        if (!options.checkpoint_prefix.empty()) {
          SaveModel(result.network,
                    options.checkpoint_prefix.string() + ".last_good.ckpt");
        }
        throw TrainingDivergedError(diverged, epoch, b.rows);
      }
      AdamStep(result.network.params(), step.grad, state, adam);
      ++result.gradient_steps;
      if (result.gradient_steps % cfg.target_sync_interval == 0) target = result.network;
      loss_sum += step.loss;
      cql_sum += step.conservative;
      td_sum += step.td;
      ++batches;
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.loss = loss_sum / static_cast<double>(batches);
    m.cql_term = cql_sum / static_cast<double>(batches);
    m.td_term = td_sum / static_cast<double>(batches);
    m.val_td = validation != nullptr
                   ? MeanTdError(*validation, result.network, target, cfg.gamma)
                   : std::numeric_limits<double>::quiet_NaN();
    if (validation != nullptr && m.val_td < best_val) {
      best_val = m.val_td;
      result.best_network = result.network;
      result.best_epoch = epoch;
    }
    result.metrics.push_back(m);
    if (options.on_epoch) options.on_epoch(m);

    if (!options.checkpoint_prefix.empty() && cfg.checkpoint_interval > 0 &&
        epoch % cfg.checkpoint_interval == 0) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), ".epoch%04d.ckpt", epoch);
      SaveModel(result.network, options.checkpoint_prefix.string() + suffix);
    }
  }
  if (validation == nullptr) {
    result.best_network = result.network;
    result.best_epoch = cfg.epochs;
  }
  return result;
}

TrainingResult Train(const Dataset& train, const Dataset* validation,
                     RewardKind kind, const RewardParams& rp,
                     const TrainConfig& cfg, int feature_width,
                     const TrainOptions& options) {
  const FeatureDataset train_fd =
      BuildFeatureDataset(train, RelabelRewards(train, kind, rp), feature_width);
  std::optional<FeatureDataset> val_fd;
  if (validation != nullptr && validation->NumTransitions() > 0) {
    val_fd = BuildFeatureDataset(*validation, RelabelRewards(*validation, kind, rp),
                                 feature_width);
  }
  std::vector<int> widths = {feature_width};
  widths.insert(widths.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
  widths.push_back(2);
  Rng init_rng(DeriveSeed(cfg.seed, kTrainStream, 0));
  return TrainNetwork(train_fd, val_fd ? &*val_fd : nullptr,
                      QNetwork::Initialized(widths, init_rng), cfg, options);
}

}  // namespace trustsim
