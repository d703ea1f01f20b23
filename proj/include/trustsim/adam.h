#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace trustsim {

struct AdamConfig {
  double learning_rate = 6.25e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // L2 term added to the gradient before the moment updates.
  double weight_decay = 0.0;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step = 0;

  bool operator==(const AdamState&) const = default;
};

// One bias-corrected Adam update. An empty state is sized on first use;
// mismatched weights/grads/state sizes throw std::invalid_argument.
void AdamStep(std::span<double> weights, std::span<const double> grads,
              AdamState& state, const AdamConfig& cfg);

}  // namespace trustsim
