#include "trustsim/adam.h"

#include <cmath>
#include <stdexcept>

namespace trustsim {

void AdamStep(std::span<double> weights, std::span<const double> grads,
              AdamState& state, const AdamConfig& cfg) {
  if (weights.size() != grads.size()) {
    throw std::invalid_argument("adam: weight and gradient sizes differ");
  }
  if (state.first_moment.empty() && state.second_moment.empty() && state.step == 0) {
    state.first_moment.assign(weights.size(), 0.0);
    state.second_moment.assign(weights.size(), 0.0);
  }
  if (state.first_moment.size() != weights.size() ||
      state.second_moment.size() != weights.size()) {
    throw std::invalid_argument("adam: optimizer state size differs from weights");
  }

  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const double step_size = cfg.learning_rate / bc1;
  const double sqrt_bc2 = std::sqrt(bc2);

  double* m = state.first_moment.data();
  double* v = state.second_moment.data();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = grads[i] + cfg.weight_decay * weights[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    weights[i] -= step_size * m[i] / (std::sqrt(v[i]) / sqrt_bc2 + cfg.epsilon);
  }
}

}  // namespace trustsim
