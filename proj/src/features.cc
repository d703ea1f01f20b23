#include "trustsim/features.h"

#include <algorithm>
#include <stdexcept>

namespace trustsim {

int FeatureWidth(bool observe_p2_action) {
  return observe_p2_action ? kFullFeatureWidth : kBaseFeatureWidth;
}

void Featurize(const RobotObservation& obs, std::span<double> out) {
  if (out.size() != kBaseFeatureWidth && out.size() != kFullFeatureWidth) {
    throw std::invalid_argument("unsupported feature width");
  }
  const double total = obs.b0 + obs.b1;
  if (!(total > 0.0)) throw std::invalid_argument("belief counts sum to zero");
  out[0] = obs.m / 4.0;
  out[1] = obs.n / 4.0;
  out[2] = obs.b0 / total;
  out[3] = std::min(1.0, (total - 2.0) / 50.0);
  if (out.size() == kFullFeatureWidth) out[4] = obs.p2_action;
}

std::vector<double> Featurize(const RobotObservation& obs, int width) {
  std::vector<double> out(static_cast<std::size_t>(std::max(width, 0)));
  Featurize(obs, out);
  return out;
}

}  // namespace trustsim
