#pragma once

#include <array>
#include <span>
#include <vector>

#include "trustsim/robot_mind.h"

namespace trustsim {

// Feature layout, in order:
//   m / 4, n / 4, b0 / (b0 + b1), min(1, (b0 + b1 - 2) / 50) [, a_P2]
// The fifth entry is present when the network is 5 wide.
inline constexpr int kBaseFeatureWidth = 4;
inline constexpr int kFullFeatureWidth = 5;

int FeatureWidth(bool observe_p2_action);

// Throws std::invalid_argument for b0 + b1 = 0 or an unsupported width.
void Featurize(const RobotObservation& obs, std::span<double> out);
std::vector<double> Featurize(const RobotObservation& obs, int width);

}  // namespace trustsim
