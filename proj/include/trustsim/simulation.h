#pragma once

// One simulated game: random (or scripted) P2, the trust-driven P1, and a
// robot advisor supplied as a callback.

#include <cstdint>
#include <functional>
#include <vector>

#include "trustsim/config.h"
#include "trustsim/dataset.h"
#include "trustsim/game.h"
#include "trustsim/human_model.h"
#include "trustsim/robot_mind.h"

namespace trustsim {

using AdvicePolicy = std::function<int(const RobotObservation&, Rng&)>;

AdvicePolicy MakeRandomAdvice();
AdvicePolicy MakeGreedyAdvice(const QNetwork& net);

struct RoundRecord {
  int round = 0;
  Claim claim;
  RobotObservation obs;  // belief before the round
  RoundOutcome outcome;
  TrustState trust_before;
  TrustState trust_after;
  double trust_mean = 0.5;  // E(T) at decision time
  double trust_draw = 0.5;
  double p_risk = 0.0;
  BeliefState belief_after;
};

struct GameRecord {
  std::int64_t game_id = 0;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  Hand final_hand_p1;
  Hand final_hand_p2;
};

// Independent sub-streams of one game seed, so that policies consuming
// different numbers of random draws still see the same deals and claims.
struct GameStreams {
  std::uint64_t deal;
  std::uint64_t human;
  std::uint64_t robot;
};
GameStreams SplitGameSeed(std::uint64_t game_seed);

GameRecord SimulateGame(const ExperimentConfig& cfg, std::uint64_t game_seed,
                        std::int64_t game_id, const AdvicePolicy& policy);

Episode ToEpisode(const GameRecord& game);

}  // namespace trustsim
