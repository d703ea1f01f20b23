#pragma once

// The robot's second-order bookkeeping: success/failure tallies of its own
// advice as P1 can see it, the reward schemes built on them, and the
// advice policies.

#include <string_view>

#include "trustsim/game.h"
#include "trustsim/qnetwork.h"
#include "trustsim/rng.h"

namespace trustsim {

// b0 counts validated successes, b1 validated failures.
struct BeliefState {
  double b0 = 1.0;
  double b1 = 1.0;

  bool operator==(const BeliefState&) const = default;
};

// What the robot sees when advising: the claim size m, P1's count n of the
// claimed rank, its belief tallies, and P2's actual move.
struct RobotObservation {
  int m = 1;
  int n = 0;
  double b0 = 1.0;
  double b1 = 1.0;
  int p2_action = 0;

  bool operator==(const RobotObservation&) const = default;
};

struct RewardParams {
  double reward_alpha = 0.1;
  double reward_beta = 0.1;
  double theta = 1.0;
  double mu = 1.0;

  void Validate() const;
  bool operator==(const RewardParams&) const = default;
};

enum class RewardKind { kTeamPerformance, kGlobalTrust, kTopTom };

// "tp", "gt", "tom".
std::string_view ToString(RewardKind kind);
RewardKind ParseRewardKind(std::string_view text);

// T = b0 / (b0 + b1). Throws std::invalid_argument when b0 = b1 = 0.
double BeliefTrust(const BeliefState& bs);

// Only revealed rounds are informative: advice matching a_P2 counts as a
// success, anything else as a failure.
BeliefState UpdateBelief(const BeliefState& bs, const RoundOutcome& outcome);

// ceil(0.5 - T): 1 below one half, 0 from one half upward.
int DeltaGate(double trust);

double RewardTp(int dc_p1, int dc_p2, const RewardParams& rp);
double RewardGt(int dc_p1, int dc_p2, double trust, const RewardParams& rp);
double RewardTom(int dc_p1, int dc_p2, double trust, const RewardParams& rp);
double Reward(RewardKind kind, int dc_p1, int dc_p2, double trust,
              const RewardParams& rp);

int RandomPolicy(Rng& rng);

// argmax over the network's action-values; ties go to action 0.
int GreedyPolicy(const QNetwork& qnet, const RobotObservation& obs);

}  // namespace trustsim
