#include "trustsim/robot_mind.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "trustsim/features.h"

namespace trustsim {

void RewardParams::Validate() const {
  if (!(reward_alpha > 0.0) || !(reward_beta > 0.0) || !(theta > 0.0) ||
      !(mu > 0.0)) {
    throw std::invalid_argument("reward weights must be positive");
  }
}

std::string_view ToString(RewardKind kind) {
  switch (kind) {
    case RewardKind::kTeamPerformance: return "tp";
    case RewardKind::kGlobalTrust: return "gt";
    case RewardKind::kTopTom: return "tom";
  }
  return "tp";
}

RewardKind ParseRewardKind(std::string_view text) {
  if (text == "tp") return RewardKind::kTeamPerformance;
  if (text == "gt") return RewardKind::kGlobalTrust;
  if (text == "tom") return RewardKind::kTopTom;
  throw std::invalid_argument("unknown reward kind: " + std::string(text));
}

double BeliefTrust(const BeliefState& bs) {
  const double total = bs.b0 + bs.b1;
  if (!(total > 0.0)) throw std::invalid_argument("belief counts sum to zero");
  return bs.b0 / total;
}

BeliefState UpdateBelief(const BeliefState& bs, const RoundOutcome& outcome) {
  if (!outcome.revealed) return bs;
  BeliefState next = bs;
  if (outcome.a_r == outcome.a_p2) {
    next.b0 += 1.0;
  } else {
    next.b1 += 1.0;
  }
  return next;
}

int DeltaGate(double trust) {
  const double gate = std::ceil(0.5 - trust);
  return std::clamp(static_cast<int>(gate), 0, 1);
}

double RewardTp(int dc_p1, int dc_p2, const RewardParams& rp) {
  return -rp.reward_alpha * dc_p1 + rp.reward_beta * dc_p2;
}

double RewardGt(int dc_p1, int dc_p2, double trust, const RewardParams& rp) {
  return RewardTp(dc_p1, dc_p2, rp) + rp.theta * trust;
}

double RewardTom(int dc_p1, int dc_p2, double trust, const RewardParams& rp) {
  return RewardTp(dc_p1, dc_p2, rp) + rp.mu * DeltaGate(trust) * trust;
}

double Reward(RewardKind kind, int dc_p1, int dc_p2, double trust,
              const RewardParams& rp) {
  switch (kind) {
    case RewardKind::kTeamPerformance: return RewardTp(dc_p1, dc_p2, rp);
    case RewardKind::kGlobalTrust: return RewardGt(dc_p1, dc_p2, trust, rp);
    case RewardKind::kTopTom: return RewardTom(dc_p1, dc_p2, trust, rp);
  }
  return 0.0;
}

int RandomPolicy(Rng& rng) { return rng.Bernoulli(0.5) ? 1 : 0; }

int GreedyPolicy(const QNetwork& qnet, const RobotObservation& obs) {
  const std::vector<double> q = qnet.Forward(Featurize(obs, qnet.input_width()));
  return q[1] > q[0] ? 1 : 0;
}

}  // namespace trustsim
