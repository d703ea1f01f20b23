#include "trustsim/robot_mind.h"

#include <gtest/gtest.h>

namespace trustsim {
namespace {

RoundOutcome Revealed(int a_r, int a_p2) {
  RoundOutcome o;
  o.a_r = a_r;
  o.a_p2 = a_p2;
  o.a_p1 = 1;
  o.revealed = true;
  return o;
}

TEST(BeliefTrust, Examples) {
  EXPECT_DOUBLE_EQ(BeliefTrust({1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(BeliefTrust({3, 1}), 0.75);
  EXPECT_DOUBLE_EQ(BeliefTrust({0, 5}), 0.0);
  EXPECT_THROW(BeliefTrust({0, 0}), std::invalid_argument);
}

TEST(UpdateBelief, Examples) {
  EXPECT_EQ(UpdateBelief({1, 1}, Revealed(1, 1)), (BeliefState{2, 1}));
  EXPECT_EQ(UpdateBelief({1, 1}, Revealed(0, 1)), (BeliefState{1, 2}));
  RoundOutcome hidden = Revealed(1, 1);
  hidden.revealed = false;
  hidden.a_p1 = 0;
  EXPECT_EQ(UpdateBelief({1, 1}, hidden), (BeliefState{1, 1}));
}

TEST(UpdateBelief, ChangesExactlyOneTallyOnReveal) {
  for (int a_r : {0, 1}) {
    for (int a_p2 : {0, 1}) {
      const BeliefState b = UpdateBelief({3, 4}, Revealed(a_r, a_p2));
      EXPECT_DOUBLE_EQ((b.b0 - 3) + (b.b1 - 4), 1.0);
      EXPECT_EQ(b.b0 - 3 == 1.0, a_r == a_p2);
      EXPECT_GE(BeliefTrust(b), 0.0);
      EXPECT_LE(BeliefTrust(b), 1.0);
    }
  }
}

TEST(DeltaGate, Boundary) {
  EXPECT_EQ(DeltaGate(0.7), 0);
  EXPECT_EQ(DeltaGate(0.3), 1);
  EXPECT_EQ(DeltaGate(0.5), 0);
  EXPECT_EQ(DeltaGate(0.0), 1);
  EXPECT_EQ(DeltaGate(1.0), 0);
  EXPECT_EQ(DeltaGate(std::nextafter(0.5, 0.0)), 1);
}

TEST(Rewards, Examples) {
  const RewardParams rp;
  EXPECT_NEAR(RewardTp(0, -3, rp), -0.3, 1e-12);
  EXPECT_EQ(RewardTp(0, 0, rp), 0.0);
  EXPECT_NEAR(RewardTp(2, -2, rp), -0.4, 1e-12);
  EXPECT_NEAR(RewardGt(2, -2, 0.5, rp), 0.1, 1e-12);
  EXPECT_EQ(RewardGt(0, 0, 0.0, rp), 0.0);
  EXPECT_NEAR(RewardGt(0, -3, 1.0, rp), 0.7, 1e-12);
  EXPECT_NEAR(RewardTom(0, 0, 0.3, rp), 0.3, 1e-12);
  EXPECT_EQ(RewardTom(2, -2, 0.7, rp), RewardTp(2, -2, rp));
  EXPECT_NEAR(RewardTom(0, -3, 0.49, rp), 0.19, 1e-12);
}

TEST(Rewards, AlgebraicIdentities) {
  Rng rng(17);
  const RewardParams rp{0.13, 0.07, 1.7, 0.6};
  for (int i = 0; i < 10000; ++i) {
    const int m = static_cast<int>(rng.UniformInt(1, 4));
    const int dc1 = rng.Bernoulli(0.3) ? m : 0;
    const int dc2 = rng.Bernoulli(0.7) ? -m : 0;
    const double t = rng.Uniform();
    const double tp = RewardTp(dc1, dc2, rp);
    EXPECT_NEAR(RewardGt(dc1, dc2, t, rp) - tp, rp.theta * t, 1e-12);
    if (t >= 0.5) {
      EXPECT_EQ(RewardTom(dc1, dc2, t, rp), tp);
    } else {
      EXPECT_NEAR(RewardTom(dc1, dc2, t, rp), tp + rp.mu * t, 1e-12);
    }
    // Superposition in the card deltas.
    EXPECT_NEAR(RewardTp(dc1, dc2, rp), RewardTp(dc1, 0, rp) + RewardTp(0, dc2, rp), 1e-12);
  }
}

TEST(RewardKind, Names) {
  for (RewardKind k : {RewardKind::kTeamPerformance, RewardKind::kGlobalTrust, RewardKind::kTopTom}) {
    EXPECT_EQ(ParseRewardKind(ToString(k)), k);
  }
  EXPECT_THROW(ParseRewardKind("nope"), std::invalid_argument);
  EXPECT_THROW((RewardParams{0.1, -0.1, 1, 1}).Validate(), std::invalid_argument);
}

TEST(RandomPolicy, FairCoin) {
  Rng rng(21);
  int ones = 0;
  for (int i = 0; i < 100000; ++i) ones += RandomPolicy(rng);
  EXPECT_NEAR(ones / 1e5, 0.5, 0.01);
  Rng a(4), b(4);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(RandomPolicy(a), RandomPolicy(b));
}

TEST(GreedyPolicy, ArgmaxWithTieToZero) {
  QNetwork net({5, 2});
  net.Bias(0)(0) = 0.2;
  net.Bias(0)(1) = 0.9;
  EXPECT_EQ(GreedyPolicy(net, RobotObservation{}), 1);
  net.Bias(0)(0) = 0.4;
  net.Bias(0)(1) = 0.4;
  EXPECT_EQ(GreedyPolicy(net, RobotObservation{}), 0);
}

}  // namespace
}  // namespace trustsim
