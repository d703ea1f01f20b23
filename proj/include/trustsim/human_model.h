#pragma once

// Simulated teammate P1: Beta-distributed trust in the robot that grows with
// revealed robot successes and failures, and a softmax call/pass policy
// conditioned on that trust, the robot's advice and a tanh risk curve.

#include "trustsim/rng.h"

namespace trustsim {

// Beta shape parameters; both strictly positive.
struct TrustState {
  double alpha = 1.0;
  double beta = 1.0;

  void Validate() const;
  bool operator==(const TrustState&) const = default;
};

// Experience gains. Rows of the gain table, indexed (a_P2, a_R, a_P1):
//   (0,0,1) -> (success_honest, 0)    (1,1,1) -> (success_cheat, 0)
//   (0,1,1) -> (0, failure_honest)    (1,0,1) -> (0, failure_cheat)
// and (0, 0) whenever a_P1 = 0.
struct TrustGains {
  double success_honest = 1.2;
  double success_cheat = 0.8;
  double failure_honest = 1.2;
  double failure_cheat = 0.8;

  void Validate() const;
  bool operator==(const TrustGains&) const = default;
};

// P_risk(m + n) = w * tanh(a * (m + n) + b) + offset, clamped to [0, 1].
struct RiskParams {
  double w = -0.45;
  double a = 1.0;
  double b = -3.0;
  double offset = 0.45;

  bool operator==(const RiskParams&) const = default;
};

struct ActionProbs {
  double p_call = 0.5;
  double p_pass = 0.5;
};

// E(T) = alpha / (alpha + beta).
double TrustMean(const TrustState& ts);

// T ~ Beta(alpha, beta) from two Gamma draws.
double SampleTrust(const TrustState& ts, Rng& rng);

TrustState UpdateTrust(const TrustState& ts, int a_p2, int a_r, int a_p1,
                       const TrustGains& gains);

double RiskCoefficient(int m, int n, const RiskParams& rp);

// a_r = 1: softmax(T (1 - p_risk), (1 - T) p_risk)
// a_r = 0: softmax((1 - T)(1 - p_risk), T p_risk)
ActionProbs P1ActionProbs(double trust, double p_risk, int a_r);

// 1 = call "cheating", 0 = pass.
int SampleP1Action(const ActionProbs& probs, Rng& rng);

}  // namespace trustsim
