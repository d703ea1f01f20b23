#include "trustsim/human_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trustsim {

void TrustState::Validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("trust shape parameters must be positive");
  }
}

void TrustGains::Validate() const {
  if (!(success_honest > 0.0) || !(success_cheat > 0.0) ||
      !(failure_honest > 0.0) || !(failure_cheat > 0.0)) {
    throw std::invalid_argument("trust gains must be positive");
  }
}

double TrustMean(const TrustState& ts) { return ts.alpha / (ts.alpha + ts.beta); }

double SampleTrust(const TrustState& ts, Rng& rng) {
  return rng.Beta(ts.alpha, ts.beta);
}

TrustState UpdateTrust(const TrustState& ts, int a_p2, int a_r, int a_p1,
                       const TrustGains& gains) {
  if (a_p1 == 0) return ts;
  TrustState next = ts;
  if (a_p2 == a_r) {
    next.alpha += a_p2 == 0 ? gains.success_honest : gains.success_cheat;
  } else {
    next.beta += a_p2 == 0 ? gains.failure_honest : gains.failure_cheat;
  }
  return next;
}

double RiskCoefficient(int m, int n, const RiskParams& rp) {
  const double s = static_cast<double>(m + n);
  const double p = rp.w * std::tanh(rp.a * s + rp.b) + rp.offset;
  return std::clamp(p, 0.0, 1.0);
}

ActionProbs P1ActionProbs(double trust, double p_risk, int a_r) {
  double call_logit, pass_logit;
  if (a_r == 1) {
    call_logit = trust * (1.0 - p_risk);
    pass_logit = (1.0 - trust) * p_risk;
  } else {
    call_logit = (1.0 - trust) * (1.0 - p_risk);
    pass_logit = trust * p_risk;
  }
  const double top = std::max(call_logit, pass_logit);
  const double ec = std::exp(call_logit - top);
  const double ep = std::exp(pass_logit - top);
  ActionProbs probs;
  probs.p_call = ec / (ec + ep);
  probs.p_pass = 1.0 - probs.p_call;
  return probs;
}

int SampleP1Action(const ActionProbs& probs, Rng& rng) {
  return rng.Bernoulli(probs.p_call) ? 1 : 0;
}

}  // namespace trustsim
