#pragma once

// Discrete conservative Q-learning loss on top of a DoubleDQN target:
//
//   L = cql_alpha * mean_i [ logsumexp_a Q(s_i, a) - Q(s_i, a_i) ]
//       + mean_i ( Q(s_i, a_i) - y_i )^2
//   y_i = r_i                                        if done_i
//       = r_i + gamma * Q_target(s'_i, argmax_a Q(s'_i, a))   otherwise
//
// The target network is held constant; the online network's argmax on s'
// is piecewise constant and carries no gradient.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trustsim/qnetwork.h"

namespace trustsim {

struct Transition;

// Columns are samples.
struct Batch {
  Eigen::MatrixXd features;
  Eigen::MatrixXd next_features;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<std::uint8_t> done;
  // Dataset row of each column, for diagnostics.
  std::vector<std::int64_t> rows;

  std::size_t size() const { return actions.size(); }
};

struct CqlParams {
  double gamma = 0.95;
  double cql_alpha = 1.0;
};

struct CqlLossResult {
  double loss = 0.0;
  double conservative = 0.0;  // mean logsumexp - Q(s, a_data), unscaled
  double td = 0.0;            // mean squared TD error
  std::vector<double> conservative_per_sample;
  std::vector<double> grad;  // dL/dparams of the online network
};

class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(const std::string& what, std::vector<std::int64_t> rows)
      : std::runtime_error(what), rows_(std::move(rows)) {}
  const std::vector<std::int64_t>& rows() const { return rows_; }

 private:
  std::vector<std::int64_t> rows_;
};

// Max-shifted log(sum(exp(q))).
double LogSumExp(std::span<const double> q);

double DoubleDqnTarget(const QNetwork& online, const QNetwork& target,
                       std::span<const double> next_features, double reward,
                       bool done, double gamma);
double DoubleDqnTarget(const QNetwork& online, const QNetwork& target,
                       const Transition& t, double reward, double gamma);

// Batched targets for every column of `batch`.
std::vector<double> DoubleDqnTargets(const QNetwork& online,
                                     const QNetwork& target, const Batch& batch,
                                     double gamma);

// Throws NonFiniteLossError; also throws std::logic_error if a conservative
// term ever comes out negative.
CqlLossResult CqlLoss(const Batch& batch, const QNetwork& online,
                      const QNetwork& target, const CqlParams& params,
                      bool with_grad = true);

}  // namespace trustsim
