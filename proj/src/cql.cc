#include "trustsim/cql.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trustsim/dataset.h"
#include "trustsim/features.h"

namespace trustsim {

double LogSumExp(std::span<const double> q) {
  const double top = *std::max_element(q.begin(), q.end());
  double sum = 0.0;
  for (double v : q) sum += std::exp(v - top);
  return top + std::log(sum);
}

double DoubleDqnTarget(const QNetwork& online, const QNetwork& target,
                       std::span<const double> next_features, double reward,
                       bool done, double gamma) {
  if (done) return reward;
  const std::vector<double> q_online = online.Forward(next_features);
  const std::vector<double> q_target = target.Forward(next_features);
  const auto best = std::max_element(q_online.begin(), q_online.end()) -
                    q_online.begin();
  return reward + gamma * q_target[best];
}

double DoubleDqnTarget(const QNetwork& online, const QNetwork& target,
                       const Transition& t, double reward, double gamma) {
  return DoubleDqnTarget(online, target,
                         Featurize(t.next_obs, online.input_width()), reward,
                         t.done, gamma);
}

std::vector<double> DoubleDqnTargets(const QNetwork& online,
                                     const QNetwork& target, const Batch& batch,
                                     double gamma) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const Eigen::MatrixXd q_online = online.Forward(batch.next_features);
  const Eigen::MatrixXd q_target = target.Forward(batch.next_features);
  std::vector<double> y(batch.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = batch.rewards[i];
    if (batch.done[i]) continue;
    Eigen::Index best = 0;
    q_online.col(i).maxCoeff(&best);
    y[i] += gamma * q_target(best, i);
  }
  return y;
}

CqlLossResult CqlLoss(const Batch& batch, const QNetwork& online,
                      const QNetwork& target, const CqlParams& params,
                      bool with_grad) {
  const std::size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("cql_loss on an empty batch");

  QNetwork::Tape tape;
  const Eigen::MatrixXd q = online.Forward(batch.features, with_grad ? &tape : nullptr);
  const std::vector<double> y = DoubleDqnTargets(online, target, batch, params.gamma);

  CqlLossResult out;
  out.conservative_per_sample.resize(n);
  Eigen::MatrixXd d_q = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto col = q.col(static_cast<Eigen::Index>(i));
    const int a = batch.actions[i];
    const double lse = LogSumExp(std::span<const double>(col.data(), col.size()));
    const double gap = lse - col(a);
    if (gap < 0.0) throw std::logic_error("negative conservative term");
    out.conservative_per_sample[i] = gap;
    out.conservative += gap;
    const double err = col(a) - y[i];
    out.td += err * err;

    if (with_grad) {
      for (Eigen::Index k = 0; k < col.size(); ++k) {
        d_q(k, i) = params.cql_alpha * inv_n * std::exp(col(k) - lse);
      }
      d_q(a, i) += -params.cql_alpha * inv_n + 2.0 * inv_n * err;
    }
  }
  out.conservative *= inv_n;
  out.td *= inv_n;
  out.loss = params.cql_alpha * out.conservative + out.td;

  if (!std::isfinite(out.loss)) {
    std::ostringstream msg;
    msg << "non-finite CQL loss on batch rows [";
    for (std::size_t i = 0; i < batch.rows.size(); ++i) {
      msg << (i ? "," : "") << batch.rows[i];
    }
    msg << "]";
    throw NonFiniteLossError(msg.str(), batch.rows);
  }

  if (with_grad) {
    out.grad.assign(online.num_params(), 0.0);
    online.Backward(tape, d_q, out.grad);
  }
  return out;
}

}  // namespace trustsim
