#include "trustsim/qnetwork.h"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace trustsim {

QNetwork::QNetwork(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("network needs >= 2 widths");
  for (int w : widths_) {
    if (w < 1) throw std::invalid_argument("layer widths must be positive");
  }
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(widths_.size()); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(widths_[l]) * widths_[l + 1] + widths_[l + 1];
  }
  params_.assign(total, 0.0);
}

QNetwork QNetwork::Initialized(std::vector<int> widths, Rng& rng) {
  QNetwork net(std::move(widths));
  for (int l = 0; l < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.widths_[l]));
    auto w = net.Weights(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w.data()[i] = (2.0 * rng.Uniform() - 1.0) * bound;
    }
  }
  return net;
}

Eigen::Map<Eigen::MatrixXd> QNetwork::Weights(int layer) {
  return {params_.data() + WeightOffset(layer), widths_[layer + 1], widths_[layer]};
}

Eigen::Map<const Eigen::MatrixXd> QNetwork::Weights(int layer) const {
  return {params_.data() + WeightOffset(layer), widths_[layer + 1], widths_[layer]};
}

Eigen::Map<Eigen::VectorXd> QNetwork::Bias(int layer) {
  return {params_.data() + BiasOffset(layer), widths_[layer + 1]};
}

Eigen::Map<const Eigen::VectorXd> QNetwork::Bias(int layer) const {
  return {params_.data() + BiasOffset(layer), widths_[layer + 1]};
}

Eigen::MatrixXd QNetwork::Forward(const Eigen::MatrixXd& inputs, Tape* tape) const {
  if (inputs.rows() != input_width()) {
    throw std::invalid_argument("input width mismatch");
  }
  if (!inputs.allFinite()) throw std::invalid_argument("non-finite network input");

  if (tape != nullptr) {
    tape->activations.clear();
    tape->activations.push_back(inputs);
  }
  Eigen::MatrixXd x = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = Weights(l) * x;
    z.colwise() += Bias(l);
    if (l + 1 < num_layers()) {
      z = z.cwiseMax(0.0);
      if (tape != nullptr) tape->activations.push_back(z);
    }
    x = std::move(z);
  }
  return x;
}

std::vector<double> QNetwork::Forward(std::span<const double> features) const {
  Eigen::MatrixXd in(static_cast<Eigen::Index>(features.size()), 1);
  for (std::size_t i = 0; i < features.size(); ++i) in(i, 0) = features[i];
  const Eigen::MatrixXd out = Forward(in);
  return {out.data(), out.data() + out.size()};
}

void QNetwork::Backward(const Tape& tape, const Eigen::MatrixXd& d_outputs,
                        std::span<double> grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient size mismatch");
  Eigen::MatrixXd delta = d_outputs;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& in = tape.activations[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + WeightOffset(l), widths_[l + 1],
                                   widths_[l]);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + BiasOffset(l), widths_[l + 1]);
    // Products go through owned temporaries for the same alignment reason
    // as params_; the caller's buffer only sees elementwise adds.
    const Eigen::MatrixXd dw = delta * in.transpose();
    const Eigen::VectorXd db = delta.rowwise().sum();
    gw += dw;
    gb += db;
    if (l > 0) {
      Eigen::MatrixXd back = Weights(l).transpose() * delta;
      // ReLU derivative; `in` is the post-activation of layer l - 1.
      delta = back.cwiseProduct((in.array() > 0.0).cast<double>().matrix());
    }
  }
}

bool QNetwork::AllFinite() const {
  for (double p : params_) {
    if (!std::isfinite(p)) return false;
  }
  return true;
}

}  // namespace trustsim
