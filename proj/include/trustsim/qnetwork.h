#pragma once

// Feed-forward action-value network: affine layers with ReLU between them
// and a linear output layer, one output per action. All parameters live in
// one flat buffer so the optimizer and checkpoint code can treat them as a
// single span; per-layer weight matrices are column-major views into it.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "trustsim/rng.h"

namespace trustsim {

class QNetwork {
 public:
  // Activations cached by a forward pass for Backward.
  struct Tape {
    // inputs to each layer; activations[0] is the network input
    std::vector<Eigen::MatrixXd> activations;
  };

  QNetwork() = default;
  // widths = {input, hidden..., outputs}; parameters start at zero.
  explicit QNetwork(std::vector<int> widths);

  // Uniform fan-in init: W ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), b = 0.
  static QNetwork Initialized(std::vector<int> widths, Rng& rng);

  const std::vector<int>& widths() const { return widths_; }
  int input_width() const { return widths_.front(); }
  int num_actions() const { return widths_.back(); }
  int num_layers() const { return static_cast<int>(widths_.size()) - 1; }
  std::size_t num_params() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  Eigen::Map<Eigen::MatrixXd> Weights(int layer);
  Eigen::Map<const Eigen::MatrixXd> Weights(int layer) const;
  Eigen::Map<Eigen::VectorXd> Bias(int layer);
  Eigen::Map<const Eigen::VectorXd> Bias(int layer) const;

  // inputs: input_width x batch. Returns num_actions x batch. Throws
  // std::invalid_argument on width mismatch or non-finite input.
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& inputs,
                          Tape* tape = nullptr) const;

  std::vector<double> Forward(std::span<const double> features) const;

  // Accumulates dLoss/dparams into `grad` given dLoss/doutputs.
  void Backward(const Tape& tape, const Eigen::MatrixXd& d_outputs,
                std::span<double> grad) const;

  bool AllFinite() const;

  bool operator==(const QNetwork& o) const {
    return widths_ == o.widths_ && params_ == o.params_;
  }

 private:
  std::size_t WeightOffset(int layer) const { return offsets_[layer]; }
  std::size_t BiasOffset(int layer) const {
    return offsets_[layer] +
           static_cast<std::size_t>(widths_[layer]) * widths_[layer + 1];
  }

  std::vector<int> widths_;
  std::vector<std::size_t> offsets_;
  // Aligned storage keeps Eigen's vectorized reductions, and so the exact
  // floating-point results, independent of where the heap places the buffer.
  std::vector<double, Eigen::aligned_allocator<double>> params_;
};

}  // namespace trustsim
