#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "claimcheck/rng.hpp"

namespace claimcheck {

/// Training hyperparameters. Defaults follow the toolkit's reference
/// configuration: momentum SGD with lr 0.01, decay 1e-6, momentum 0.9,
/// L2 0.1, dropout 0.5, 50 epochs.
struct TrainConfig {
  double learning_rate = 0.01;
  double decay = 1e-6;
  double momentum = 0.9;
  double l2 = 0.1;
  double dropout = 0.5;       // applied to the plain verifier only
  int epochs = 50;
  double tau = 0.5;           // Gumbel-Softmax temperature
  double lambda_utility = 1.0;  // weight of the utility loss term
  std::uint64_t seed = 13;
  int K = 5;
  int M = 5;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Fully-connected layer with gradient and momentum buffers. forward() is the
/// pre-activation Wx + b; activations are applied by the caller.
struct DenseLayer {
  Eigen::MatrixXd W, grad_W, vel_W;
  Eigen::VectorXd b, grad_b, vel_b;

  DenseLayer() = default;
  DenseLayer(int out_dim, int in_dim);

  int in_dim() const { return static_cast<int>(W.cols()); }
  int out_dim() const { return static_cast<int>(W.rows()); }

  void glorot_init(Rng& rng);
  void zero_grad();

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  /// Accumulates grad_W += dy x^T and grad_b += dy; returns W^T dy.
  Eigen::VectorXd backward(const Eigen::VectorXd& x, const Eigen::VectorXd& dy);
};

Eigen::VectorXd relu(const Eigen::VectorXd& x);

/// dy gated by the sign of the pre-activation.
Eigen::VectorXd relu_backward(const Eigen::VectorXd& pre, const Eigen::VectorXd& dy);

/// Numerically stable softmax (max-subtracted).
Eigen::VectorXd softmax(const Eigen::VectorXd& x);

/// Jacobian-vector product through softmax: y .* (dy - (dy . y)).
Eigen::VectorXd softmax_backward(const Eigen::VectorXd& y, const Eigen::VectorXd& dy);

/// Inverted-dropout mask: entries are 0 with probability rate, else
/// 1/(1-rate), so the expected mask value is 1. Callers apply it only in
/// training mode; evaluation passes activations through untouched.
Eigen::VectorXd dropout_mask(int n, double rate, Rng& rng);

struct GumbelSample {
  Eigen::VectorXd probs;  // softmax((logits + noise)/tau)
  Eigen::VectorXd noise;  // the recorded Gumbel draws
};

/// Gumbel-Softmax sample; the recorded noise lets the backward pass treat the
/// draw as a deterministic function of the logits (reparameterization).
GumbelSample gumbel_softmax(const Eigen::VectorXd& logits, double tau, Rng& rng);

/// Same forward with caller-supplied (frozen) noise.
Eigen::VectorXd gumbel_softmax_with_noise(const Eigen::VectorXd& logits,
                                          double tau,
                                          const Eigen::VectorXd& noise);

/// -log(pred[target]) with an epsilon floor of 1e-12.
double cross_entropy(const Eigen::VectorXd& pred, int target);

/// One momentum-SGD update over all layers, with per-step learning-rate decay
/// lr/(1 + decay*step_count) and L2 applied to weight matrices (not biases).
/// Gradients are zeroed afterwards.
void sgd_step(const std::vector<DenseLayer*>& layers, const TrainConfig& config,
              long step_count);

/// Central-difference gradient check. loss_with_grads must zero nothing
/// itself: it computes the loss and accumulates analytic gradients into the
/// layers; grad_check manages zeroing around its probes. Returns the max
/// relative error over all parameter coordinates. The closure must be
/// deterministic (frozen noise, evaluation-mode dropout).
double grad_check(const std::function<double()>& loss_with_grads,
                  const std::vector<DenseLayer*>& params, double epsilon);

nlohmann::ordered_json layer_to_json(const DenseLayer& layer);
DenseLayer layer_from_json(const nlohmann::json& j);

}  // namespace claimcheck
