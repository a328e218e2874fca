#include "claimcheck/neural.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "claimcheck/errors.hpp"

namespace claimcheck {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be >= 0");
  if (!(decay >= 0.0)) throw std::invalid_argument("decay must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0,1)");
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0,1)");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(lambda_utility >= 0.0)) throw std::invalid_argument("lambda_utility must be >= 0");
  if (K < 0 || M < 0) throw std::invalid_argument("K and M must be >= 0");
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["learning_rate"] = learning_rate;
  j["decay"] = decay;
  j["momentum"] = momentum;
  j["l2"] = l2;
  j["dropout"] = dropout;
  j["epochs"] = epochs;
  j["tau"] = tau;
  j["lambda_utility"] = lambda_utility;
  j["seed"] = seed;
  j["K"] = K;
  j["M"] = M;
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.decay = j.value("decay", c.decay);
  c.momentum = j.value("momentum", c.momentum);
  c.l2 = j.value("l2", c.l2);
  c.dropout = j.value("dropout", c.dropout);
  c.epochs = j.value("epochs", c.epochs);
  c.tau = j.value("tau", c.tau);
  c.lambda_utility = j.value("lambda_utility", c.lambda_utility);
  c.seed = j.value("seed", c.seed);
  c.K = j.value("K", c.K);
  c.M = j.value("M", c.M);
  c.validate();
  return c;
}

DenseLayer::DenseLayer(int out_dim, int in_dim)
    : W(Eigen::MatrixXd::Zero(out_dim, in_dim)),
      grad_W(Eigen::MatrixXd::Zero(out_dim, in_dim)),
      vel_W(Eigen::MatrixXd::Zero(out_dim, in_dim)),
      b(Eigen::VectorXd::Zero(out_dim)),
      grad_b(Eigen::VectorXd::Zero(out_dim)),
      vel_b(Eigen::VectorXd::Zero(out_dim)) {
  if (out_dim <= 0 || in_dim <= 0)
    throw std::invalid_argument("DenseLayer: dimensions must be positive");
}

void DenseLayer::glorot_init(Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
  for (Eigen::Index r = 0; r < W.rows(); ++r)
    for (Eigen::Index c = 0; c < W.cols(); ++c)
      W(r, c) = rng.uniform(-bound, bound);
  b.setZero();
}

void DenseLayer::zero_grad() {
  grad_W.setZero();
  grad_b.setZero();
}

Eigen::VectorXd DenseLayer::forward(const Eigen::VectorXd& x) const {
  if (x.size() != W.cols())
    throw std::invalid_argument("dense_forward: input length " +
                                std::to_string(x.size()) + " does not match " +
                                std::to_string(W.cols()));
  return W * x + b;
}

Eigen::VectorXd DenseLayer::backward(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& dy) {
  grad_W.noalias() += dy * x.transpose();
  grad_b += dy;
  return W.transpose() * dy;
}

Eigen::VectorXd relu(const Eigen::VectorXd& x) {
  return x.cwiseMax(0.0);
}

Eigen::VectorXd relu_backward(const Eigen::VectorXd& pre,
                              const Eigen::VectorXd& dy) {
  return (pre.array() > 0.0).select(dy, Eigen::VectorXd::Zero(dy.size()));
}

Eigen::VectorXd softmax(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw std::invalid_argument("softmax: empty input");
  const Eigen::ArrayXd shifted = x.array() - x.maxCoeff();
  const Eigen::ArrayXd e = shifted.exp();
  return (e / e.sum()).matrix();
}

Eigen::VectorXd softmax_backward(const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& dy) {
  const double dot = dy.dot(y);
  return (y.array() * (dy.array() - dot)).matrix();
}

Eigen::VectorXd dropout_mask(int n, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw std::invalid_argument("dropout rate must be in [0,1)");
  Eigen::VectorXd mask(n);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (int i = 0; i < n; ++i)
    mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  return mask;
}

GumbelSample gumbel_softmax(const Eigen::VectorXd& logits, double tau, Rng& rng) {
  Eigen::VectorXd noise(logits.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = rng.gumbel();
  return GumbelSample{gumbel_softmax_with_noise(logits, tau, noise), noise};
}

Eigen::VectorXd gumbel_softmax_with_noise(const Eigen::VectorXd& logits,
                                          double tau,
                                          const Eigen::VectorXd& noise) {
  if (!(tau > 0.0)) throw std::invalid_argument("gumbel_softmax: tau must be > 0");
  if (noise.size() != logits.size())
    throw std::invalid_argument("gumbel_softmax: noise length mismatch");
  return softmax((logits + noise) / tau);
}

double cross_entropy(const Eigen::VectorXd& pred, int target) {
  if (target < 0 || target >= pred.size())
    throw std::invalid_argument("cross_entropy: target index " +
                                std::to_string(target) + " out of range");
  return -std::log(std::max(pred[target], 1e-12));
}

void sgd_step(const std::vector<DenseLayer*>& layers, const TrainConfig& config,
              long step_count) {
  const double lr = config.learning_rate /
                    (1.0 + config.decay * static_cast<double>(step_count));
  for (DenseLayer* layer : layers) {
    // L2 acts on weight matrices only
    layer->vel_W = config.momentum * layer->vel_W -
                   lr * (layer->grad_W + config.l2 * layer->W);
    layer->vel_b = config.momentum * layer->vel_b - lr * layer->grad_b;
    layer->W += layer->vel_W;
    layer->b += layer->vel_b;
    layer->zero_grad();
  }
}

namespace {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
  return std::fabs(analytic - numeric) / denom;
}

}  // namespace

double grad_check(const std::function<double()>& loss_with_grads,
                  const std::vector<DenseLayer*>& params, double epsilon) {
  for (DenseLayer* p : params) p->zero_grad();
  loss_with_grads();
  std::vector<Eigen::MatrixXd> saved_W;
  std::vector<Eigen::VectorXd> saved_b;
  for (DenseLayer* p : params) {
    saved_W.push_back(p->grad_W);
    saved_b.push_back(p->grad_b);
    p->zero_grad();
  }

  double worst = 0.0;
  auto probe = [&](double* coord, double analytic) {
    const double orig = *coord;
    *coord = orig + epsilon;
    const double up = loss_with_grads();
    *coord = orig - epsilon;
    const double down = loss_with_grads();
    *coord = orig;
    for (DenseLayer* p : params) p->zero_grad();
    const double numeric = (up - down) / (2.0 * epsilon);
    worst = std::max(worst, relative_error(analytic, numeric));
  };

  for (std::size_t li = 0; li < params.size(); ++li) {
    DenseLayer* p = params[li];
    for (Eigen::Index r = 0; r < p->W.rows(); ++r)
      for (Eigen::Index c = 0; c < p->W.cols(); ++c)
        probe(&p->W(r, c), saved_W[li](r, c));
    for (Eigen::Index r = 0; r < p->b.size(); ++r)
      probe(&p->b(r), saved_b[li](r));
  }
  return worst;
}

nlohmann::ordered_json layer_to_json(const DenseLayer& layer) {
  nlohmann::ordered_json j;
  j["rows"] = layer.out_dim();
  j["cols"] = layer.in_dim();
  std::vector<double> w(static_cast<std::size_t>(layer.W.size()));
  for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
    for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
      w[static_cast<std::size_t>(r * layer.W.cols() + c)] = layer.W(r, c);
  j["W"] = std::move(w);
  std::vector<double> b(layer.b.data(), layer.b.data() + layer.b.size());
  j["b"] = std::move(b);
  return j;
}

DenseLayer layer_from_json(const nlohmann::json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto w = j.at("W").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  if (rows <= 0 || cols <= 0 ||
      w.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) ||
      b.size() != static_cast<std::size_t>(rows))
    throw ValidationError("layer tensor does not match its declared shape");
  DenseLayer layer(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      layer.W(r, c) = w[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                        static_cast<std::size_t>(c)];
  for (int r = 0; r < rows; ++r) layer.b[r] = b[static_cast<std::size_t>(r)];
  return layer;
}

}  // namespace claimcheck
