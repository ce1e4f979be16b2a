#include "kanbench/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kanbench/error.hpp"

namespace kanbench {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

LossResult bce_loss(std::span<const double> probs, std::span<const std::size_t> labels) {
  if (probs.size() != labels.size()) {
    throw ShapeError("bce_loss: " + std::to_string(probs.size()) + " probabilities vs " +
                     std::to_string(labels.size()) + " labels");
  }
  const double n = static_cast<double>(probs.size());
  LossResult out;
  out.d_probs.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    if (labels[i] == 1) {
      out.loss -= std::log(p);
      out.d_probs[i] = -1.0 / (p * n);
    } else {
      out.loss -= std::log(1.0 - p);
      out.d_probs[i] = 1.0 / ((1.0 - p) * n);
    }
  }
  out.loss /= n;
  return out;
}

LossResult cce_loss(const Matrix& probs, std::span<const std::size_t> labels) {
  if (probs.rows() != labels.size()) {
    throw ShapeError("cce_loss: " + probs.shape_string() + " probabilities vs " +
                     std::to_string(labels.size()) + " labels");
  }
  const double n = static_cast<double>(labels.size());
  LossResult out;
  out.d_probs.assign(probs.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= probs.cols()) {
      throw DataError("cce_loss: label " + std::to_string(labels[i]) + " outside [0, " +
                      std::to_string(probs.cols()) + ")");
    }
    const double p = clamp_prob(probs(i, labels[i]));
    out.loss -= std::log(p);
    out.d_probs[i * probs.cols() + labels[i]] = -1.0 / (p * n);
  }
  out.loss /= n;
  return out;
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::adam ? "adam" : "gd";
}

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "adam") return OptimizerKind::adam;
  if (text == "gd") return OptimizerKind::gd;
  throw ConfigError("unknown optimizer '" + std::string(text) + "' (expected adam or gd)");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train: learning rate must be a finite non-negative number");
  }
}

Adam::Adam(std::size_t n_params, double learning_rate, double beta1, double beta2,
           double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(n_params, 0.0),
      v_(n_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("Adam::step: parameter/gradient length mismatch");
  }
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

LossResult classification_loss(const Network& net, const Matrix& probs,
                               std::span<const std::size_t> labels) {
  if (net.spec().head == HeadKind::sigmoid_binary) {
    return bce_loss(probs.data(), labels);
  }
  return cce_loss(probs, labels);
}

void train_in_place(Network& net, const Dataset& data, const TrainConfig& cfg, RngStream& rng,
                    TrainHistory& history) {
  cfg.validate();
  if (data.size() == 0) throw DataError("train: empty dataset");
  if (data.dim() != net.spec().input_dim) {
    throw ShapeError("train: data has " + std::to_string(data.dim()) +
                     " features, network expects " + std::to_string(net.spec().input_dim));
  }

  const std::size_t n = data.size();
  const std::size_t batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);
  std::vector<double> params = net.flatten_params();
  Adam adam(params.size(), cfg.learning_rate);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  history.epoch_loss.clear();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      Dataset chunk;
      const Dataset* view = &data;
      if (batch < n) {
        chunk = data.subset(std::vector<std::size_t>(order.begin() + start, order.begin() + stop));
        view = &chunk;
      }
      const auto fwd = net.forward(view->features);
      const LossResult loss = classification_loss(net, fwd.probs, view->labels);
      if (!std::isfinite(loss.loss)) {
        throw TrainingDivergence(epoch, "training diverged at epoch " + std::to_string(epoch) +
                                            ": non-finite loss");
      }
      epoch_loss += loss.loss * static_cast<double>(stop - start);
      Matrix d_probs(fwd.probs.rows(), fwd.probs.cols());
      std::copy(loss.d_probs.begin(), loss.d_probs.end(), d_probs.data().begin());
      const GradientBundle grads = net.backward(fwd.cache, d_probs);
      if (cfg.optimizer == OptimizerKind::adam) {
        adam.step(params, grads.params);
      } else {
        for (std::size_t i = 0; i < params.size(); ++i) {
          params[i] -= cfg.learning_rate * grads.params[i];
        }
      }
      net.set_params(params);
    }
    history.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }
}

TrainResult train(Network net, const Dataset& data, const TrainConfig& cfg, RngStream& rng) {
  TrainHistory history;
  train_in_place(net, data, cfg, rng, history);
  return {std::move(net), std::move(history)};
}

std::vector<std::size_t> predict(const Network& net, const Matrix& features) {
  const Matrix probs = net.forward(features).probs;
  std::vector<std::size_t> out(probs.rows(), 0);
  for (std::size_t s = 0; s < probs.rows(); ++s) {
    if (net.spec().head == HeadKind::sigmoid_binary) {
      out[s] = probs(s, 0) > 0.5 ? 1 : 0;
    } else {
      std::size_t best = 0;
      for (std::size_t c = 1; c < probs.cols(); ++c) {
        if (probs(s, c) > probs(s, best)) best = c;
      }
      out[s] = best;
    }
  }
  return out;
}

double evaluate_accuracy(const Network& net, const Dataset& data) {
  if (data.size() == 0) throw DataError("evaluate_accuracy: empty dataset");
  const auto predicted = predict(net, data.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace kanbench
