#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kanbench/data.hpp"
#include "kanbench/matrix.hpp"
#include "kanbench/network.hpp"
#include "kanbench/rng.hpp"

namespace kanbench {

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before the log.
inline constexpr double kProbClamp = 1e-12;

struct LossResult {
  double loss = 0.0;
  std::vector<double> d_probs;  // same layout as the probability input
};

// Mean binary cross-entropy over n probabilities of class 1.
LossResult bce_loss(std::span<const double> probs, std::span<const std::size_t> labels);

// Mean categorical cross-entropy; probs is n x C row-major.
LossResult cce_loss(const Matrix& probs, std::span<const std::size_t> labels);

enum class OptimizerKind { adam, gd };
std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.05;
  OptimizerKind optimizer = OptimizerKind::adam;
  // Rows are reshuffled every epoch and split into batches of this size;
  // 0 trains full-batch.
  std::size_t batch_size = 32;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> epoch_loss;  // mean training loss seen during each epoch
};

struct TrainResult {
  Network net;
  TrainHistory history;
};

// Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam {
 public:
  Adam(std::size_t n_params, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);
  void step(std::span<double> params, std::span<const double> grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long step_ = 0;
};

// Loss and its gradient with respect to the network output for a labeled batch.
LossResult classification_loss(const Network& net, const Matrix& probs,
                               std::span<const std::size_t> labels);

// Trains `net` in place. On a non-finite loss throws TrainingDivergence; `net`
// then holds the parameters that produced it and `history` the finished epochs.
void train_in_place(Network& net, const Dataset& data, const TrainConfig& cfg, RngStream& rng,
                    TrainHistory& history);

TrainResult train(Network net, const Dataset& data, const TrainConfig& cfg, RngStream& rng);

// Class predictions: sigmoid heads threshold at p > 0.5 (exactly 0.5 is class
// 0); softmax heads take the argmax, ties going to the lowest index.
std::vector<std::size_t> predict(const Network& net, const Matrix& features);
double evaluate_accuracy(const Network& net, const Dataset& data);

}  // namespace kanbench
