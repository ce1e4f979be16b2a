#pragma once

#include <stdexcept>
#include <string>

namespace kanbench {

// Dimension or length mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid hyperparameters or structural configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (bad CSV cell, unknown label, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse, e.g. a forward cache handed to the wrong network.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised by the trainer when the loss becomes non-finite.
class TrainingDivergence : public std::runtime_error {
 public:
  TrainingDivergence(int epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace kanbench
