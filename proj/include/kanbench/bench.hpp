#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kanbench/data.hpp"
#include "kanbench/network.hpp"
#include "kanbench/training.hpp"

namespace kanbench {

struct DatasetRef {
  enum class Kind { synthetic_a, synthetic_b, printer_surrogate, csv };
  Kind kind = Kind::synthetic_a;
  std::filesystem::path path;  // csv only
  CsvSchema schema = CsvSchema::generic;

  // "synthetic-a", "synthetic-b", "printer-surrogate" or the csv path.
  std::string label() const;
  // Inverse of label(); anything else is treated as a csv path.
  static DatasetRef parse(const std::string& text, CsvSchema schema);

  friend bool operator==(const DatasetRef&, const DatasetRef&) = default;
};

// Stream id used to generate synthetic datasets from the master seed. Split
// and init streams use 2r and 2r + 1, so this never collides in practice.
inline constexpr std::uint64_t kDatasetStream = ~std::uint64_t{0};

// Synthetic data is drawn from (master_seed, kDatasetStream); csv is loaded.
Dataset resolve_dataset(const DatasetRef& ref, std::uint64_t master_seed);

struct ExperimentSpec {
  std::string name;  // free-form tag carried into exports
  DatasetRef data;
  Arch arch = Arch::mlp;
  std::size_t depth = 1;
  std::size_t width = 2;
  GridConfig grid;  // ignored for mlp
  std::size_t reps = 25;
  double test_frac = 0.3;
  TrainConfig train;
  std::uint64_t master_seed = 0;
  bool standardize = true;

  void validate() const;
  NetworkSpec network_spec(std::size_t input_dim, std::size_t classes) const;

  friend bool operator==(const ExperimentSpec& a, const ExperimentSpec& b);
};

struct RepetitionResult {
  std::size_t rep_index = 0;
  std::uint64_t split_seed = 0;  // stream id under the master seed (2r)
  std::uint64_t init_seed = 0;   // stream id under the master seed (2r + 1)
  double test_accuracy = 0.0;
  std::size_t param_count = 0;
  double final_train_loss = 0.0;  // NaN when training diverged before any epoch finished
  bool diverged = false;
  double wall_time_ms = 0.0;  // not covered by the determinism contract
};

struct Summary {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct ExperimentRun {
  ExperimentSpec spec;
  std::size_t input_dim = 0;
  std::size_t classes = 0;
  std::vector<RepetitionResult> results;  // ordered by rep_index
  Summary summary;
};

// Order statistics over test accuracy; an even count takes the mean of the
// two central values. Throws UsageError on empty input.
Summary summarize(std::span<const RepetitionResult> results);
Summary summarize_values(std::span<const double> values);

// Runs one repetition in isolation: split with (master_seed, 2r), initialize
// and shuffle with (master_seed, 2r + 1), train, evaluate on the test half.
RepetitionResult run_repetition(const ExperimentSpec& spec, const Dataset& data, std::size_t rep);

// `jobs` > 1 runs repetitions on worker threads; results are identical to a
// sequential run.
ExperimentRun run_experiment(const ExperimentSpec& spec, const Dataset& data,
                             std::size_t jobs = 1);
ExperimentRun run_experiment(const ExperimentSpec& spec, std::size_t jobs = 1);

// One experiment per depth, all sharing the base master seed, so every depth
// sees the same splits.
std::map<std::size_t, ExperimentRun> depth_sweep(const ExperimentSpec& base,
                                                 const std::vector<std::size_t>& depths,
                                                 std::size_t jobs = 1);

// Spline-order sweep for KANs (orders within 1..5).
std::map<int, ExperimentRun> order_sweep(const ExperimentSpec& base,
                                         const std::vector<int>& orders,
                                         std::size_t jobs = 1);

enum class ResultFormat { json, csv };

inline constexpr int kResultsFormatVersion = 1;

nlohmann::json results_to_json(std::span<const ExperimentRun> runs);
std::vector<ExperimentRun> results_from_json(const nlohmann::json& doc);

void export_results(std::span<const ExperimentRun> runs, const std::filesystem::path& path,
                    ResultFormat format);
std::vector<ExperimentRun> import_results(const std::filesystem::path& path);

// CSV rows: experiment,arch,depth,width,grid,order,rep,accuracy,param_count.
std::string results_to_csv(std::span<const ExperimentRun> runs);

}  // namespace kanbench
