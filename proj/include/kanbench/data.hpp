#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kanbench/matrix.hpp"
#include "kanbench/rng.hpp"

namespace kanbench {

struct Dataset {
  Matrix features;                  // n x D
  std::vector<std::size_t> labels;  // class indices in [0, classes)
  std::size_t classes = 0;
  std::vector<std::string> feature_names;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
  std::vector<std::size_t> class_counts() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
  // Throws DataError when an invariant is broken.
  void validate() const;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;  // rows of the source dataset
  std::vector<std::size_t> test_indices;
  std::uint64_t split_seed = 0;
};

// Per-feature statistics fitted on a training set. Constant features keep a
// divisor of 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& features);
  Matrix apply(const Matrix& features) const;
};

enum class CsvSchema { cancer, printer, generic };
CsvSchema parse_schema(std::string_view text);
std::string_view to_string(CsvSchema schema);

inline constexpr std::size_t kCancerRows = 569;
inline constexpr std::size_t kCancerFeatures = 30;
inline constexpr std::size_t kPrinterRows = 104;
// Printer CSV header: seven feature columns then `printer`.
const std::vector<std::string>& printer_columns();

// XOR-style 2-D data: class 0 clusters at (-2,0),(2,0), class 1 at (0,-2),(0,2),
// isotropic sigma 0.4, n/4 points per cluster. n >= 8 and divisible by 4.
Dataset gen_two_cluster(std::size_t n, RngStream& rng);

// Stand-in with the printer data's shape: 104 x 7, three classes.
Dataset gen_printer_surrogate(RngStream& rng);

// Labels are the last column.
//   cancer:  30 numeric features + `diagnosis` in {M, B}   (M -> 1, B -> 0)
//   printer: the seven named features + `printer` in {makerbot, ultimaker, zortrax}
//   generic: numeric features + non-negative integer label; classes inferred
Dataset load_csv(const std::filesystem::path& path, CsvSchema schema);

// Generic schema: header x0..x{D-1},label.
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Per-class shuffle, then round-half-up(class_n * test_frac) rows of each
// class go to test (kept within [1, class_n - 1]).
SplitPair stratified_split(const Dataset& data, double test_frac, RngStream& rng);

// Standardizes both halves with statistics of the training half.
SplitPair standardize_fit_apply(const SplitPair& pair);

}  // namespace kanbench
