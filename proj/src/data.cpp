#include "kanbench/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "kanbench/error.hpp"

namespace kanbench {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError("csv row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                    ": cannot parse '" + cell + "' as a finite number");
  }
  return value;
}

std::size_t parse_label(CsvSchema schema, const std::string& cell, std::size_t row) {
  const std::string key = lower(cell);
  auto fail = [&]() -> std::size_t {
    throw DataError("csv row " + std::to_string(row) + ": unknown label '" + cell + "'");
  };
  switch (schema) {
    case CsvSchema::cancer:
      if (key == "m" || key == "malignant") return 1;
      if (key == "b" || key == "benign") return 0;
      return fail();
    case CsvSchema::printer:
      // Accept full model names such as "MakerBot Replicator 2X".
      if (key.rfind("makerbot", 0) == 0) return 0;
      if (key.rfind("ultimaker", 0) == 0) return 1;
      if (key.rfind("zortrax", 0) == 0) return 2;
      return fail();
    case CsvSchema::generic: {
      std::size_t value = 0;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), value);
      if (ec != std::errc() || ptr != key.data() + key.size()) return fail();
      return value;
    }
  }
  return fail();
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t y : labels) ++counts.at(y);
  return counts;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.features = Matrix(indices.size(), dim());
  out.labels.reserve(indices.size());
  out.classes = classes;
  out.feature_names = feature_names;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = features.row(indices[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels.push_back(labels[indices[r]]);
  }
  return out;
}

void Dataset::validate() const {
  if (labels.empty()) throw DataError("dataset is empty");
  if (features.rows() != labels.size()) {
    throw DataError("dataset has " + std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  for (std::size_t y : labels) {
    if (y >= classes) {
      throw DataError("label " + std::to_string(y) + " outside [0, " + std::to_string(classes) +
                      ")");
    }
  }
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw DataError("dataset contains a non-finite feature value");
  }
}

Standardizer Standardizer::fit(const Matrix& features) {
  Standardizer st;
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  st.mean.assign(d, 0.0);
  st.scale.assign(d, 1.0);
  if (n == 0) return st;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) st.mean[c] += features(r, c);
  for (double& m : st.mean) m /= static_cast<double>(n);
  for (std::size_t c = 0; c < d; ++c) {
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double delta = features(r, c) - st.mean[c];
      var += delta * delta;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    // Relative floor so a column of identical large values counts as constant.
    const double floor = 1e-12 * std::max(1.0, std::abs(st.mean[c]));
    st.scale[c] = sd > floor ? sd : 1.0;
  }
  return st;
}

Matrix Standardizer::apply(const Matrix& features) const {
  if (features.cols() != mean.size()) {
    throw ShapeError("Standardizer: fitted on " + std::to_string(mean.size()) +
                     " features, got " + features.shape_string());
  }
  Matrix out = features;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = (out(r, c) - mean[c]) / scale[c];
  return out;
}

CsvSchema parse_schema(std::string_view text) {
  if (text == "cancer") return CsvSchema::cancer;
  if (text == "printer") return CsvSchema::printer;
  if (text == "generic") return CsvSchema::generic;
  throw ConfigError("unknown csv schema '" + std::string(text) +
                    "' (expected cancer, printer or generic)");
}

std::string_view to_string(CsvSchema schema) {
  switch (schema) {
    case CsvSchema::cancer: return "cancer";
    case CsvSchema::printer: return "printer";
    case CsvSchema::generic: return "generic";
  }
  return "generic";
}

const std::vector<std::string>& printer_columns() {
  static const std::vector<std::string> columns = {
      "tensile_strength",      "elastic_modulus", "elongation_at_break",
      "extrusion_temperature", "layer_height",    "bed_temperature",
      "print_speed",           "printer"};
  return columns;
}

Dataset gen_two_cluster(std::size_t n, RngStream& rng) {
  if (n < 8 || n % 4 != 0) {
    throw ConfigError("gen_two_cluster: n must be >= 8 and divisible by 4, got " +
                      std::to_string(n));
  }
  constexpr std::array<std::array<double, 2>, 4> centers = {
      {{-2.0, 0.0}, {2.0, 0.0}, {0.0, -2.0}, {0.0, 2.0}}};
  constexpr double sigma = 0.4;
  const std::size_t per_cluster = n / 4;
  Dataset data;
  data.features = Matrix(n, 2);
  data.labels.resize(n);
  data.classes = 2;
  data.feature_names = {"x0", "x1"};
  std::size_t row = 0;
  for (std::size_t cluster = 0; cluster < 4; ++cluster) {
    for (std::size_t i = 0; i < per_cluster; ++i, ++row) {
      data.features(row, 0) = centers[cluster][0] + sigma * rng.normal();
      data.features(row, 1) = centers[cluster][1] + sigma * rng.normal();
      data.labels[row] = cluster / 2;
    }
  }
  return data;
}

Dataset gen_printer_surrogate(RngStream& rng) {
  // Process settings follow a factorial-style design shared by all printers;
  // only the measured tensile properties carry printer identity, and they
  // also respond to the process settings.
  constexpr std::array<double, 3> extrusion = {200.0, 215.0, 230.0};
  constexpr std::array<double, 3> layer = {0.1, 0.2, 0.3};
  constexpr std::array<double, 2> bed = {60.0, 90.0};
  constexpr std::array<double, 3> speed = {30.0, 50.0, 70.0};
  // Per printer: strength (MPa), modulus (MPa), elongation (%).
  constexpr std::array<std::array<double, 3>, 3> base = {
      {{32.0, 2100.0, 4.0}, {37.0, 2350.0, 3.2}, {29.0, 1900.0, 5.1}}};
  constexpr std::array<std::size_t, 3> counts = {35, 35, 34};

  Dataset data;
  data.features = Matrix(kPrinterRows, 7);
  data.labels.resize(kPrinterRows);
  data.classes = 3;
  data.feature_names.assign(printer_columns().begin(), printer_columns().end() - 1);
  std::size_t row = 0;
  for (std::size_t cls = 0; cls < 3; ++cls) {
    for (std::size_t i = 0; i < counts[cls]; ++i, ++row) {
      const double t = extrusion[rng.uniform_index(extrusion.size())];
      const double h = layer[rng.uniform_index(layer.size())];
      const double b = bed[rng.uniform_index(bed.size())];
      const double v = speed[rng.uniform_index(speed.size())];
      const double strength = base[cls][0] + 0.08 * (t - 215.0) - 15.0 * (h - 0.2) +
                              0.03 * (b - 75.0) - 0.04 * (v - 50.0) + 2.0 * rng.normal();
      const double modulus = base[cls][1] + 4.0 * (t - 215.0) - 900.0 * (h - 0.2) +
                             130.0 * rng.normal();
      const double elongation = base[cls][2] - 0.02 * (t - 215.0) + 3.0 * (h - 0.2) +
                                0.6 * rng.normal();
      const auto out = data.features.row(row);
      out[0] = strength;
      out[1] = modulus;
      out[2] = elongation;
      out[3] = t;
      out[4] = h;
      out[5] = b;
      out[6] = v;
      data.labels[row] = cls;
    }
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open csv file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("csv " + path.string() + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_row(line);
  if (header.size() < 2) {
    throw DataError("csv " + path.string() + ": need at least one feature and a label column");
  }
  const std::size_t dim = header.size() - 1;

  switch (schema) {
    case CsvSchema::cancer:
      if (dim != kCancerFeatures || lower(header.back()) != "diagnosis") {
        throw DataError("csv " + path.string() +
                        ": cancer schema expects 30 feature columns followed by 'diagnosis'");
      }
      break;
    case CsvSchema::printer: {
      const auto& expected = printer_columns();
      std::vector<std::string> got;
      for (const auto& h : header) got.push_back(lower(h));
      if (got != expected) {
        throw DataError("csv " + path.string() + ": printer schema expects header " +
                        "tensile_strength,elastic_modulus,elongation_at_break,"
                        "extrusion_temperature,layer_height,bed_temperature,print_speed,printer");
      }
      break;
    }
    case CsvSchema::generic:
      break;
  }

  std::vector<double> values;
  std::vector<std::size_t> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw DataError("csv row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " columns, found " +
                      std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < dim; ++c) values.push_back(parse_number(cells[c], row, c));
    labels.push_back(parse_label(schema, cells.back(), row));
  }
  if (labels.empty()) throw DataError("csv " + path.string() + ": no data rows");

  Dataset data;
  data.features = Matrix(labels.size(), dim);
  std::copy(values.begin(), values.end(), data.features.data().begin());
  data.labels = std::move(labels);
  data.feature_names.assign(header.begin(), header.end() - 1);
  switch (schema) {
    case CsvSchema::cancer: data.classes = 2; break;
    case CsvSchema::printer: data.classes = 3; break;
    case CsvSchema::generic:
      data.classes = std::max<std::size_t>(
          2, *std::max_element(data.labels.begin(), data.labels.end()) + 1);
      break;
  }

  const std::size_t expected_rows = schema == CsvSchema::cancer    ? kCancerRows
                                    : schema == CsvSchema::printer ? kPrinterRows
                                                                   : 0;
  if (expected_rows != 0 && data.size() != expected_rows) {
    std::cerr << "warning: " << path.string() << " has " << data.size() << " rows, "
              << to_string(schema) << " data normally has " << expected_rows << '\n';
  }
  data.validate();
  return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t c = 0; c < data.dim(); ++c) out << 'x' << c << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.dim(); ++c) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, data.features(r, c));
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << data.labels[r] << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

SplitPair stratified_split(const Dataset& data, double test_frac, RngStream& rng) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw ConfigError("stratified_split: test fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_class(data.classes);
  for (std::size_t i = 0; i < data.size(); ++i) by_class.at(data.labels[i]).push_back(i);

  SplitPair pair;
  pair.split_seed = rng.stream_id();
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() < 2) {
      throw DataError("stratified_split: class " + std::to_string(c) +
                      " has fewer than 2 samples");
    }
    rng.shuffle(idx);
    auto n_test = static_cast<std::size_t>(std::floor(idx.size() * test_frac + 0.5));
    n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    pair.test_indices.insert(pair.test_indices.end(), idx.begin(),
                             idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    pair.train_indices.insert(pair.train_indices.end(),
                              idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  pair.train = data.subset(pair.train_indices);
  pair.test = data.subset(pair.test_indices);
  return pair;
}

SplitPair standardize_fit_apply(const SplitPair& pair) {
  SplitPair out = pair;
  const Standardizer st = Standardizer::fit(pair.train.features);
  out.train.features = st.apply(pair.train.features);
  out.test.features = st.apply(pair.test.features);
  return out;
}

}  // namespace kanbench
