#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "kanbench/data.hpp"
#include "kanbench/error.hpp"

using namespace kanbench;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

Dataset two_class(std::size_t per_class) {
  Dataset d;
  d.features = Matrix(2 * per_class, 1);
  d.classes = 2;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    d.features(i, 0) = static_cast<double>(i);
    d.labels.push_back(i < per_class ? 0 : 1);
  }
  return d;
}

}  // namespace

TEST_CASE("gen_two_cluster shape, balance and determinism") {
  RngStream rng = rng_derive(1, 0);
  const Dataset a = gen_two_cluster(1000, rng);
  CHECK(a.size() == 1000);
  CHECK(a.dim() == 2);
  CHECK(a.class_counts() == std::vector<std::size_t>{500, 500});

  const double centers[4][2] = {{-2, 0}, {2, 0}, {0, -2}, {0, 2}};
  const double tol = 3 * 0.4 / std::sqrt(250.0);
  for (int c = 0; c < 4; ++c) {
    double mx = 0, my = 0;
    for (int i = 0; i < 250; ++i) {
      mx += a.features(c * 250 + i, 0);
      my += a.features(c * 250 + i, 1);
    }
    CHECK(std::abs(mx / 250 - centers[c][0]) < tol);
    CHECK(std::abs(my / 250 - centers[c][1]) < tol);
  }

  RngStream r1 = rng_derive(2, 0), r2 = rng_derive(2, 0);
  const Dataset b1 = gen_two_cluster(100, r1);
  CHECK(b1.size() == 100);
  CHECK(b1.features == gen_two_cluster(100, r2).features);
  CHECK_THROWS_AS(gen_two_cluster(10, r1), ConfigError);
  CHECK_THROWS_AS(gen_two_cluster(4, r1), ConfigError);
}

TEST_CASE("printer surrogate has the printer data's shape") {
  RngStream rng = rng_derive(3, 0);
  const Dataset p = gen_printer_surrogate(rng);
  CHECK(p.size() == 104);
  CHECK(p.dim() == 7);
  CHECK(p.classes == 3);
  p.validate();
}

TEST_CASE("stratified_split arithmetic and invariants") {
  RngStream rng = rng_derive(4, 0);
  const Dataset d = two_class(10);
  const SplitPair pair = stratified_split(d, 0.3, rng);
  CHECK(pair.test.class_counts() == std::vector<std::size_t>{3, 3});
  CHECK(pair.train.class_counts() == std::vector<std::size_t>{7, 7});

  std::vector<std::size_t> all = pair.train_indices;
  all.insert(all.end(), pair.test_indices.begin(), pair.test_indices.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(20);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);

  // 212 + 357 rows -> round(63.6) + round(107.1) = 171 test rows.
  Dataset cancer_like;
  cancer_like.features = Matrix(569, 1);
  cancer_like.classes = 2;
  for (std::size_t i = 0; i < 569; ++i) cancer_like.labels.push_back(i < 212 ? 1 : 0);
  const SplitPair cp = stratified_split(cancer_like, 0.3, rng);
  CHECK(cp.test.size() == 171);

  RngStream s1 = rng_derive(5, 0), s2 = rng_derive(5, 0);
  CHECK(stratified_split(cancer_like, 0.3, s1).test_indices ==
        stratified_split(cancer_like, 0.3, s2).test_indices);

  Dataset tiny = two_class(3);
  tiny.labels[0] = 1;
  tiny.labels[1] = 1;
  CHECK_THROWS_AS(stratified_split(tiny, 0.3, rng), DataError);
  CHECK_THROWS_AS(stratified_split(d, 1.0, rng), ConfigError);
}

TEST_CASE("stratified_split keeps class proportions on random data") {
  RngStream rng = rng_derive(6, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Dataset d;
    const std::size_t classes = 2 + rng.uniform_index(3);
    const std::size_t n = 20 + rng.uniform_index(200);
    d.features = Matrix(n, 1);
    d.classes = classes;
    for (std::size_t i = 0; i < n; ++i) d.labels.push_back(i % classes);
    const double frac = rng.uniform(0.1, 0.5);
    const SplitPair pair = stratified_split(d, frac, rng);
    const auto total = d.class_counts();
    const auto test = pair.test.class_counts();
    for (std::size_t c = 0; c < classes; ++c) {
      CHECK(std::abs(static_cast<double>(test[c]) - frac * total[c]) <= 1.0);
    }
    CHECK(pair.train.size() + pair.test.size() == n);
  }
}

TEST_CASE("standardize_fit_apply uses train statistics") {
  RngStream rng = rng_derive(7, 0);
  Dataset d;
  d.features = Matrix(40, 3);
  d.classes = 2;
  for (std::size_t i = 0; i < 40; ++i) {
    d.features(i, 0) = 1000.0 + 50.0 * rng.normal();
    d.features(i, 1) = 5.0;  // constant
    d.features(i, 2) = 1e-3 * rng.normal();
    d.labels.push_back(i % 2);
  }
  const SplitPair raw = stratified_split(d, 0.25, rng);
  const SplitPair st = standardize_fit_apply(raw);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < st.train.size(); ++r) mean += st.train.features(r, c);
    CHECK(std::abs(mean / st.train.size()) < 1e-10);
  }
  for (std::size_t r = 0; r < st.train.size(); ++r) CHECK(st.train.features(r, 1) == 0.0);

  const Standardizer fitted = Standardizer::fit(raw.train.features);
  CHECK(fitted.scale[1] == 1.0);
  Matrix means(1, 3);
  for (std::size_t c = 0; c < 3; ++c) means(0, c) = fitted.mean[c];
  const Matrix centred = fitted.apply(means);
  for (double v : centred.data()) CHECK(v == 0.0);
  CHECK(st.test.features == fitted.apply(raw.test.features));
}

TEST_CASE("load_csv: generic schema infers classes") {
  const auto path = write_temp("kanbench_generic.csv", "a,b,c,label\n1,2,3,0\n4,5,6,2\n7,8,9,1\n");
  const Dataset d = load_csv(path, CsvSchema::generic);
  CHECK(d.size() == 3);
  CHECK(d.dim() == 3);
  CHECK(d.classes == 3);
  CHECK(d.features(1, 2) == 6.0);
  std::filesystem::remove(path);
}

TEST_CASE("load_csv: errors carry location") {
  CHECK_THROWS_AS(load_csv("/nonexistent/kanbench.csv", CsvSchema::generic), IoError);

  const auto bad_cell = write_temp("kanbench_bad.csv", "a,label\n1,0\nfoo,1\n");
  try {
    (void)load_csv(bad_cell, CsvSchema::generic);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3, column 1") != std::string::npos);
  }
  const auto bad_label = write_temp("kanbench_label.csv", "a,label\n1,0\n2,x\n");
  CHECK_THROWS_AS(load_csv(bad_label, CsvSchema::generic), DataError);
  std::filesystem::remove(bad_cell);
  std::filesystem::remove(bad_label);
}

TEST_CASE("load_csv: printer schema") {
  std::string body =
      "tensile_strength,elastic_modulus,elongation_at_break,extrusion_temperature,layer_height,"
      "bed_temperature,print_speed,printer\n";
  const char* names[] = {"makerbot", "Ultimaker", "zortrax"};
  for (int i = 0; i < 6; ++i) body += "30,2000,4,210,0.2,60,50," + std::string(names[i % 3]) + "\n";
  const auto path = write_temp("kanbench_printer.csv", body);
  const Dataset d = load_csv(path, CsvSchema::printer);
  CHECK(d.classes == 3);
  CHECK(d.dim() == 7);
  CHECK(d.labels == std::vector<std::size_t>{0, 1, 2, 0, 1, 2});

  const auto wrong = write_temp("kanbench_printer_bad.csv", "a,b,printer\n1,2,zortrax\n");
  CHECK_THROWS_AS(load_csv(wrong, CsvSchema::printer), DataError);
  const auto unknown = write_temp("kanbench_printer_unknown.csv",
                                  body + "30,2000,4,210,0.2,60,50,prusa\n");
  CHECK_THROWS_AS(load_csv(unknown, CsvSchema::printer), DataError);
  std::filesystem::remove(path);
  std::filesystem::remove(wrong);
  std::filesystem::remove(unknown);
}

TEST_CASE("load_csv: shipped breast cancer file") {
  const std::filesystem::path path = KANBENCH_DATA_DIR "/breast_cancer.csv";
  const Dataset d = load_csv(path, CsvSchema::cancer);
  CHECK(d.size() == 569);
  CHECK(d.dim() == 30);
  CHECK(d.classes == 2);
  CHECK(d.class_counts()[1] == 212);
}

TEST_CASE("write_csv round trips through the generic schema") {
  RngStream rng = rng_derive(8, 0);
  const Dataset d = gen_two_cluster(40, rng);
  const auto path = std::filesystem::temp_directory_path() / "kanbench_roundtrip.csv";
  write_csv(d, path);
  const Dataset back = load_csv(path, CsvSchema::generic);
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  std::filesystem::remove(path);
}
