#include "kanbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "kanbench/error.hpp"

namespace kanbench {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json spec_to_json(const ExperimentRun& run) {
  const ExperimentSpec& s = run.spec;
  json j;
  j["name"] = s.name;
  j["dataset"] = s.data.label();
  j["schema"] = std::string(to_string(s.data.schema));
  j["arch"] = std::string(to_string(s.arch));
  j["depth"] = s.depth;
  j["width"] = s.width;
  if (s.arch == Arch::kan) {
    j["grid"] = s.grid.intervals;
    j["order"] = s.grid.order;
    j["domain"] = {s.grid.domain_min, s.grid.domain_max};
  } else {
    j["grid"] = nullptr;
    j["order"] = nullptr;
    j["domain"] = nullptr;
  }
  j["reps"] = s.reps;
  j["test_frac"] = s.test_frac;
  j["epochs"] = s.train.epochs;
  j["learning_rate"] = s.train.learning_rate;
  j["optimizer"] = std::string(to_string(s.train.optimizer));
  j["batch_size"] = s.train.batch_size;
  j["standardize"] = s.standardize;
  j["master_seed"] = s.master_seed;
  j["input_dim"] = run.input_dim;
  j["classes"] = run.classes;
  return j;
}

json result_to_json(const RepetitionResult& r) {
  json j;
  j["rep"] = r.rep_index;
  j["split_seed"] = r.split_seed;
  j["init_seed"] = r.init_seed;
  j["accuracy"] = r.test_accuracy;
  j["param_count"] = r.param_count;
  j["final_train_loss"] =
      std::isfinite(r.final_train_loss) ? json(r.final_train_loss) : json(nullptr);
  j["diverged"] = r.diverged;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

json summary_to_json(const Summary& s) {
  return {{"median", s.median}, {"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"std", s.std}};
}

}  // namespace

std::string DatasetRef::label() const {
  switch (kind) {
    case Kind::synthetic_a: return "synthetic-a";
    case Kind::synthetic_b: return "synthetic-b";
    case Kind::printer_surrogate: return "printer-surrogate";
    case Kind::csv: return path.string();
  }
  return path.string();
}

DatasetRef DatasetRef::parse(const std::string& text, CsvSchema schema) {
  DatasetRef ref;
  ref.schema = schema;
  if (text == "synthetic-a") {
    ref.kind = Kind::synthetic_a;
  } else if (text == "synthetic-b") {
    ref.kind = Kind::synthetic_b;
  } else if (text == "printer-surrogate") {
    ref.kind = Kind::printer_surrogate;
  } else {
    ref.kind = Kind::csv;
    ref.path = text;
  }
  return ref;
}

Dataset resolve_dataset(const DatasetRef& ref, std::uint64_t master_seed) {
  RngStream rng = rng_derive(master_seed, kDatasetStream);
  switch (ref.kind) {
    case DatasetRef::Kind::synthetic_a: return gen_two_cluster(1000, rng);
    case DatasetRef::Kind::synthetic_b: return gen_two_cluster(100, rng);
    case DatasetRef::Kind::printer_surrogate: return gen_printer_surrogate(rng);
    case DatasetRef::Kind::csv: return load_csv(ref.path, ref.schema);
  }
  throw ConfigError("unknown dataset reference");
}

void ExperimentSpec::validate() const {
  if (reps < 1) throw ConfigError("experiment: reps must be >= 1");
  if (depth < 1) throw ConfigError("experiment: depth must be >= 1");
  if (width < 1) throw ConfigError("experiment: width must be >= 1");
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw ConfigError("experiment: test fraction must lie in (0, 1)");
  }
  train.validate();
  if (arch == Arch::kan) (void)grid.make();
}

NetworkSpec ExperimentSpec::network_spec(std::size_t input_dim, std::size_t classes) const {
  return NetworkSpec::classifier(arch, input_dim, depth, width, classes, grid);
}

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
  const bool same_grid = a.arch == Arch::mlp || a.grid == b.grid;
  return a.name == b.name && a.data == b.data && a.arch == b.arch && a.depth == b.depth &&
         a.width == b.width && same_grid && a.reps == b.reps && a.test_frac == b.test_frac &&
         a.train.epochs == b.train.epochs && a.train.learning_rate == b.train.learning_rate &&
         a.train.optimizer == b.train.optimizer && a.train.batch_size == b.train.batch_size &&
         a.master_seed == b.master_seed && a.standardize == b.standardize;
}

Summary summarize_values(std::span<const double> values) {
  if (values.empty()) throw UsageError("summarize: no results");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  Summary s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double total = 0.0;
  for (double v : sorted) total += v;
  s.mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(n));
  return s;
}

Summary summarize(std::span<const RepetitionResult> results) {
  std::vector<double> acc;
  acc.reserve(results.size());
  for (const auto& r : results) acc.push_back(r.test_accuracy);
  return summarize_values(acc);
}

RepetitionResult run_repetition(const ExperimentSpec& spec, const Dataset& data, std::size_t rep) {
  const auto start = std::chrono::steady_clock::now();
  RepetitionResult result;
  result.rep_index = rep;
  result.split_seed = 2 * static_cast<std::uint64_t>(rep);
  result.init_seed = result.split_seed + 1;

  RngStream split_rng = rng_derive(spec.master_seed, result.split_seed);
  RngStream init_rng = rng_derive(spec.master_seed, result.init_seed);
  SplitPair pair = stratified_split(data, spec.test_frac, split_rng);
  if (spec.standardize) pair = standardize_fit_apply(pair);

  Network net = init_network(spec.network_spec(data.dim(), data.classes), init_rng);
  result.param_count = net.param_count();
  TrainHistory history;
  try {
    train_in_place(net, pair.train, spec.train, init_rng, history);
  } catch (const TrainingDivergence&) {
    result.diverged = true;
  }
  result.final_train_loss = history.epoch_loss.empty()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : history.epoch_loss.back();
  result.test_accuracy = evaluate_accuracy(net, pair.test);
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentRun run_experiment(const ExperimentSpec& spec, const Dataset& data, std::size_t jobs) {
  spec.validate();
  data.validate();
  ExperimentRun run;
  run.spec = spec;
  run.input_dim = data.dim();
  run.classes = data.classes;
  run.results.resize(spec.reps);

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, spec.reps);
  if (workers == 1) {
    for (std::size_t r = 0; r < spec.reps; ++r) run.results[r] = run_repetition(spec, data, r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = next++; r < spec.reps; r = next++) {
            run.results[r] = run_repetition(spec, data, r);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  run.summary = summarize(run.results);
  return run;
}

ExperimentRun run_experiment(const ExperimentSpec& spec, std::size_t jobs) {
  spec.validate();
  return run_experiment(spec, resolve_dataset(spec.data, spec.master_seed), jobs);
}

std::map<std::size_t, ExperimentRun> depth_sweep(const ExperimentSpec& base,
                                                 const std::vector<std::size_t>& depths,
                                                 std::size_t jobs) {
  if (depths.empty()) throw ConfigError("depth_sweep: no depths given");
  base.validate();
  const Dataset data = resolve_dataset(base.data, base.master_seed);
  std::map<std::size_t, ExperimentRun> out;
  for (std::size_t depth : depths) {
    ExperimentSpec spec = base;
    spec.depth = depth;
    out.insert_or_assign(depth, run_experiment(spec, data, jobs));
  }
  return out;
}

std::map<int, ExperimentRun> order_sweep(const ExperimentSpec& base, const std::vector<int>& orders,
                                         std::size_t jobs) {
  if (base.arch != Arch::kan) throw ConfigError("order_sweep: architecture must be kan");
  if (orders.empty()) throw ConfigError("order_sweep: no orders given");
  for (int k : orders) {
    if (k < 1 || k > 5) {
      throw ConfigError("order_sweep: spline order " + std::to_string(k) + " outside 1..5");
    }
  }
  base.validate();
  const Dataset data = resolve_dataset(base.data, base.master_seed);
  std::map<int, ExperimentRun> out;
  for (int k : orders) {
    ExperimentSpec spec = base;
    spec.grid.order = k;
    out.insert_or_assign(k, run_experiment(spec, data, jobs));
  }
  return out;
}

json results_to_json(std::span<const ExperimentRun> runs) {
  json doc;
  doc["format"] = "kanbench.results";
  doc["version"] = kResultsFormatVersion;
  doc["runs"] = json::array();
  for (const auto& run : runs) {
    json r;
    r["spec"] = spec_to_json(run);
    r["results"] = json::array();
    for (const auto& rep : run.results) r["results"].push_back(result_to_json(rep));
    r["summary"] = summary_to_json(run.summary);
    doc["runs"].push_back(std::move(r));
  }
  return doc;
}

std::vector<ExperimentRun> results_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "kanbench.results") {
      throw DataError("results json: unexpected format tag");
    }
    const int version = doc.at("version").get<int>();
    if (version != kResultsFormatVersion) {
      throw DataError("results json: unsupported version " + std::to_string(version) +
                      " (expected " + std::to_string(kResultsFormatVersion) + ")");
    }
    std::vector<ExperimentRun> runs;
    for (const json& r : doc.at("runs")) {
      ExperimentRun run;
      const json& s = r.at("spec");
      ExperimentSpec& spec = run.spec;
      spec.name = s.at("name").get<std::string>();
      spec.data = DatasetRef::parse(s.at("dataset").get<std::string>(),
                                    parse_schema(s.at("schema").get<std::string>()));
      spec.arch = parse_arch(s.at("arch").get<std::string>());
      spec.depth = s.at("depth").get<std::size_t>();
      spec.width = s.at("width").get<std::size_t>();
      if (spec.arch == Arch::kan) {
        spec.grid.intervals = s.at("grid").get<int>();
        spec.grid.order = s.at("order").get<int>();
        spec.grid.domain_min = s.at("domain").at(0).get<double>();
        spec.grid.domain_max = s.at("domain").at(1).get<double>();
      }
      spec.reps = s.at("reps").get<std::size_t>();
      spec.test_frac = s.at("test_frac").get<double>();
      spec.train.epochs = s.at("epochs").get<int>();
      spec.train.learning_rate = s.at("learning_rate").get<double>();
      spec.train.optimizer = parse_optimizer(s.at("optimizer").get<std::string>());
      spec.train.batch_size = s.at("batch_size").get<std::size_t>();
      spec.standardize = s.at("standardize").get<bool>();
      spec.master_seed = s.at("master_seed").get<std::uint64_t>();
      run.input_dim = s.at("input_dim").get<std::size_t>();
      run.classes = s.at("classes").get<std::size_t>();
      for (const json& e : r.at("results")) {
        RepetitionResult rep;
        rep.rep_index = e.at("rep").get<std::size_t>();
        rep.split_seed = e.at("split_seed").get<std::uint64_t>();
        rep.init_seed = e.at("init_seed").get<std::uint64_t>();
        rep.test_accuracy = e.at("accuracy").get<double>();
        rep.param_count = e.at("param_count").get<std::size_t>();
        rep.final_train_loss = e.at("final_train_loss").is_null()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : e.at("final_train_loss").get<double>();
        rep.diverged = e.at("diverged").get<bool>();
        rep.wall_time_ms = e.at("wall_time_ms").get<double>();
        run.results.push_back(rep);
      }
      const json& sm = r.at("summary");
      run.summary = {sm.at("median").get<double>(), sm.at("min").get<double>(),
                     sm.at("max").get<double>(), sm.at("mean").get<double>(),
                     sm.at("std").get<double>()};
      runs.push_back(std::move(run));
    }
    return runs;
  } catch (const json::exception& e) {
    throw DataError(std::string("results json: ") + e.what());
  }
}

std::string results_to_csv(std::span<const ExperimentRun> runs) {
  std::ostringstream out;
  out << "experiment,arch,depth,width,grid,order,rep,accuracy,param_count\n";
  for (const auto& run : runs) {
    const ExperimentSpec& s = run.spec;
    const bool kan = s.arch == Arch::kan;
    const std::string experiment = s.name.empty() ? s.data.label() : s.name;
    for (const auto& r : run.results) {
      out << experiment << ',' << to_string(s.arch) << ',' << s.depth << ',' << s.width << ','
          << (kan ? std::to_string(s.grid.intervals) : "") << ','
          << (kan ? std::to_string(s.grid.order) : "") << ',' << r.rep_index << ','
          << format_double(r.test_accuracy) << ',' << r.param_count << '\n';
    }
  }
  return out.str();
}

void export_results(std::span<const ExperimentRun> runs, const std::filesystem::path& path,
                    ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (format == ResultFormat::json) {
    out << results_to_json(runs).dump(2) << '\n';
  } else {
    out << results_to_csv(runs);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ExperimentRun> import_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("results json " + path.string() + ": " + e.what());
  }
  return results_from_json(doc);
}

}  // namespace kanbench
