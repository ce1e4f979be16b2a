// Command-line driver: synthetic data generation, depth benchmarks, spline
// order sweeps and parameter counting.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kanbench/bench.hpp"
#include "kanbench/error.hpp"

namespace {

using namespace kanbench;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct BenchFlags {
  std::string model = "mlp";
  std::string data = "synthetic-a";
  std::string schema = "generic";
  std::vector<std::size_t> depths = {1, 2, 3};
  std::size_t depth = 2;
  std::vector<int> orders = {1, 2, 3, 4, 5};
  std::size_t width = 2;
  std::size_t reps = 25;
  double test_frac = 0.3;
  int epochs = 20;
  double lr = 0.05;
  std::string optimizer = "adam";
  std::size_t batch_size = 32;
  int grid = 3;
  int order = 3;
  double domain_min = -1.0;
  double domain_max = 1.0;
  std::uint64_t seed = 0;
  std::string standardize = "on";
  std::size_t jobs = 1;
  std::string out;
  std::string format = "json";
  std::string name;
};

void add_data_flags(CLI::App* cmd, BenchFlags& f) {
  cmd->add_option("--data", f.data,
                  "Dataset: synthetic-a (n=1000), synthetic-b (n=100), printer-surrogate, "
                  "or a CSV path");
  cmd->add_option("--schema", f.schema, "CSV schema for --data paths")
      ->check(CLI::IsMember({"cancer", "printer", "generic"}));
}

void add_protocol_flags(CLI::App* cmd, BenchFlags& f) {
  cmd->add_option("--width", f.width, "Hidden layer width")->check(CLI::PositiveNumber);
  cmd->add_option("--reps", f.reps, "Repetitions (split + initialization) per configuration")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--test-frac", f.test_frac, "Test fraction of the stratified split")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "Learning rate")->check(CLI::NonNegativeNumber);
  cmd->add_option("--optimizer", f.optimizer, "Optimizer")
      ->check(CLI::IsMember({"adam", "gd"}));
  cmd->add_option("--batch-size", f.batch_size, "Mini-batch size (0 = full batch)");
  cmd->add_option("--grid", f.grid, "KAN grid size (spline intervals)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--domain-min", f.domain_min, "KAN spline domain lower end");
  cmd->add_option("--domain-max", f.domain_max, "KAN spline domain upper end");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--standardize", f.standardize, "Standardize features with train statistics")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--jobs", f.jobs, "Worker threads for repetitions (results are identical)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Results file");
  cmd->add_option("--format", f.format, "Results file format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--name", f.name, "Experiment tag written to the results");
}

ExperimentSpec base_spec(const BenchFlags& f, Arch arch) {
  ExperimentSpec spec;
  spec.name = f.name;
  spec.data = DatasetRef::parse(f.data, parse_schema(f.schema));
  spec.arch = arch;
  spec.width = f.width;
  spec.grid = {f.domain_min, f.domain_max, f.grid, f.order};
  spec.reps = f.reps;
  spec.test_frac = f.test_frac;
  spec.train = {f.epochs, f.lr, parse_optimizer(f.optimizer), f.batch_size};
  spec.master_seed = f.seed;
  spec.standardize = f.standardize == "on";
  return spec;
}

void print_table_header(const char* key) {
  std::printf("%-8s %-5s %8s %8s %8s %8s %8s %8s\n", key, "arch", "params", "median", "min",
              "max", "mean", "diverged");
}

void print_row(long key, const ExperimentRun& run) {
  std::size_t diverged = 0;
  for (const auto& r : run.results) diverged += r.diverged;
  std::printf("%-8ld %-5s %8zu %8.4f %8.4f %8.4f %8.4f %8zu\n", key,
              std::string(to_string(run.spec.arch)).c_str(), run.results.front().param_count,
              run.summary.median, run.summary.min, run.summary.max, run.summary.mean, diverged);
}

void write_results(const BenchFlags& f, const std::vector<ExperimentRun>& runs) {
  if (f.out.empty()) return;
  export_results(runs, f.out, f.format == "csv" ? ResultFormat::csv : ResultFormat::json);
  std::printf("wrote %s\n", f.out.c_str());
}

int cmd_gen_data(std::size_t n, std::uint64_t seed, const std::string& kind,
                 const std::string& out) {
  RngStream rng = rng_derive(seed, kDatasetStream);
  const Dataset data = kind == "printer-surrogate" ? gen_printer_surrogate(rng)
                                                   : gen_two_cluster(n, rng);
  write_csv(data, out);
  std::printf("wrote %zu rows to %s\n", data.size(), out.c_str());
  return kExitOk;
}

int cmd_bench(const BenchFlags& f, bool order_given, bool grid_given) {
  const Arch arch = parse_arch(f.model);
  if (arch == Arch::mlp && (order_given || grid_given)) {
    throw ConfigError("--order/--grid only apply to --model kan");
  }
  const auto sweep = depth_sweep(base_spec(f, arch), f.depths, f.jobs);
  std::vector<ExperimentRun> runs;
  print_table_header("depth");
  for (const auto& [depth, run] : sweep) {
    print_row(static_cast<long>(depth), run);
    runs.push_back(run);
  }
  write_results(f, runs);
  return kExitOk;
}

int cmd_order_sweep(const BenchFlags& f) {
  if (f.depth != 2) throw ConfigError("order-sweep runs at depth 2 (got --depth " +
                                      std::to_string(f.depth) + ")");
  if (f.width != 2) throw ConfigError("order-sweep runs at width 2 (got --width " +
                                      std::to_string(f.width) + ")");
  ExperimentSpec base = base_spec(f, Arch::kan);
  base.depth = f.depth;
  const auto sweep = order_sweep(base, f.orders, f.jobs);
  std::vector<ExperimentRun> runs;
  print_table_header("order");
  for (const auto& [order, run] : sweep) {
    print_row(order, run);
    runs.push_back(run);
  }
  write_results(f, runs);
  return kExitOk;
}

int cmd_count_params(const BenchFlags& f, std::size_t input_dim, std::size_t classes,
                     bool data_given) {
  if (data_given) {
    const Dataset data = resolve_dataset(DatasetRef::parse(f.data, parse_schema(f.schema)), f.seed);
    input_dim = data.dim();
    classes = data.classes;
  }
  const GridConfig grid{f.domain_min, f.domain_max, f.grid, f.order};
  std::printf("input_dim=%zu classes=%zu width=%zu grid=%d order=%d\n", input_dim, classes,
              f.width, f.grid, f.order);
  std::printf("%-6s %8s %8s %8s\n", "depth", "mlp", "kan", "ratio");
  for (std::size_t depth : f.depths) {
    const auto mlp = param_count(
        NetworkSpec::classifier(Arch::mlp, input_dim, depth, f.width, classes, grid));
    const auto kan = param_count(
        NetworkSpec::classifier(Arch::kan, input_dim, depth, f.width, classes, grid));
    std::printf("%-6zu %8zu %8zu %8.2f\n", depth, mlp, kan,
                static_cast<double>(kan) / static_cast<double>(mlp));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MLP (per-neuron SiLU) vs KAN (B-spline edges) low-data benchmark"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  BenchFlags flags;

  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_kind = "two-cluster";
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset as generic CSV");
  gen->add_option("--n", gen_n, "Number of samples (two-cluster: >= 8, divisible by 4)")
      ->required();
  gen->add_option("--seed", gen_seed, "Master seed (same stream bench uses)")->required();
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->add_option("--kind", gen_kind, "Generator")
      ->check(CLI::IsMember({"two-cluster", "printer-surrogate"}));

  auto* bench = app.add_subcommand("bench", "Repeated split/train/evaluate over depths");
  bench->add_option("--model", flags.model, "Architecture")->check(CLI::IsMember({"mlp", "kan"}));
  add_data_flags(bench, flags);
  bench->add_option("--depths", flags.depths, "Depths (hidden layers) to sweep")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  auto* bench_order = bench->add_option("--order", flags.order, "KAN spline order")
                          ->check(CLI::Range(1, 5));
  add_protocol_flags(bench, flags);

  auto* sweep = app.add_subcommand("order-sweep", "KAN spline-order sweep at depth 2, width 2");
  add_data_flags(sweep, flags);
  sweep->add_option("--orders", flags.orders, "Spline orders (1..5)")->delimiter(',');
  sweep->add_option("--depth", flags.depth, "Depth (must be 2)");
  add_protocol_flags(sweep, flags);

  std::size_t count_dim = 2;
  std::size_t count_classes = 2;
  auto* count = app.add_subcommand("count-params", "Parameter counts for both architectures");
  count->add_option("--input-dim", count_dim, "Input features D")->check(CLI::PositiveNumber);
  count->add_option("--classes", count_classes, "Number of classes C")
      ->check(CLI::Range(2, 1 << 20));
  auto* count_data = count->add_option("--data", flags.data,
                                       "Infer D and C from a dataset (overrides --input-dim, "
                                       "--classes)");
  count->add_option("--schema", flags.schema, "CSV schema for --data paths")
      ->check(CLI::IsMember({"cancer", "printer", "generic"}));
  count->add_option("--depths", flags.depths, "Depths")->delimiter(',')->check(CLI::PositiveNumber);
  count->add_option("--width", flags.width, "Hidden layer width")->check(CLI::PositiveNumber);
  count->add_option("--grid", flags.grid, "KAN grid size")->check(CLI::PositiveNumber);
  count->add_option("--order", flags.order, "KAN spline order")->check(CLI::Range(1, 5));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_data(gen_n, gen_seed, gen_kind, gen_out);
    if (*bench) {
      const bool grid_given = bench->count("--grid") > 0;
      return cmd_bench(flags, bench_order->count() > 0, grid_given);
    }
    if (*sweep) return cmd_order_sweep(flags);
    if (*count) return cmd_count_params(flags, count_dim, count_classes, count_data->count() > 0);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
