#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanbench/activations.hpp"
#include "kanbench/bspline.hpp"
#include "kanbench/matrix.hpp"
#include "kanbench/rng.hpp"

namespace kanbench {

enum class Arch { mlp, kan };
enum class HeadKind { sigmoid_binary, softmax_multiclass };

std::string_view to_string(Arch arch);
std::string_view to_string(HeadKind head);
Arch parse_arch(std::string_view text);
HeadKind parse_head(std::string_view text);

struct GridConfig {
  double domain_min = -1.0;
  double domain_max = 1.0;
  int intervals = 3;
  int order = 3;

  SplineGrid make() const { return {domain_min, domain_max, intervals, order}; }
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

// Architecture description. `hidden_widths.size()` is the depth L for both
// architectures; the output layer comes on top of the hidden stack.
struct NetworkSpec {
  Arch arch = Arch::mlp;
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_widths;
  HeadKind head = HeadKind::sigmoid_binary;
  std::size_t classes = 2;
  GridConfig grid;  // ignored for mlp

  // Constant-width classifier; two classes get a 1-unit sigmoid head unless
  // `binary_softmax` asks for a 2-unit softmax head.
  static NetworkSpec classifier(Arch arch, std::size_t input_dim, std::size_t depth,
                                std::size_t width, std::size_t classes,
                                GridConfig grid = {}, bool binary_softmax = false);

  std::size_t depth() const noexcept { return hidden_widths.size(); }
  std::size_t output_units() const noexcept {
    return head == HeadKind::sigmoid_binary ? 1 : classes;
  }
  // Throws ConfigError on an inconsistent spec.
  void validate() const;

  // The grid only takes part for kan.
  friend bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
    return a.arch == b.arch && a.input_dim == b.input_dim && a.hidden_widths == b.hidden_widths &&
           a.head == b.head && a.classes == b.classes && (a.arch == Arch::mlp || a.grid == b.grid);
  }
};

// Parameter total implied by a spec.
//   mlp: sum over hidden layers of (N_in * N_out + 2 N_out) + head (N_L * C + C)
//   kan: sum over all KAN layers (head included) of N_in * N_out * (G + k + 2)
std::size_t param_count(const NetworkSpec& spec);

// Hidden MLP layer: z = W a + b, a_i = SiLU(z_i; beta_i) with one beta per neuron.
struct DenseSiluLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;
  std::vector<double> beta;
};

// MLP output layer: affine map, no activation parameters.
struct LinearLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;
};

// KAN layer: output node j sums g_{j,i}(x_i) over inputs i. No node biases.
struct KanLayer {
  SplineGrid grid;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<KanEdge> edges;  // row-major [output][input]

  KanEdge& edge(std::size_t out, std::size_t in) { return edges[out * inputs + in]; }
  const KanEdge& edge(std::size_t out, std::size_t in) const { return edges[out * inputs + in]; }
};

class Network;

// Intermediate values kept by a forward pass for the matching backward pass.
struct ForwardCache {
  const Network* owner = nullptr;
  std::uint64_t generation = 0;
  std::vector<Matrix> layer_inputs;     // input of every layer, head included
  std::vector<Matrix> pre_activations;  // mlp hidden layers only
  Matrix logits;
  Matrix probs;
};

struct ForwardResult {
  Matrix probs;  // n x output_units
  ForwardCache cache;
};

// Gradients laid out exactly like flatten_params(), plus the input gradient.
struct GradientBundle {
  std::vector<double> params;
  Matrix d_input;
};

class Network {
 public:
  explicit Network(NetworkSpec spec);  // zero-initialized parameters

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const NetworkSpec& spec() const noexcept { return spec_; }
  Arch arch() const noexcept { return spec_.arch; }
  std::size_t param_count() const noexcept { return kanbench::param_count(spec_); }
  std::uint64_t generation() const noexcept { return generation_; }

  const std::vector<DenseSiluLayer>& hidden_layers() const noexcept { return hidden_; }
  const LinearLayer& head_layer() const noexcept { return head_; }
  const std::vector<KanLayer>& kan_layers() const noexcept { return kan_; }
  // Mutable access invalidates outstanding forward caches.
  std::vector<DenseSiluLayer>& hidden_layers_mut() { touch(); return hidden_; }
  LinearLayer& head_layer_mut() { touch(); return head_; }
  std::vector<KanLayer>& kan_layers_mut() { touch(); return kan_; }

  ForwardResult forward(const Matrix& x_batch) const;
  GradientBundle backward(const ForwardCache& cache, const Matrix& d_probs) const;

  // Layer-major. mlp: per hidden layer W (row-major), b, beta; then head W, b.
  // kan: per layer, edges row-major, each as w_b, w_s, c_1..c_n.
  std::vector<double> flatten_params() const;
  void set_params(std::span<const double> params);

  friend bool operator==(const Network& a, const Network& b);

 private:
  void touch() noexcept;

  NetworkSpec spec_;
  std::vector<DenseSiluLayer> hidden_;
  LinearLayer head_;
  std::vector<KanLayer> kan_;
  std::uint64_t generation_ = 0;
};

ForwardResult mlp_forward(const Network& net, const Matrix& x_batch);
ForwardResult kan_forward(const Network& net, const Matrix& x_batch);
GradientBundle backward(const Network& net, const ForwardCache& cache, const Matrix& d_probs);

std::vector<double> flatten_params(const Network& net);
Network unflatten_params(const Network& net, std::span<const double> params);

// Glorot bound sqrt(6 / (fan_in + fan_out)).
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

// mlp: W ~ U(-glorot, glorot), b = 0, beta = 1.
// kan: w_b ~ U(-glorot, glorot) over the layer's fan, w_s = 1, c_i ~ N(0, 0.1^2).
Network init_network(const NetworkSpec& spec, RngStream& rng);

}  // namespace kanbench
