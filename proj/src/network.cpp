#include "kanbench/network.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "kanbench/error.hpp"

namespace kanbench {

namespace {

std::atomic<std::uint64_t> g_generation{1};

std::uint64_t next_generation() noexcept {
  return g_generation.fetch_add(1, std::memory_order_relaxed);
}

std::vector<std::size_t> layer_dims(const NetworkSpec& spec) {
  std::vector<std::size_t> dims;
  dims.push_back(spec.input_dim);
  dims.insert(dims.end(), spec.hidden_widths.begin(), spec.hidden_widths.end());
  dims.push_back(spec.output_units());
  return dims;
}

void check_input(const NetworkSpec& spec, const Matrix& x, const char* who) {
  if (x.cols() != spec.input_dim) {
    throw ShapeError(std::string(who) + ": batch " + x.shape_string() + " has " +
                     std::to_string(x.cols()) + " features, network expects " +
                     std::to_string(spec.input_dim));
  }
}

// Affine map out = in * W^T + b, batched over rows.
Matrix affine(const Matrix& in, const Matrix& weights, const std::vector<double>& bias) {
  Matrix out(in.rows(), weights.rows());
  for (std::size_t s = 0; s < in.rows(); ++s) {
    auto x = in.row(s);
    for (std::size_t j = 0; j < weights.rows(); ++j) {
      auto w = weights.row(j);
      double acc = bias[j];
      for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
      out(s, j) = acc;
    }
  }
  return out;
}

Matrix kan_layer_forward(const KanLayer& layer, const Matrix& in) {
  Matrix out(in.rows(), layer.outputs);
  const std::size_t n_basis = layer.grid.basis_count();
  for (std::size_t s = 0; s < in.rows(); ++s) {
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      const double x = in(s, i);
      const double base = silu(x, 1.0);
      const auto bases = basis_eval(layer.grid, x);
      for (std::size_t j = 0; j < layer.outputs; ++j) {
        const KanEdge& e = layer.edge(j, i);
        double spline = 0.0;
        for (std::size_t b = 0; b < n_basis; ++b) spline += e.coeffs[b] * bases[b];
        out(s, j) += e.w_b * base + e.w_s * spline;
      }
    }
  }
  return out;
}

void apply_head(HeadKind head, const Matrix& logits, Matrix& probs) {
  probs = Matrix(logits.rows(), logits.cols());
  for (std::size_t s = 0; s < logits.rows(); ++s) {
    if (head == HeadKind::sigmoid_binary) {
      probs(s, 0) = sigmoid(logits(s, 0));
    } else {
      const auto p = softmax(logits.row(s));
      std::copy(p.begin(), p.end(), probs.row(s).begin());
    }
  }
}

Matrix head_backward(HeadKind head, const Matrix& probs, const Matrix& d_probs) {
  Matrix d_logits(probs.rows(), probs.cols());
  for (std::size_t s = 0; s < probs.rows(); ++s) {
    if (head == HeadKind::sigmoid_binary) {
      const double p = probs(s, 0);
      d_logits(s, 0) = d_probs(s, 0) * p * (1.0 - p);
    } else {
      double dot = 0.0;
      for (std::size_t c = 0; c < probs.cols(); ++c) dot += d_probs(s, c) * probs(s, c);
      for (std::size_t c = 0; c < probs.cols(); ++c) {
        d_logits(s, c) = probs(s, c) * (d_probs(s, c) - dot);
      }
    }
  }
  return d_logits;
}

// Accumulates dW, db for an affine layer into `grad` at `offset` (W row-major
// then b) and returns the gradient with respect to the layer input.
Matrix affine_backward(const Matrix& in, const Matrix& weights, const Matrix& d_out,
                       std::vector<double>& grad, std::size_t offset) {
  const std::size_t n_out = weights.rows();
  const std::size_t n_in = weights.cols();
  Matrix d_in(in.rows(), n_in);
  for (std::size_t s = 0; s < in.rows(); ++s) {
    for (std::size_t j = 0; j < n_out; ++j) {
      const double g = d_out(s, j);
      if (g == 0.0) continue;
      for (std::size_t i = 0; i < n_in; ++i) {
        grad[offset + j * n_in + i] += g * in(s, i);
        d_in(s, i) += g * weights(j, i);
      }
      grad[offset + n_out * n_in + j] += g;
    }
  }
  return d_in;
}

Matrix kan_layer_backward(const KanLayer& layer, const Matrix& in, const Matrix& d_out,
                          std::vector<double>& grad, std::size_t offset) {
  const std::size_t n_basis = layer.grid.basis_count();
  const std::size_t stride = n_basis + 2;
  std::vector<double> bases(n_basis);
  std::vector<double> slopes(n_basis);
  Matrix d_in(in.rows(), layer.inputs);
  for (std::size_t s = 0; s < in.rows(); ++s) {
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      const double x = in(s, i);
      const double base = silu(x, 1.0);
      const double base_slope = silu_grad(x, 1.0).d_z;
      basis_eval_with_derivative(layer.grid, x, bases, slopes);
      for (std::size_t j = 0; j < layer.outputs; ++j) {
        const double g = d_out(s, j);
        if (g == 0.0) continue;
        const KanEdge& e = layer.edge(j, i);
        double spline = 0.0;
        double spline_slope = 0.0;
        for (std::size_t b = 0; b < n_basis; ++b) {
          spline += e.coeffs[b] * bases[b];
          spline_slope += e.coeffs[b] * slopes[b];
        }
        double* slot = grad.data() + offset + (j * layer.inputs + i) * stride;
        slot[0] += g * base;
        slot[1] += g * spline;
        for (std::size_t b = 0; b < n_basis; ++b) slot[2 + b] += g * e.w_s * bases[b];
        d_in(s, i) += g * (e.w_b * base_slope + e.w_s * spline_slope);
      }
    }
  }
  return d_in;
}

}  // namespace

std::string_view to_string(Arch arch) { return arch == Arch::mlp ? "mlp" : "kan"; }

std::string_view to_string(HeadKind head) {
  return head == HeadKind::sigmoid_binary ? "sigmoid" : "softmax";
}

Arch parse_arch(std::string_view text) {
  if (text == "mlp") return Arch::mlp;
  if (text == "kan") return Arch::kan;
  throw ConfigError("unknown architecture '" + std::string(text) + "' (expected mlp or kan)");
}

HeadKind parse_head(std::string_view text) {
  if (text == "sigmoid") return HeadKind::sigmoid_binary;
  if (text == "softmax") return HeadKind::softmax_multiclass;
  throw ConfigError("unknown head '" + std::string(text) + "' (expected sigmoid or softmax)");
}

NetworkSpec NetworkSpec::classifier(Arch arch, std::size_t input_dim, std::size_t depth,
                                    std::size_t width, std::size_t classes, GridConfig grid,
                                    bool binary_softmax) {
  NetworkSpec spec;
  spec.arch = arch;
  spec.input_dim = input_dim;
  spec.hidden_widths.assign(depth, width);
  spec.classes = classes;
  spec.head = (classes == 2 && !binary_softmax) ? HeadKind::sigmoid_binary
                                                 : HeadKind::softmax_multiclass;
  spec.grid = grid;
  spec.validate();
  return spec;
}

void NetworkSpec::validate() const {
  if (input_dim == 0) throw ConfigError("network: input_dim must be positive");
  if (hidden_widths.empty()) throw ConfigError("network: depth must be at least 1");
  for (std::size_t w : hidden_widths) {
    if (w == 0) throw ConfigError("network: hidden widths must be positive");
  }
  if (classes < 2) throw ConfigError("network: need at least 2 classes");
  if (head == HeadKind::sigmoid_binary && classes != 2) {
    throw ConfigError("network: sigmoid head requires exactly 2 classes, got " +
                      std::to_string(classes));
  }
  if (arch == Arch::kan) {
    (void)grid.make();  // throws ConfigError on a bad grid
  }
}

std::size_t param_count(const NetworkSpec& spec) {
  const auto dims = layer_dims(spec);
  std::size_t total = 0;
  if (spec.arch == Arch::mlp) {
    for (std::size_t l = 1; l + 1 < dims.size(); ++l) {
      total += dims[l - 1] * dims[l] + 2 * dims[l];
    }
    total += dims[dims.size() - 2] * dims.back() + dims.back();
  } else {
    const auto per_edge =
        static_cast<std::size_t>(spec.grid.intervals + spec.grid.order + 2);
    for (std::size_t l = 1; l < dims.size(); ++l) total += dims[l - 1] * dims[l] * per_edge;
  }
  return total;
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)), generation_(next_generation()) {
  spec_.validate();
  const auto dims = layer_dims(spec_);
  if (spec_.arch == Arch::mlp) {
    for (std::size_t l = 1; l + 1 < dims.size(); ++l) {
      hidden_.push_back({Matrix(dims[l], dims[l - 1]), std::vector<double>(dims[l], 0.0),
                         std::vector<double>(dims[l], 0.0)});
    }
    head_ = {Matrix(dims.back(), dims[dims.size() - 2]),
             std::vector<double>(dims.back(), 0.0)};
  } else {
    const SplineGrid grid = spec_.grid.make();
    for (std::size_t l = 1; l < dims.size(); ++l) {
      KanLayer layer{grid, dims[l - 1], dims[l], {}};
      layer.edges.assign(dims[l - 1] * dims[l],
                         KanEdge{0.0, 0.0, std::vector<double>(grid.basis_count(), 0.0)});
      kan_.push_back(std::move(layer));
    }
  }
}

Network::Network(const Network& other)
    : spec_(other.spec_),
      hidden_(other.hidden_),
      head_(other.head_),
      kan_(other.kan_),
      generation_(next_generation()) {}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    spec_ = other.spec_;
    hidden_ = other.hidden_;
    head_ = other.head_;
    kan_ = other.kan_;
    touch();
  }
  return *this;
}

void Network::touch() noexcept { generation_ = next_generation(); }

bool operator==(const Network& a, const Network& b) {
  return a.spec_ == b.spec_ && a.flatten_params() == b.flatten_params();
}

ForwardResult Network::forward(const Matrix& x_batch) const {
  return spec_.arch == Arch::mlp ? mlp_forward(*this, x_batch) : kan_forward(*this, x_batch);
}

ForwardResult mlp_forward(const Network& net, const Matrix& x_batch) {
  if (net.arch() != Arch::mlp) throw UsageError("mlp_forward: network is not an mlp");
  check_input(net.spec(), x_batch, "mlp_forward");
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.owner = &net;
  cache.generation = net.generation();

  Matrix activ = x_batch;
  for (const auto& layer : net.hidden_layers()) {
    cache.layer_inputs.push_back(activ);
    Matrix z = affine(activ, layer.weights, layer.bias);
    Matrix a(z.rows(), z.cols());
    for (std::size_t s = 0; s < z.rows(); ++s)
      for (std::size_t j = 0; j < z.cols(); ++j) a(s, j) = silu(z(s, j), layer.beta[j]);
    cache.pre_activations.push_back(std::move(z));
    activ = std::move(a);
  }
  cache.layer_inputs.push_back(activ);
  cache.logits = affine(activ, net.head_layer().weights, net.head_layer().bias);
  apply_head(net.spec().head, cache.logits, cache.probs);
  result.probs = cache.probs;
  return result;
}

ForwardResult kan_forward(const Network& net, const Matrix& x_batch) {
  if (net.arch() != Arch::kan) throw UsageError("kan_forward: network is not a kan");
  check_input(net.spec(), x_batch, "kan_forward");
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.owner = &net;
  cache.generation = net.generation();

  Matrix activ = x_batch;
  for (const auto& layer : net.kan_layers()) {
    cache.layer_inputs.push_back(activ);
    activ = kan_layer_forward(layer, activ);
  }
  cache.logits = std::move(activ);
  apply_head(net.spec().head, cache.logits, cache.probs);
  result.probs = cache.probs;
  return result;
}

GradientBundle Network::backward(const ForwardCache& cache, const Matrix& d_probs) const {
  if (cache.owner != this || cache.generation != generation_) {
    throw UsageError("backward: cache was produced by a different or since-modified network");
  }
  if (d_probs.rows() != cache.probs.rows() || d_probs.cols() != cache.probs.cols()) {
    throw ShapeError("backward: upstream gradient " + d_probs.shape_string() +
                     " does not match output " + cache.probs.shape_string());
  }
  GradientBundle out;
  out.params.assign(param_count(), 0.0);
  Matrix d_act = head_backward(spec_.head, cache.probs, d_probs);

  if (spec_.arch == Arch::mlp) {
    // Offsets of each layer's block in the flat layout.
    std::vector<std::size_t> offsets;
    std::size_t offset = 0;
    for (const auto& layer : hidden_) {
      offsets.push_back(offset);
      offset += layer.weights.size() + 2 * layer.bias.size();
    }
    d_act = affine_backward(cache.layer_inputs.back(), head_.weights, d_act, out.params, offset);
    for (std::size_t l = hidden_.size(); l-- > 0;) {
      const auto& layer = hidden_[l];
      const Matrix& z = cache.pre_activations[l];
      const std::size_t beta_offset = offsets[l] + layer.weights.size() + layer.bias.size();
      Matrix d_z(z.rows(), z.cols());
      for (std::size_t s = 0; s < z.rows(); ++s) {
        for (std::size_t j = 0; j < z.cols(); ++j) {
          const SiluGrad g = silu_grad(z(s, j), layer.beta[j]);
          d_z(s, j) = d_act(s, j) * g.d_z;
          out.params[beta_offset + j] += d_act(s, j) * g.d_beta;
        }
      }
      d_act = affine_backward(cache.layer_inputs[l], layer.weights, d_z, out.params, offsets[l]);
    }
  } else {
    std::vector<std::size_t> offsets;
    std::size_t offset = 0;
    for (const auto& layer : kan_) {
      offsets.push_back(offset);
      offset += layer.edges.size() * (layer.grid.basis_count() + 2);
    }
    for (std::size_t l = kan_.size(); l-- > 0;) {
      d_act = kan_layer_backward(kan_[l], cache.layer_inputs[l], d_act, out.params, offsets[l]);
    }
  }
  out.d_input = std::move(d_act);
  return out;
}

GradientBundle backward(const Network& net, const ForwardCache& cache, const Matrix& d_probs) {
  return net.backward(cache, d_probs);
}

std::vector<double> Network::flatten_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  if (spec_.arch == Arch::mlp) {
    for (const auto& layer : hidden_) {
      flat.insert(flat.end(), layer.weights.data().begin(), layer.weights.data().end());
      flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
      flat.insert(flat.end(), layer.beta.begin(), layer.beta.end());
    }
    flat.insert(flat.end(), head_.weights.data().begin(), head_.weights.data().end());
    flat.insert(flat.end(), head_.bias.begin(), head_.bias.end());
  } else {
    for (const auto& layer : kan_) {
      for (const auto& e : layer.edges) {
        flat.push_back(e.w_b);
        flat.push_back(e.w_s);
        flat.insert(flat.end(), e.coeffs.begin(), e.coeffs.end());
      }
    }
  }
  return flat;
}

void Network::set_params(std::span<const double> params) {
  if (params.size() != param_count()) {
    throw ShapeError("set_params: expected " + std::to_string(param_count()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  auto it = params.begin();
  auto take = [&it](std::span<double> dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  if (spec_.arch == Arch::mlp) {
    for (auto& layer : hidden_) {
      take(layer.weights.data());
      take(layer.bias);
      take(layer.beta);
    }
    take(head_.weights.data());
    take(head_.bias);
  } else {
    for (auto& layer : kan_) {
      for (auto& e : layer.edges) {
        e.w_b = *it++;
        e.w_s = *it++;
        take(e.coeffs);
      }
    }
  }
  touch();
}

std::vector<double> flatten_params(const Network& net) { return net.flatten_params(); }

Network unflatten_params(const Network& net, std::span<const double> params) {
  Network copy = net;
  copy.set_params(params);
  return copy;
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Network init_network(const NetworkSpec& spec, RngStream& rng) {
  Network net(spec);
  if (spec.arch == Arch::mlp) {
    auto fill_glorot = [&rng](Matrix& w) {
      const double bound = glorot_bound(w.cols(), w.rows());
      for (double& v : w.data()) v = rng.uniform(-bound, bound);
    };
    for (auto& layer : net.hidden_layers_mut()) {
      fill_glorot(layer.weights);
      std::fill(layer.beta.begin(), layer.beta.end(), 1.0);
    }
    fill_glorot(net.head_layer_mut().weights);
  } else {
    for (auto& layer : net.kan_layers_mut()) {
      const double bound = glorot_bound(layer.inputs, layer.outputs);
      for (auto& e : layer.edges) {
        e.w_b = rng.uniform(-bound, bound);
        e.w_s = 1.0;
        for (double& c : e.coeffs) c = 0.1 * rng.normal();
      }
    }
  }
  return net;
}

}  // namespace kanbench
