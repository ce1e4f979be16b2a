#include "kanbench/activations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kanbench/error.hpp"

namespace kanbench {

namespace {

void check_edge(const KanEdge& edge, const SplineGrid& grid, const char* who) {
  if (edge.coeffs.size() != grid.basis_count()) {
    throw ShapeError(std::string(who) + ": edge has " + std::to_string(edge.coeffs.size()) +
                     " coefficients, grid expects " + std::to_string(grid.basis_count()));
  }
}

}  // namespace

double sigmoid(double z) noexcept {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double silu(double z, double beta) noexcept { return z * sigmoid(beta * z); }

SiluGrad silu_grad(double z, double beta) noexcept {
  const double s = sigmoid(beta * z);
  const double slope = s * (1.0 - s);
  return {s + beta * z * slope, z * z * slope};
}

std::vector<double> softmax(std::span<const double> z) {
  if (z.empty()) {
    throw ShapeError("softmax: empty input");
  }
  const double shift = *std::max_element(z.begin(), z.end());
  std::vector<double> out(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - shift);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return out;
}

double kan_edge_eval(const KanEdge& edge, const SplineGrid& grid, double x) {
  check_edge(edge, grid, "kan_edge_eval");
  return edge.w_b * silu(x, 1.0) + edge.w_s * spline_eval(grid, edge.coeffs, x);
}

KanEdgeGrad kan_edge_grad(const KanEdge& edge, const SplineGrid& grid, double x) {
  check_edge(edge, grid, "kan_edge_grad");
  const std::size_t n = grid.basis_count();
  std::vector<double> bases(n);
  std::vector<double> slopes(n);
  basis_eval_with_derivative(grid, x, bases, slopes);

  KanEdgeGrad g;
  g.d_w_b = silu(x, 1.0);
  double spline = 0.0;
  double spline_slope = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    spline += edge.coeffs[i] * bases[i];
    spline_slope += edge.coeffs[i] * slopes[i];
  }
  g.d_w_s = spline;
  g.d_coeffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.d_coeffs[i] = edge.w_s * bases[i];
  g.d_x = edge.w_b * silu_grad(x, 1.0).d_z + edge.w_s * spline_slope;
  return g;
}

KanFeatureForm kan_edge_feature_form(const KanEdge& edge, const SplineGrid& grid, double x) {
  check_edge(edge, grid, "kan_edge_feature_form");
  KanFeatureForm form;
  form.weights.reserve(grid.basis_count() + 1);
  form.weights.push_back(edge.w_b);
  for (double c : edge.coeffs) form.weights.push_back(edge.w_s * c);
  form.features.reserve(grid.basis_count() + 1);
  form.features.push_back(silu(x, 1.0));
  const auto bases = basis_eval(grid, x);
  form.features.insert(form.features.end(), bases.begin(), bases.end());
  return form;
}

}  // namespace kanbench
