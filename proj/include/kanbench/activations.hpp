#pragma once

#include <span>
#include <vector>

#include "kanbench/bspline.hpp"

namespace kanbench {

struct SiluGrad {
  double d_z;
  double d_beta;
};

double sigmoid(double z) noexcept;

// z * sigmoid(beta * z)
double silu(double z, double beta) noexcept;
SiluGrad silu_grad(double z, double beta) noexcept;

// Max-shifted softmax. Throws ShapeError on empty input.
std::vector<double> softmax(std::span<const double> z);

// Learnable edge activation g(x) = w_b * SiLU(x) + w_s * sum_i c_i B_i(x).
// The SiLU term uses a fixed beta of 1 and sees the raw input; the spline
// term sees the input clamped to the grid domain.
struct KanEdge {
  double w_b = 0.0;
  double w_s = 0.0;
  std::vector<double> coeffs;

  friend bool operator==(const KanEdge&, const KanEdge&) = default;
};

struct KanEdgeGrad {
  double d_w_b = 0.0;
  double d_w_s = 0.0;
  std::vector<double> d_coeffs;
  double d_x = 0.0;
};

// Same function written as a weight row times a feature column:
// weights = (w_b, w_s c_1, ..., w_s c_n), features = (SiLU(x), B_1(x), ..., B_n(x)).
struct KanFeatureForm {
  std::vector<double> weights;
  std::vector<double> features;
};

double kan_edge_eval(const KanEdge& edge, const SplineGrid& grid, double x);
KanEdgeGrad kan_edge_grad(const KanEdge& edge, const SplineGrid& grid, double x);
KanFeatureForm kan_edge_feature_form(const KanEdge& edge, const SplineGrid& grid, double x);

}  // namespace kanbench
