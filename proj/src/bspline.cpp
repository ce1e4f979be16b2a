#include "kanbench/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kanbench/error.hpp"

namespace kanbench {

namespace {

// Fills `bases` (length knots - 1 - degree) with the degree-`degree` basis
// values at x. `scratch` must hold knots - 1 entries.
void cox_de_boor(std::span<const double> knots, double x, int degree,
                 std::vector<double>& scratch) {
  const std::size_t cells = knots.size() - 1;
  scratch.assign(cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    if (x >= knots[i] && x < knots[i + 1]) {
      scratch[i] = 1.0;
      break;
    }
  }
  for (int d = 1; d <= degree; ++d) {
    const std::size_t count = cells - static_cast<std::size_t>(d);
    for (std::size_t i = 0; i < count; ++i) {
      const double left = (x - knots[i]) / (knots[i + d] - knots[i]);
      const double right =
          (knots[i + d + 1] - x) / (knots[i + d + 1] - knots[i + 1]);
      scratch[i] = left * scratch[i] + right * scratch[i + 1];
    }
  }
}

}  // namespace

SplineGrid::SplineGrid(double domain_min, double domain_max, int intervals, int order)
    : domain_min_(domain_min),
      domain_max_(domain_max),
      intervals_(intervals),
      order_(order) {
  if (intervals < 1) {
    throw ConfigError("SplineGrid: intervals must be >= 1, got " + std::to_string(intervals));
  }
  if (order < 1) {
    throw ConfigError("SplineGrid: order must be >= 1, got " + std::to_string(order));
  }
  if (!(domain_min < domain_max) || !std::isfinite(domain_min) || !std::isfinite(domain_max)) {
    throw ConfigError("SplineGrid: domain must satisfy min < max");
  }
  const double step = (domain_max - domain_min) / intervals;
  const int total = intervals + 2 * order + 1;
  knots_.resize(static_cast<std::size_t>(total));
  for (int j = 0; j < total; ++j) {
    const int offset = j - order;
    // Pin the interior end points exactly.
    if (offset == 0) {
      knots_[j] = domain_min;
    } else if (offset == intervals) {
      knots_[j] = domain_max;
    } else {
      knots_[j] = domain_min + offset * step;
    }
  }
}

double SplineGrid::clamp(double x) const noexcept {
  return std::clamp(x, domain_min_, domain_max_);
}

SplineGrid make_grid(double domain_min, double domain_max, int intervals, int order) {
  return SplineGrid(domain_min, domain_max, intervals, order);
}

std::vector<double> basis_eval(const SplineGrid& grid, double x) {
  std::vector<double> scratch;
  cox_de_boor(grid.knots(), grid.clamp(x), grid.order(), scratch);
  scratch.resize(grid.basis_count());
  return scratch;
}

void basis_eval_with_derivative(const SplineGrid& grid, double x,
                                std::span<double> values,
                                std::span<double> derivatives) {
  const std::size_t n = grid.basis_count();
  if (values.size() != n || derivatives.size() != n) {
    throw ShapeError("basis_eval_with_derivative: output spans must have length " +
                     std::to_string(n));
  }
  const auto knots = grid.knots();
  const int k = grid.order();
  const double xc = grid.clamp(x);

  // Degree k-1 bases (n + 1 of them) feed both the derivative formula and one
  // more recursion step for the degree-k values.
  std::vector<double> lower;
  cox_de_boor(knots, xc, k - 1, lower);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (xc - knots[i]) / (knots[i + k] - knots[i]);
    const double right = (knots[i + k + 1] - xc) / (knots[i + k + 1] - knots[i + 1]);
    values[i] = left * lower[i] + right * lower[i + 1];
  }
  if (!grid.contains(x)) {
    std::fill(derivatives.begin(), derivatives.end(), 0.0);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    derivatives[i] = k * (lower[i] / (knots[i + k] - knots[i]) -
                          lower[i + 1] / (knots[i + k + 1] - knots[i + 1]));
  }
}

std::vector<double> basis_eval_derivative(const SplineGrid& grid, double x) {
  std::vector<double> values(grid.basis_count());
  std::vector<double> derivatives(grid.basis_count());
  basis_eval_with_derivative(grid, x, values, derivatives);
  return derivatives;
}

double spline_eval(const SplineGrid& grid, std::span<const double> coeffs, double x) {
  if (coeffs.size() != grid.basis_count()) {
    throw ShapeError("spline_eval: expected " + std::to_string(grid.basis_count()) +
                     " coefficients, got " + std::to_string(coeffs.size()));
  }
  const auto bases = basis_eval(grid, x);
  double sum = 0.0;
  for (std::size_t i = 0; i < bases.size(); ++i) sum += coeffs[i] * bases[i];
  return sum;
}

}  // namespace kanbench
