#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kanbench {

// Uniform B-spline knot grid.
//
// `intervals` (G) equal cells span [domain_min, domain_max]; `order` (k)
// extension knots continue the spacing past each end, giving G + 2k + 1 knots
// and G + k basis functions of polynomial degree k.
class SplineGrid {
 public:
  SplineGrid(double domain_min, double domain_max, int intervals, int order);

  double domain_min() const noexcept { return domain_min_; }
  double domain_max() const noexcept { return domain_max_; }
  int intervals() const noexcept { return intervals_; }
  int order() const noexcept { return order_; }
  std::size_t basis_count() const noexcept {
    return static_cast<std::size_t>(intervals_ + order_);
  }
  std::span<const double> knots() const noexcept { return knots_; }

  double clamp(double x) const noexcept;
  bool contains(double x) const noexcept {
    return x >= domain_min_ && x <= domain_max_;
  }

  friend bool operator==(const SplineGrid&, const SplineGrid&) = default;

 private:
  double domain_min_;
  double domain_max_;
  int intervals_;
  int order_;
  std::vector<double> knots_;
};

SplineGrid make_grid(double domain_min, double domain_max, int intervals, int order);

// Cox-de Boor values of every basis function at x, clamped into the domain.
std::vector<double> basis_eval(const SplineGrid& grid, double x);

// d/dx of every basis function; all zeros when x lies outside the domain.
std::vector<double> basis_eval_derivative(const SplineGrid& grid, double x);

// Both of the above from one recursion pass.
void basis_eval_with_derivative(const SplineGrid& grid, double x,
                                std::span<double> values,
                                std::span<double> derivatives);

// sum_i coeffs[i] * B_i(x).
double spline_eval(const SplineGrid& grid, std::span<const double> coeffs, double x);

}  // namespace kanbench
