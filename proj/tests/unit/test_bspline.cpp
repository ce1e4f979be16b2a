#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kanbench/bspline.hpp"
#include "kanbench/error.hpp"
#include "kanbench/rng.hpp"
#include "oracles.hpp"

using namespace kanbench;

TEST_CASE("make_grid knot vectors") {
  const SplineGrid g = make_grid(-1, 1, 3, 3);
  const std::vector<double> expected{-3, -7.0 / 3, -5.0 / 3, -1, -1.0 / 3,
                                     1.0 / 3, 1, 5.0 / 3, 7.0 / 3, 3};
  REQUIRE(g.knots().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(g.knots()[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  CHECK(g.basis_count() == 6);

  const SplineGrid h = make_grid(0, 2, 2, 1);
  CHECK(std::vector<double>(h.knots().begin(), h.knots().end()) ==
        std::vector<double>{-1, 0, 1, 2, 3});
  CHECK(h.basis_count() == 3);
  CHECK(make_grid(0, 1, 1, 1).basis_count() == 2);
}

TEST_CASE("make_grid rejects bad configuration") {
  CHECK_THROWS_AS(make_grid(0, 1, 0, 3), ConfigError);
  CHECK_THROWS_AS(make_grid(0, 1, 3, 0), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 1, 3, 3), ConfigError);
  CHECK_THROWS_AS(make_grid(2, -1, 3, 3), ConfigError);
}

TEST_CASE("basis_eval hand values, clamping") {
  const SplineGrid hats = make_grid(0, 2, 2, 1);
  const auto b = basis_eval(hats, 1.0);
  CHECK(b == std::vector<double>{0.0, 1.0, 0.0});

  const SplineGrid g = make_grid(-1, 1, 3, 3);
  CHECK(basis_eval(g, 5.0) == basis_eval(g, 1.0));
  CHECK(basis_eval(g, -7.0) == basis_eval(g, -1.0));
  const auto at_edge = basis_eval(g, 1.0);
  CHECK(std::accumulate(at_edge.begin(), at_edge.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("basis values match the recursive Cox-de Boor oracle") {
  RngStream rng = rng_derive(5, 0);
  for (int g = 1; g <= 5; ++g)
    for (int k = 1; k <= 5; ++k) {
      const SplineGrid grid = make_grid(-1, 1, g, k);
      const auto knots = oracle::uniform_knots(-1, 1, g, k);
      for (int s = 0; s < 20; ++s) {
        const double x = rng.uniform(-1.0, 1.0);
        const auto b = basis_eval(grid, x);
        for (int i = 0; i < g + k; ++i) {
          REQUIRE(std::abs(b[i] - oracle::cox_de_boor(knots, i, k, x)) < 1e-12);
        }
      }
    }
}

TEST_CASE("order-1 bases are hat functions") {
  for (int g = 1; g <= 5; ++g) {
    const SplineGrid grid = make_grid(-1, 1, g, 1);
    const auto knots = oracle::uniform_knots(-1, 1, g, 1);
    for (int s = 0; s <= 200; ++s) {
      const double x = -1.0 + 2.0 * s / 200.0;
      const auto b = basis_eval(grid, x);
      for (int i = 0; i < g + 1; ++i) REQUIRE(std::abs(b[i] - oracle::hat(knots, i, x)) < 1e-12);
    }
  }
}

TEST_CASE("basis_eval_derivative: sums to zero, finite differences, zero outside") {
  const SplineGrid grid = make_grid(-1, 1, 3, 3);
  const auto d = basis_eval_derivative(grid, 0.3);
  CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0)) < 1e-12);
  const double h = 1e-6;
  const auto up = basis_eval(grid, 0.3 + h);
  const auto down = basis_eval(grid, 0.3 - h);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double fd = (up[i] - down[i]) / (2 * h);
    CHECK(oracle::rel_err(d[i], fd) < 1e-5);
  }
  const auto outside = basis_eval_derivative(grid, 1.5);
  CHECK(outside == std::vector<double>(6, 0.0));
  CHECK(basis_eval_derivative(grid, -3.0) == std::vector<double>(6, 0.0));
}

TEST_CASE("spline_eval") {
  const SplineGrid grid = make_grid(-1, 1, 3, 3);
  CHECK(spline_eval(grid, std::vector<double>(6, 2.5), 0.2) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(spline_eval(grid, std::vector<double>(6, 0.0), 0.2) == 0.0);
  CHECK_THROWS_AS(spline_eval(grid, std::vector<double>(5, 1.0), 0.2), ShapeError);

  const std::vector<double> coeffs{0, 1, 2, 3, 4, 5};
  const auto knots = oracle::uniform_knots(-1, 1, 3, 3);
  for (double x : {-0.95, -0.4, 0.0, 0.33, 0.8}) {
    double expected = 0.0;
    for (int i = 0; i < 6; ++i) expected += coeffs[i] * oracle::cox_de_boor(knots, i, 3, x);
    CHECK(std::abs(spline_eval(grid, coeffs, x) - expected) < 1e-12);
  }
}
