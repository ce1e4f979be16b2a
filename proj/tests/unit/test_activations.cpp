#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kanbench/activations.hpp"
#include "kanbench/error.hpp"
#include "kanbench/rng.hpp"
#include "oracles.hpp"

using namespace kanbench;

namespace {

KanEdge random_edge(RngStream& rng, std::size_t n) {
  KanEdge e;
  e.w_b = rng.uniform(-2, 2);
  e.w_s = rng.uniform(-2, 2);
  for (std::size_t i = 0; i < n; ++i) e.coeffs.push_back(rng.uniform(-1, 1));
  return e;
}

}  // namespace

TEST_CASE("silu values") {
  CHECK(silu(0.0, 3.7) == 0.0);
  CHECK(silu(1.3, 0.0) == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(silu(1.0, 1.0) == doctest::Approx(0.7310585786).epsilon(1e-9));
  // Saturated arguments stay finite.
  CHECK(silu(-800.0, 1.0) == doctest::Approx(0.0));
  CHECK(silu(800.0, 1.0) == doctest::Approx(800.0));
}

TEST_CASE("silu_grad matches closed form and finite differences") {
  const SiluGrad at0 = silu_grad(0.0, 1.0);
  CHECK(at0.d_z == 0.5);
  CHECK(at0.d_beta == 0.0);
  for (auto [z, beta] : {std::pair{1.0, 1.0}, std::pair{-3.0, 2.0}}) {
    const SiluGrad g = silu_grad(z, beta);
    const double h = 1e-5;
    const double fd_z = oracle::central_diff([&](double v) { return oracle::silu(v, beta); }, z, h);
    const double fd_b = oracle::central_diff([&](double v) { return oracle::silu(z, v); }, beta, h);
    CHECK(std::abs(g.d_z - fd_z) < 1e-6);
    CHECK(std::abs(g.d_beta - fd_b) < 1e-6);
  }
}

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  double prev = 0.0;
  for (double z = 0.0; z < 50.0; z += 0.5) {
    REQUIRE(sigmoid(z) >= prev);
    prev = sigmoid(z);
  }
  CHECK(sigmoid(40.0) == doctest::Approx(1.0));
  for (double z : {-30.0, -2.5, -0.1, 0.7, 9.0}) CHECK(sigmoid(z) + sigmoid(-z) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isfinite(sigmoid(-1000.0)));
}

TEST_CASE("softmax") {
  const std::vector<double> zeros{0, 0, 0};
  for (double p : softmax(zeros)) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));
  const std::vector<double> z{1, 2, 3};
  const auto p = softmax(z);
  CHECK(p[0] == doctest::Approx(0.09003057).epsilon(1e-7));
  CHECK(p[1] == doctest::Approx(0.24472847).epsilon(1e-7));
  CHECK(p[2] == doctest::Approx(0.66524096).epsilon(1e-7));
  const std::vector<double> shifted{1001, 1002, 1003};
  const auto q = softmax(shifted);
  for (int i = 0; i < 3; ++i) CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-12));
  CHECK_THROWS_AS(softmax(std::vector<double>{}), ShapeError);

  RngStream rng = rng_derive(8, 0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(2 + rng.uniform_index(5));
    for (double& x : v) x = rng.uniform(-30, 30);
    const auto s = softmax(v);
    REQUIRE(std::abs(std::accumulate(s.begin(), s.end(), 0.0) - 1.0) < 1e-12);
    for (double x : s) REQUIRE((x >= 0.0 && x <= 1.0));
  }
}

TEST_CASE("kan_edge_eval special cases and term-by-term oracle") {
  const SplineGrid grid = make_grid(-1, 1, 3, 3);
  KanEdge e{1.7, 0.0, std::vector<double>(6, 0.4)};
  CHECK(kan_edge_eval(e, grid, 0.6) == 1.7 * silu(0.6, 1.0));

  KanEdge flat{0.0, -2.0, std::vector<double>(6, 0.75)};
  CHECK(kan_edge_eval(flat, grid, 0.1) == doctest::Approx(-1.5).epsilon(1e-12));

  CHECK_THROWS_AS(kan_edge_eval(KanEdge{1, 1, {1, 2}}, grid, 0.0), ShapeError);

  RngStream rng = rng_derive(9, 0);
  const auto knots = oracle::uniform_knots(-1, 1, 3, 3);
  for (int t = 0; t < 100; ++t) {
    const KanEdge r = random_edge(rng, 6);
    const double x = rng.uniform(-0.999, 0.999);
    double spline = 0.0;
    for (int i = 0; i < 6; ++i) spline += r.coeffs[i] * oracle::cox_de_boor(knots, i, 3, x);
    const double expected = r.w_b * oracle::silu(x, 1.0) + r.w_s * spline;
    REQUIRE(std::abs(kan_edge_eval(r, grid, x) - expected) < 1e-12);
  }
}

TEST_CASE("kan_edge_feature_form") {
  const SplineGrid grid = make_grid(-1, 1, 3, 3);
  const auto zero = kan_edge_feature_form(KanEdge{0, 0, std::vector<double>(6, 0.0)}, grid, 0.4);
  CHECK(zero.weights == std::vector<double>(7, 0.0));
  CHECK(std::any_of(zero.features.begin(), zero.features.end(), [](double v) { return v != 0; }));

  const auto unit = kan_edge_feature_form(KanEdge{0.3, 1.0, std::vector<double>(6, 1.0)}, grid, 0.4);
  CHECK(unit.weights == std::vector<double>{0.3, 1, 1, 1, 1, 1, 1});

  RngStream rng = rng_derive(10, 0);
  for (int t = 0; t < 100; ++t) {
    const KanEdge e = random_edge(rng, 6);
    const double x = rng.uniform(-3, 3);
    const auto form = kan_edge_feature_form(e, grid, x);
    const double dot =
        std::inner_product(form.weights.begin(), form.weights.end(), form.features.begin(), 0.0);
    REQUIRE(std::abs(dot - kan_edge_eval(e, grid, x)) < 1e-12);
  }
}

TEST_CASE("kan edge gradients match finite differences over random configurations") {
  RngStream rng = rng_derive(13, 0);
  const double h = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int g = 1 + static_cast<int>(rng.uniform_index(5));
    const int k = 1 + static_cast<int>(rng.uniform_index(5));
    const SplineGrid grid = make_grid(-1, 1, g, k);
    KanEdge e = random_edge(rng, grid.basis_count());
    const double x = rng.uniform(-0.95, 0.95);
    const KanEdgeGrad grad = kan_edge_grad(e, grid, x);

    auto eval_with = [&](double& slot, double v) {
      const double saved = slot;
      slot = v;
      const double out = kan_edge_eval(e, grid, x);
      slot = saved;
      return out;
    };
    auto fd_param = [&](double& slot) {
      const double base = slot;
      return (eval_with(slot, base + h) - eval_with(slot, base - h)) / (2 * h);
    };
    worst = std::max(worst, oracle::rel_err(grad.d_w_b, fd_param(e.w_b)));
    worst = std::max(worst, oracle::rel_err(grad.d_w_s, fd_param(e.w_s)));
    for (std::size_t i = 0; i < e.coeffs.size(); ++i) {
      worst = std::max(worst, oracle::rel_err(grad.d_coeffs[i], fd_param(e.coeffs[i])));
    }
    const double fd_x =
        oracle::central_diff([&](double v) { return kan_edge_eval(e, grid, v); }, x, h);
    worst = std::max(worst, oracle::rel_err(grad.d_x, fd_x));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("spline term has zero input gradient outside the domain") {
  const SplineGrid grid = make_grid(-1, 1, 3, 3);
  const KanEdge e{0.0, 1.0, {0.1, -0.3, 0.7, 0.2, -0.5, 0.9}};
  CHECK(kan_edge_grad(e, grid, 2.5).d_x == 0.0);
  CHECK(kan_edge_grad(e, grid, -4.0).d_x == 0.0);
}
