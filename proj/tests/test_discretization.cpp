#include "revshell/discretization.hpp"
#include "revshell/errors.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace revshell;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

// \int_{-1}^{1} ln(1/|t - t0|) w(t) t^k dt with t = cos(theta), each side of
// the singularity stretched by a quartic map so Gauss-Legendre sees a smooth
// integrand.
double log_moment(double t0, int k, double beta_left, double beta_right) {
  const GaussRule g = gauss_legendre(400);
  const double theta0 = std::acos(t0);
  // theta = theta0 + d; t - t0 from the product form keeps the log finite
  auto f = [&](double d) {
    const double theta = theta0 + d;
    const double t = std::cos(theta);
    // w(t) sin(theta) in half angles stays finite at theta = 0, pi
    const double w_sin = std::pow(2.0, beta_left + beta_right + 1.0) *
                         std::pow(std::abs(std::cos(theta / 2)), 2.0 * beta_left + 1.0) *
                         std::pow(std::abs(std::sin(theta / 2)), 2.0 * beta_right + 1.0);
    const double gap = 2.0 * std::abs(std::sin(theta0 + d / 2) * std::sin(d / 2));
    return -std::log(gap) * w_sin * std::pow(t, k);
  };
  double s = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double len = side == 0 ? theta0 : pi - theta0;
    for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
      // x in (0, 1); quartic crowding at both ends
      const double x = 0.5 * (g.nodes[i] + 1.0);
      const double y = x * x * x * x;
      const double dy = 4.0 * x * x * x * 0.5;
      // reversed quartic toward the far end keeps endpoint weights integrable
      const double u = std::pow(std::sin(0.5 * pi * y), 2);
      const double du = 0.5 * pi * std::sin(pi * y) * dy;
      s += g.weights[i] * len * du * f(side == 0 ? -len * u : len * u);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("Chebyshev grid and interpolatory weights") {
  const ChebGrid grid = cheb_nodes(16);
  REQUIRE(grid.size() == 15);
  for (Eigen::Index i = 1; i < grid.size(); ++i) CHECK(grid.nodes[i] < grid.nodes[i - 1]);
  CHECK(grid.nodes[7] == Approx(0.0).epsilon(1e-16));
  for (int k = 0; k <= 14; ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) s += grid.weights[i] * std::pow(grid.nodes[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK(s == Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("Gauss-Legendre exactness") {
  const GaussRule g = gauss_legendre(10);
  for (int k = 0; k < 20; ++k) {
    const double s = g.weights.dot(g.nodes.unaryExpr([k](double x) { return std::pow(x, k); }));
    CHECK(s == Approx(k % 2 ? 0.0 : 2.0 / (k + 1)).epsilon(1e-14));
  }
}

TEST_CASE("Lagrange basis") {
  const ChebGrid grid = cheb_nodes(12);
  const Eigen::VectorXd at_node = lagrange_basis(grid, grid.nodes[3]);
  CHECK(at_node[3] == 1.0);
  CHECK(at_node.sum() == Approx(1.0));
  const double t = 0.123;
  const Eigen::VectorXd l = lagrange_basis(grid, t);
  CHECK(l.sum() == Approx(1.0).epsilon(1e-14));
  const Eigen::VectorXd cubic = grid.nodes.unaryExpr([](double x) { return x * x * x - 2 * x; });
  CHECK(l.dot(cubic) == Approx(t * t * t - 2 * t).epsilon(1e-13));
}

TEST_CASE("log quadrature rows reproduce weighted log moments") {
  const ChebGrid grid = cheb_nodes(12);
  for (const EndpointExponents w : {EndpointExponents::canonical(), EndpointExponents{0.5, -1.0 / 3.0}}) {
    for (Eigen::Index node : {0, 4, 10}) {
      const Eigen::VectorXd row = log_quadrature_row(grid, node, w);
      for (int k : {0, 1, 5, 10}) {
        const double got = row.dot(grid.nodes.unaryExpr([k](double x) { return std::pow(x, k); }));
        const double ref = log_moment(grid.nodes[node], k, w.beta_left, w.beta_right);
        CHECK(got == Approx(ref).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("corner exponents") {
  CHECK(corner_exponent(pi / 2) == 0.0);
  CHECK(corner_exponent(pi) == 0.0);
  CHECK(corner_exponent(1.5 * pi) == Approx(-1.0 / 3.0));
  CHECK(corner_exponent(1.25 * pi) == Approx(-0.2));
  CHECK_THROWS_AS(corner_exponent(2.0 * pi), DomainError);
}

TEST_CASE("endpoint grading maps") {
  for (const auto& g : {EndpointGrading(3, 1), EndpointGrading(1, 3), EndpointGrading(3, 3), EndpointGrading(1, 1)}) {
    CHECK(g.map(-1.0) == Approx(-1.0));
    CHECK(g.map(1.0) == Approx(1.0));
    for (double tau : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
      const double h = 1e-6;
      CHECK(g.derivative(tau) == Approx((g.map(tau + h) - g.map(tau - h)) / (2 * h)).epsilon(1e-7));
      CHECK(g.inverse(g.map(tau)) == Approx(tau).epsilon(1e-12));
      CHECK(g.difference(tau, 1e-3) == Approx(g.map(tau + 1e-3) - g.map(tau)).epsilon(1e-10));
      CHECK(g.derivative(tau) > 0.0);
    }
  }
  // flattening: 1 + u ~ (1 + tau)^3 at a graded left end
  const EndpointGrading left(3, 1);
  const double r = (1.0 + left.map(-1.0 + 1e-3)) / (1.0 + left.map(-1.0 + 2e-3));
  CHECK(r == Approx(0.125).epsilon(1e-2));
}

TEST_CASE("tanh-sinh rule handles endpoint singularities") {
  double s = 0.0;
  for (const auto& node : tanh_sinh_rule(0.0, 1.0, 1.0 / 32.0)) s += node.weight / std::sqrt(node.from_a);
  CHECK(s == Approx(2.0).epsilon(1e-12));
  double l = 0.0;
  for (const auto& node : tanh_sinh_rule(0.0, 1.0, 1.0 / 32.0)) l += -node.weight * std::log(node.from_b);
  CHECK(l == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("density interpolation refuses singular ends") {
  DensityField f;
  PieceScheme s{cheb_nodes(8), EndpointExponents{0.5, -1.0 / 3.0}, EndpointGrading(1, 1)};
  f.schemes.push_back(s);
  f.values.push_back(Eigen::VectorXd::Ones(7));
  CHECK(std::isfinite(interpolate_density(f, 0, 0.2)));
  CHECK_THROWS_AS(interpolate_density(f, 0, 1.0), DomainError);
}
