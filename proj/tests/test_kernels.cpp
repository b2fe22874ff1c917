#include "revshell/kernels.hpp"
#include "revshell/special_functions.hpp"
#include "test_support.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace revshell;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("ring Green function against azimuthal quadrature") {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> rr(0.1, 2.0), zz(-1.0, 1.0);
  double worst = 0.0;
  for (int pair = 0; pair < 40; ++pair) {
    const MeridianPoint x{rr(rng), zz(rng)}, y{rr(rng), zz(rng)};
    if ((x.vec() - y.vec()).norm() < 0.05 * std::min(x.r, y.r)) continue;
    for (int m = 0; m <= 8; ++m) {
      const double ref = test::ring_green_reference(m, x, y);
      const double got = ring_green(m, x, y).total;
      worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("hot path agrees with the split evaluation") {
  const MeridianPoint x{0.7, 0.2}, y{1.3, -0.4};
  const Eigen::Vector2d sep = x.vec() - y.vec();
  for (int m = 0; m <= 8; ++m) {
    const double g = ring_green(m, x, y).total;
    CHECK(ring_kernel_green(m, x.r, y.r, sep.squaredNorm()) == Approx(g).epsilon(1e-13));
    CHECK(ring_kernel(m, x.r, y.r, sep.squaredNorm(), 0.0, 1.0).green == Approx(g).epsilon(1e-13));
  }
}

TEST_CASE("symmetry in field and source") {
  const MeridianPoint x{0.35, 1.1}, y{1.7, 0.9};
  for (int m = 0; m <= 8; ++m) {
    CHECK(ring_green(m, x, y).total == Approx(ring_green(m, y, x).total).epsilon(1e-13));
  }
}

TEST_CASE("normal derivative against central differences") {
  const MeridianPoint y{1.1, 0.3};
  const Eigen::Vector2d n = Eigen::Vector2d(0.6, -0.8);
  const MeridianPoint x{0.8, 0.75};
  const double h = 1e-5;
  for (int m = 0; m <= 8; ++m) {
    const Eigen::Vector2d sep = x.vec() - y.vec();
    const double dn = ring_kernel(m, x.r, y.r, sep.squaredNorm(), sep.dot(n), n.x()).normal_derivative;
    const MeridianPoint xp = MeridianPoint::from(x.vec() + h * n), xm = MeridianPoint::from(x.vec() - h * n);
    const double fd = (ring_green(m, xp, y).total - ring_green(m, xm, y).total) / (2.0 * h);
    CHECK(dn == Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("logarithmic split and its diagonal limit") {
  const MeridianPoint y{0.9, 0.0};
  for (int m : {0, 3, 8}) {
    const KernelSplit far = ring_green(m, {1.4, 0.5}, y);
    const double d = std::hypot(0.5, 0.5);
    CHECK(far.log_coefficient * std::log(1.0 / std::sqrt(d)) + far.smooth_part == Approx(far.total).epsilon(1e-13));
    CHECK(far.log_coefficient == Approx(2.0 / (pi * std::sqrt(1.4 * 0.9))));
    const KernelSplit near = ring_green(m, {0.9, 1e-7}, y);
    CHECK(near.smooth_part == Approx(ring_green_smooth_limit(m, 0.9)).epsilon(1e-5));
  }
}

TEST_CASE("far field and high harmonic recurrence") {
  // large separation: forward recurrence in m loses accuracy, backward does not
  const MeridianPoint x{0.2, 0.0}, y{0.3, 5.0};
  for (int m = 0; m <= 8; ++m) {
    const double ref = test::ring_green_reference(m, x, y, 256);
    CHECK(ring_green(m, x, y).total == Approx(ref).epsilon(1e-10));
  }
  // m-th coefficient decays like (r r0 / d^2)^m
  CHECK(std::abs(ring_green(8, x, y).total) < 1e-12);
}

TEST_CASE("complete elliptic integrals") {
  // K(0) = E(0) = pi / 2 and the Legendre relation at k^2 = 1/2
  const auto zero = elliptic_ke(1.0);
  CHECK(zero.K == Approx(pi / 2));
  CHECK(zero.E == Approx(pi / 2));
  const auto half = elliptic_ke(std::sqrt(0.5));
  CHECK(2.0 * half.E * half.K - half.K * half.K == Approx(pi / 2).epsilon(1e-14));
}

TEST_CASE("axis points") {
  // on the axis only m = 0 survives: 1 / |x - y|
  const double d2 = 0.3 * 0.3 + 0.4 * 0.4;
  CHECK(ring_kernel_green(0, 0.0, 0.3, 0.4 * 0.4 + 0.3 * 0.3) == Approx(1.0 / std::sqrt(d2)));
  CHECK(ring_kernel_green(2, 0.0, 0.3, d2) == Approx(0.0));
}
