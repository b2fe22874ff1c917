#include "revshell/discretization.hpp"
#include "revshell/errors.hpp"
#include "revshell/geometry.hpp"
#include "test_support.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

using namespace revshell;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("line segment frame points out of the container") {
  const Segment wall = Segment::line({1, 0}, {1, 2});
  CHECK(wall.length() == Approx(2.0));
  CHECK(wall.jacobian() == Approx(1.0));
  const SurfaceFrame f = wall.frame(0.0);
  CHECK(f.point.z == Approx(1.0));
  CHECK(f.normal.x() == Approx(1.0));
  CHECK(f.normal.y() == Approx(0.0).epsilon(1e-15));
  CHECK(std::sin(f.theta) == Approx(f.normal.x()));
  CHECK(wall.surface_kind() == SurfaceKind::cylinder);

  const Segment bottom = Segment::line({0, 0}, {1, 0});
  CHECK(bottom.normal(0.3).y() == Approx(-1.0));
  CHECK(bottom.surface_kind() == SurfaceKind::disk);
}

TEST_CASE("arc geometry and curvature") {
  // quarter circle of radius 2 from the axis bottom to the equator
  const Segment s = Segment::arc({0, -2}, {2, 0}, {0, 0}, true);
  CHECK(s.length() == Approx(pi));
  CHECK(s.surface_kind() == SurfaceKind::sphere);
  const MeridianPoint mid = s.point(0.0);
  CHECK(mid.r == Approx(std::sqrt(2.0)));
  CHECK(mid.z == Approx(-std::sqrt(2.0)));
  // outward normal is radial
  const Eigen::Vector2d n = s.normal(0.0);
  CHECK(n.x() == Approx(1.0 / std::sqrt(2.0)));
  CHECK(n.y() == Approx(-1.0 / std::sqrt(2.0)));
  CHECK(std::abs(s.curvature()) == Approx(0.5));
}

TEST_CASE("offset stays accurate for tiny steps") {
  const Segment s = Segment::arc({0, -2}, {2, 0}, {0, 0}, true);
  const double du = 1e-11;
  const Eigen::Vector2d off = s.offset(0.2, du);
  // exact chord of the quarter circle of radius 2 from theta(u) to theta(u + du)
  const double theta = -pi / 2 + (0.2 + 1.0) * pi / 4, dtheta = du * pi / 4;
  const double mid = theta + dtheta / 2;
  const Eigen::Vector2d chord = 4.0 * std::sin(dtheta / 2) * Eigen::Vector2d(-std::sin(mid), std::cos(mid));
  CHECK((off - chord).norm() < 1e-13 * chord.norm());
  const Eigen::Vector2d big = s.offset(-0.5, 0.7);
  CHECK((big - (s.point(0.2).vec() - s.point(-0.5).vec())).norm() < 1e-14);
}

TEST_CASE("sub segment reparameterizes") {
  const Segment s = Segment::line({1, 0}, {1, 2});
  const Segment half = s.sub(0.0, 1.0);
  CHECK(half.start().z == Approx(1.0));
  CHECK(half.end().z == Approx(2.0));
  CHECK(half.length() == Approx(1.0));
}

TEST_CASE("chain snapping and connectivity") {
  auto specs = test::benchmark_specs();
  specs[1].from.z += 5e-10;
  CHECK_NOTHROW(build_meridian(specs, 4.0));
  specs[1].from.z += 1e-6;
  CHECK_THROWS_AS(build_meridian(specs, 4.0), ValidationError);
}

TEST_CASE("benchmark tank wetted decomposition") {
  const Meridian m = test::benchmark();
  CHECK(m.size() == 4);
  CHECK(m.free_surface_radius() == Approx(0.5));
  CHECK(free_surface_area(m) == Approx(pi * 0.25));
  const auto& w = m.wetted();
  REQUIRE(w.size() == 4);
  CHECK(w[0].kind == SurfaceKind::disk);
  CHECK(w[1].kind == SurfaceKind::cylinder);
  CHECK(w[2].kind == SurfaceKind::cone);
  CHECK(w[3].free_surface);
  CHECK(w[3].segment == -1);
  // disk to cylinder is a right angle seen from the liquid
  REQUIRE(m.wetted_angles().size() == 3);
  CHECK(m.wetted_angles()[0] == Approx(pi / 2));
  CHECK(m.total_length() == Approx(1.0 + 2.0 + std::sqrt(4.25) + pi / 6));
}

TEST_CASE("partial fill splits a segment") {
  const Meridian m = test::cylinder_tank(2.0, 1.5);
  const auto& w = m.wetted();
  REQUIRE(w.size() == 3);
  CHECK(w[1].geometry.length() == Approx(1.5));
  CHECK(w[1].u_end == Approx(0.5));
  CHECK(w[1].segment_parameter(1.0) == Approx(0.5));
  CHECK(m.free_surface_radius() == Approx(1.0));
}

TEST_CASE("fill above the shell is rejected") {
  CHECK_THROWS_AS(test::cylinder_tank(2.0, 3.0), ValidationError);
}

TEST_CASE("re-entrant corner angle and internal edge") {
  const Meridian m = test::stepped_tank();
  REQUIRE(m.wetted_angles().size() >= 2);
  CHECK(m.wetted_angles()[1] == Approx(1.5 * pi));
  CHECK(corner_exponent(1.5 * pi) == Approx(-1.0 / 3.0));
  CHECK_THROWS_AS(corner_exponent(2.0 * pi), DomainError);
  // a wall folding straight back on itself
  CHECK(interior_angle({0, 1}, {0, -1}) == Approx(2.0 * pi));
}

TEST_CASE("nearest shell point and arclength location") {
  const Meridian m = test::benchmark();
  const MeridianLocation a = locate(m, {0.4, 0.8});
  CHECK(a.segment == 1);
  CHECK(a.distance == Approx(0.6));
  CHECK(a.point.z == Approx(0.8));
  const MeridianLocation b = locate(m, {0.5, 4.0});
  CHECK(b.distance < 1e-12);
  const MeridianLocation c = locate_arclength(m, 2.0);
  CHECK(c.segment == 1);
  CHECK(c.point.r == Approx(1.0));
  CHECK(c.point.z == Approx(1.0));
  CHECK_THROWS_AS(locate_arclength(m, 100.0), ValidationError);
}
