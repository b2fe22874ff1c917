#include "revshell/coupled_dynamics.hpp"
#include "revshell/errors.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace revshell;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

CoupledSystem one_dof(double omega, double q0, double tau) {
  CoupledSystem s;
  s.omega2 = Eigen::VectorXd::Constant(1, omega * omega);
  s.added_mass = Eigen::MatrixXd::Zero(1, 1);
  s.load = Eigen::VectorXd::Constant(1, q0);
  s.tau = tau;
  return s;
}

TimeGrid uniform(double t_end, double dt) {
  TimeGrid g;
  g.t_end = t_end;
  g.dt = dt;
  g.dt_pulse = dt;
  g.pulse_window = 0.0;
  return g;
}

// closed form of x'' + w^2 x = a exp(-t / tau) from rest, derived directly
double oracle(double w, double a, double tau, double t) {
  const double s = 1.0 / tau;
  const double particular = a / (w * w + s * s);
  return particular * std::exp(-s * t) - particular * std::cos(w * t) + particular * s / w * std::sin(w * t);
}

double max_error(const TransientResult& r, double w, double a, double tau) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < r.time.size(); ++i) {
    const double x = oracle(w, a, tau, r.time[i]);
    err = std::max(err, std::abs(r.c(static_cast<Eigen::Index>(i), 0) - x));
    scale = std::max(scale, std::abs(x));
  }
  return err / scale;
}

}  // namespace

TEST_CASE("analysis classes") {
  CHECK(parse_analysis_class("e") == AnalysisClass::wet_forced);
  CHECK(to_string(AnalysisClass::static_load) == "a");
  CHECK(needs_liquid(AnalysisClass::wet_modes));
  CHECK_FALSE(needs_liquid(AnalysisClass::dry_forced));
  CHECK(needs_load(AnalysisClass::static_load));
  CHECK_THROWS_AS(parse_analysis_class("f"), ValidationError);
}

TEST_CASE("library closed form matches the independent oracle") {
  for (double t : {0.0, 0.01, 0.3, 2.0}) {
    CHECK(pulse_response_1dof(3.0, 2.0, 0.1, t) == Approx(oracle(3.0, 2.0, 0.1, t)).epsilon(1e-14));
  }
}

TEST_CASE("single mode pulse response") {
  const double w = 2.0 * pi, tau = 0.05;
  const TransientResult r = integrate_pulse(one_dof(w, 3.0, tau), uniform(3.0, 2e-5));
  CHECK(max_error(r, w, 3.0, tau) < 1e-6);
  CHECK(r.c(0, 0) == 0.0);
  CHECK(r.cdot(0, 0) == 0.0);
}

TEST_CASE("second order in the time step") {
  const double w = 2.0 * pi, tau = 0.05;
  const double e1 = max_error(integrate_pulse(one_dof(w, 1.0, tau), uniform(2.0, 4e-3)), w, 1.0, tau);
  const double e2 = max_error(integrate_pulse(one_dof(w, 1.0, tau), uniform(2.0, 2e-3)), w, 1.0, tau);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.1));
}

TEST_CASE("zero load stays at rest") {
  const TransientResult r = integrate_pulse(one_dof(5.0, 0.0, 0.1), uniform(1.0, 1e-2));
  CHECK(r.c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("energy is conserved after the pulse") {
  CoupledSystem s;
  s.omega2 = Eigen::Vector3d(1.0, 9.0, 30.0) * (4 * pi * pi);
  s.added_mass = Eigen::Matrix3d{{0.5, 0.1, 0.0}, {0.1, 0.3, 0.05}, {0.0, 0.05, 0.2}};
  s.load = Eigen::Vector3d(1.0, -0.5, 0.25);
  s.tau = 1e-3;
  const TimeGrid g = default_time_grid(s, 12.0, 0.0);
  const TransientResult r = integrate_pulse(s, g);
  Eigen::Index first = 0;
  while (r.time[static_cast<std::size_t>(first)] < 40 * s.tau) ++first;
  const double e0 = r.energy[first];
  double drift = 0.0;
  for (Eigen::Index i = first; i < r.energy.size(); ++i) drift = std::max(drift, std::abs(r.energy[i] - e0) / e0);
  CHECK(drift < 1e-4);
}

TEST_CASE("graded time grid") {
  TimeGrid g;
  g.t_end = 1.0;
  g.dt = 0.01;
  g.dt_pulse = 1e-5;
  g.pulse_window = 1e-3;
  const auto t = build_time_grid(g);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(t[i] > t[i - 1]);
    CHECK(t[i] - t[i - 1] <= 0.01 * (1 + 1e-12));
  }
  CHECK(t[1] == Approx(1e-5));
}

TEST_CASE("time step validation") {
  const CoupledSystem s = one_dof(100.0, 1.0, 1e-3);
  CHECK_THROWS_AS(default_time_grid(s, 1.0, 0.01), ValidationError);
  CHECK_NOTHROW(default_time_grid(s, 1.0, 2.0 * pi / 100.0 / 20.0));
  CHECK_THROWS_AS(default_time_grid(s, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(default_time_grid(s, -1.0, 0.0), ValidationError);
}

TEST_CASE("wet modes") {
  CoupledSystem s;
  s.omega2 = Eigen::Vector3d(4.0, 25.0, 100.0);
  s.added_mass = Eigen::Matrix3d::Zero();
  const WetModes dry = wet_modes(s);
  for (int k = 0; k < 3; ++k) CHECK(dry.omega2[k] == Approx(s.omega2[k]).epsilon(1e-12));

  s.added_mass = Eigen::Matrix3d{{0.8, 0.2, 0.1}, {0.2, 0.5, 0.0}, {0.1, 0.0, 0.3}};
  const WetModes wet = wet_modes(s);
  for (int k = 0; k < 3; ++k) CHECK(wet.omega2[k] <= s.omega2[k]);
  const Eigen::MatrixXd g = wet.vectors.transpose() * s.mass() * wet.vectors;
  CHECK((g - Eigen::Matrix3d::Identity()).norm() < 1e-12);

  CoupledSystem heavier = s;
  heavier.added_mass *= 2.0;
  CHECK(wet_modes(heavier).omega2[0] < wet.omega2[0]);

  s.added_mass = -2.0 * Eigen::Matrix3d::Identity();
  CHECK_THROWS_AS(wet_modes(s), NumericalError);
}

TEST_CASE("output reconstruction") {
  CoupledSystem s;
  s.omega2 = Eigen::Vector2d(100.0, 400.0);
  s.added_mass = Eigen::Matrix2d{{0.3, 0.1}, {0.1, 0.2}};
  s.load = Eigen::Vector2d(1.0, 0.5);
  s.tau = 0.01;
  TransientResult r = integrate_pulse(s, uniform(0.5, 1e-3));
  ProbeBasis p{"a", Eigen::RowVector2d(1.0, -2.0), Eigen::RowVector2d(0.5, 0.25)};
  const Eigen::RowVector2d f_row(-0.1, 0.3);
  reconstruct_outputs(r, {p}, f_row, 9810.0);
  REQUIRE(r.displacement.size() == 1);
  const Eigen::Index i = 123;
  CHECK(r.displacement[0].values[i] == Approx(r.c(i, 0) - 2.0 * r.c(i, 1)));
  CHECK(r.free_surface[i] == Approx(-0.1 * r.c(i, 0) + 0.3 * r.c(i, 1)));
  CHECK(r.pressure[0].values[i] == Approx(0.5 * r.cddot(i, 0) + 0.25 * r.cddot(i, 1) - 9810.0 * r.free_surface[i]));
  CHECK(r.free_surface[0] == 0.0);
}
