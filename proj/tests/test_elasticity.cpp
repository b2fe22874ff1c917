#include "revshell/discretization.hpp"
#include "revshell/elasticity.hpp"
#include "revshell/errors.hpp"
#include "test_support.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace revshell;
using doctest::Approx;

namespace {

const MaterialSpec steel{2e11, 0.3, 7800.0, 0.01, 3.2e8};

// Breathing mode of a long cylinder: mostly normal motion with the largest
// projection onto uniform expansion.
double ring_omega(const ShellModel& model, const DryModes& modes) {
  const GaussRule g = gauss_legendre(200);
  double best = 0.0, omega = 0.0;
  for (Eigen::Index k = 0; k < modes.omega2.size(); ++k) {
    if (normal_participation(model, modes.shapes.col(k)) <= 0.9) continue;
    double sw = 0, sww = 0;
    for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
      const double w = displacement(model, modes.shapes.col(k), 0, g.nodes[i]).w;
      sw += g.weights[i] * w;
      sww += g.weights[i] * w * w;
    }
    const double uniform = std::abs(sw) / std::sqrt(2.0 * sww);
    if (uniform > best) {
      best = uniform;
      omega = std::sqrt(modes.omega2[k]);
    }
  }
  return omega;
}

}  // namespace

TEST_CASE("material validation") {
  CHECK_NOTHROW(steel.validate());
  MaterialSpec bad = steel;
  bad.nu = 0.6;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = steel;
  bad.h = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK(steel.bending_stiffness() == Approx(steel.E * 1e-6 / (12 * 0.91)));
  CHECK(parse_boundary_condition("a") == BoundaryCondition::top_bottom_fixed);
  CHECK_THROWS_AS(parse_boundary_condition("x"), ValidationError);
}

TEST_CASE("ring frequency of a long clamped cylinder") {
  const Meridian mer = build_meridian({test::line(1, 0, 1, 10)}, std::nullopt);
  const ShellModel model = assemble_shell(mer, steel, 32, BoundaryCondition::bottom_fixed);
  const DryModes modes = dry_modes(model, 30);
  const double ring = std::sqrt(steel.E / (steel.rho * (1 - steel.nu * steel.nu)));
  CHECK(ring_omega(model, modes) == Approx(ring).epsilon(0.02));
  CHECK(modes.max_orthogonality_error < 1e-10);
}

TEST_CASE("Ritz frequencies decrease under refinement") {
  const Meridian mer = test::benchmark(std::nullopt);
  Eigen::VectorXd previous;
  for (int p : {8, 12, 16}) {
    const DryModes modes = dry_modes(assemble_shell(mer, steel, p, BoundaryCondition::bottom_fixed), 4);
    if (previous.size()) {
      for (int k = 0; k < 4; ++k) CHECK(modes.omega2[k] <= previous[k] * (1 + 1e-12));
    }
    previous = modes.omega2;
  }
}

TEST_CASE("frequency scales with the square root of E") {
  const Meridian mer = test::benchmark(std::nullopt);
  MaterialSpec stiff = steel;
  stiff.E *= 4.0;
  const DryModes a = dry_modes(assemble_shell(mer, steel, 10, BoundaryCondition::bottom_fixed), 5);
  const DryModes b = dry_modes(assemble_shell(mer, stiff, 10, BoundaryCondition::bottom_fixed), 5);
  for (int k = 0; k < 5; ++k) CHECK(std::sqrt(b.omega2[k]) == Approx(2.0 * std::sqrt(a.omega2[k])).epsilon(1e-10));
}

TEST_CASE("splitting a segment does not change the spectrum") {
  const Meridian one = build_meridian({test::line(1, 0, 1, 2)}, std::nullopt);
  const Meridian two = build_meridian({test::line(1, 0, 1, 1), test::line(1, 1, 1, 2)}, std::nullopt);
  const DryModes a = dry_modes(assemble_shell(one, steel, 24, BoundaryCondition::bottom_fixed), 4);
  const DryModes b = dry_modes(assemble_shell(two, steel, 24, BoundaryCondition::bottom_fixed), 4);
  for (int k = 0; k < 4; ++k) CHECK(b.omega2[k] == Approx(a.omega2[k]).epsilon(1e-6));
}

TEST_CASE("clamped circular plate") {
  // meridian from the clamped rim inward to the axis
  const Meridian mer = build_meridian({test::line(1, 0, 0, 0)}, std::nullopt);
  const ShellModel model = assemble_shell(mer, steel, 20, BoundaryCondition::bottom_fixed);
  const DryModes modes = dry_modes(model, 1);
  const double plate = 10.2158 * std::sqrt(steel.bending_stiffness() / (steel.rho * steel.h));
  CHECK(std::sqrt(modes.omega2[0]) == Approx(plate).epsilon(1e-3));
}

TEST_CASE("rigid translation stores no energy") {
  const Meridian mer = build_meridian({test::line(0, 0, 1, 0), test::line(1, 0, 1, 2), test::line(1, 2, 0.5, 4)},
                                      std::nullopt);
  const ShellModel model = assemble_shell(mer, steel, 8, BoundaryCondition::none);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.basis.full_size());
  const Eigen::Index ps = model.basis.per_segment();
  for (std::size_t i = 0; i < mer.size(); ++i) {
    const SurfaceFrame f = mer.segment(i).frame(0.0);
    x[static_cast<Eigen::Index>(i) * ps] = f.tangent.y();
    x[static_cast<Eigen::Index>(i) * ps + ps / 2] = f.normal.y();
  }
  CHECK(strain_energy(model, x) < 1e-12 * model.full_stiffness.norm() * x.squaredNorm());
  CHECK((model.basis.constraints * x).norm() < 1e-12);
  const ShellDisplacement d = displacement(model, x, 1, 0.3);
  CHECK(d.uz == Approx(1.0));
  CHECK(std::abs(d.ur) < 1e-14);
}

TEST_CASE("mode shapes are mass orthonormal and resolve the eigenproblem") {
  const ShellModel model = assemble_shell(test::benchmark(std::nullopt), steel, 12, BoundaryCondition::bottom_fixed);
  const DryModes modes = dry_modes(model, 8);
  const Eigen::MatrixXd g = modes.shapes.transpose() * model.full_mass * modes.shapes;
  CHECK((g - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-10);
  CHECK(modes.max_residual < 1e-8);
  for (Eigen::Index k = 1; k < 8; ++k) CHECK(modes.omega2[k] >= modes.omega2[k - 1]);
}

TEST_CASE("junction force balance") {
  const Meridian single = build_meridian({test::line(1, 0, 1, 2)}, std::nullopt);
  const ShellModel a = assemble_shell(single, steel, 8, BoundaryCondition::bottom_fixed);
  CHECK(junction_force_balance(a, Eigen::VectorXd::Zero(a.basis.full_size())).empty());

  // a static pressure solution: residual decays with the basis degree
  const Meridian mer = test::benchmark(std::nullopt);
  SurfaceLoad load;
  load.normal = [](std::size_t, double) { return 1e5; };
  double previous = 1e300;
  for (int p : {8, 16, 24}) {
    const ShellModel model = assemble_shell(mer, steel, p, BoundaryCondition::bottom_fixed);
    const Eigen::MatrixXd& z = model.basis.null_space;
    const Eigen::VectorXd x = z * model.stiffness.llt().solve(z.transpose() * load_vector(model, load));
    double worst = 0.0;
    for (const auto& j : junction_force_balance(model, x)) worst = std::max(worst, j.relative);
    CHECK(worst < previous);
    previous = worst;
  }
  CHECK(previous < 0.05);
}

TEST_CASE("thickness warning for thick shells") {
  const Meridian mer = build_meridian({test::arc(0, -1, 1, 0, 0, 0, true)}, std::nullopt);
  MaterialSpec thick = steel;
  thick.h = 0.2;
  CHECK_FALSE(assemble_shell(mer, thick, 8, BoundaryCondition::bottom_fixed).warnings.empty());
  CHECK(assemble_shell(mer, steel, 8, BoundaryCondition::bottom_fixed).warnings.empty());
}

TEST_CASE("modal force of a uniform pressure") {
  const Meridian mer = build_meridian({test::line(1, 0, 1, 2)}, std::nullopt);
  const ShellModel model = assemble_shell(mer, steel, 8, BoundaryCondition::none);
  // uniform radial expansion w = 1 under unit pressure: Q = area
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.basis.full_size());
  x[model.basis.per_segment() / 2] = 1.0;
  SurfaceLoad load;
  load.normal = [](std::size_t, double) { return 1.0; };
  CHECK(modal_force(model, x, load) == Approx(2.0 * std::numbers::pi * 2.0));
}
