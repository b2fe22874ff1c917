#pragma once

#include "revshell/geometry.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace revshell {

struct MaterialSpec {
  double E = 0.0;    // Pa
  double nu = 0.0;
  double rho = 0.0;  // kg/m^3
  double h = 0.0;    // m
  double yield_point = 0.0;  // Pa, stored only

  void validate() const;
  bool operator==(const MaterialSpec&) const = default;
  double membrane_stiffness() const { return E * h / (1.0 - nu * nu); }
  double bending_stiffness() const { return E * h * h * h / (12.0 * (1.0 - nu * nu)); }
};

/// (a) Gamma_1 and Gamma_N fixed, (b) Gamma_1 fixed and the top free.
enum class BoundaryCondition { top_bottom_fixed, bottom_fixed, none };

BoundaryCondition parse_boundary_condition(const std::string& tag);

/// Per-segment Legendre expansions of the meridional (u) and normal (w)
/// displacements, u = sum a_j P_j(xi), w = sum b_j P_j(xi). Coefficients are
/// stored segment by segment as [a_0..a_p, b_0..b_p].
struct RitzBasis {
  int degree = 0;
  std::size_t segments = 0;
  BoundaryCondition bc = BoundaryCondition::bottom_fixed;
  Eigen::MatrixXd constraints;  // C x = 0: junction continuity, axis regularity, supports
  Eigen::MatrixXd null_space;   // x = Z y

  Eigen::Index per_segment() const { return 2 * (degree + 1); }
  Eigen::Index full_size() const { return per_segment() * static_cast<Eigen::Index>(segments); }
  Eigen::Index reduced_size() const { return null_space.cols(); }
};

struct ShellModel {
  Meridian meridian;
  MaterialSpec material;
  RitzBasis basis;
  Eigen::MatrixXd full_stiffness;  // energy = x^T K x / 2 (2 pi r included)
  Eigen::MatrixXd full_mass;
  Eigen::MatrixXd stiffness;  // Z^T K Z
  Eigen::MatrixXd mass;       // Z^T M Z
  std::vector<std::string> warnings;
};

ShellModel assemble_shell(const Meridian& meridian, const MaterialSpec& material, int degree,
                          BoundaryCondition bc);

struct ShellDisplacement {
  double u = 0.0;  // meridional
  double w = 0.0;  // outward normal
  double ur = 0.0;
  double uz = 0.0;
  double beta = 0.0;  // rotation of the normal
};

/// Displacement of full coefficient vector x at segment parameter xi.
ShellDisplacement displacement(const ShellModel& model, const Eigen::VectorXd& x,
                               std::size_t segment, double xi);

/// Strain energy x^T K x / 2 of a full coefficient vector.
double strain_energy(const ShellModel& model, const Eigen::VectorXd& x);

struct DryModes {
  Eigen::VectorXd omega2;   // ascending
  Eigen::MatrixXd reduced;  // M-orthonormal, columns
  Eigen::MatrixXd shapes;   // full coefficients, columns
  double max_residual = 0.0;
  double max_orthogonality_error = 0.0;
};

DryModes dry_modes(const ShellModel& model, int count);

/// Normal displacement field of a full coefficient vector, in the form the
/// fluid solver consumes.
std::function<double(std::size_t, double)> normal_field(const ShellModel& model,
                                                        const Eigen::VectorXd& x);

/// Surface traction on the shell (Pa): normal (outward) and meridional parts
/// as functions of (segment, xi). Empty functions count as zero.
struct SurfaceLoad {
  std::function<double(std::size_t, double)> normal;
  std::function<double(std::size_t, double)> meridional;
};

/// Q = \int_S q . U dS for the full coefficient vector x.
double modal_force(const ShellModel& model, const Eigen::VectorXd& x, const SurfaceLoad& load);

/// Generalized force vector of a load over all full coefficients.
Eigen::VectorXd load_vector(const ShellModel& model, const SurfaceLoad& load);

struct JunctionResidual {
  std::size_t node = 0;  // junction between segments node and node + 1
  Eigen::Vector3d jump = Eigen::Vector3d::Zero();  // (F_r, F_z, M) left minus right, per unit length
  double relative = 0.0;  // |jump| / max one-sided |(F, M)|
};

/// Weak force balance at every junction between two free segments, from the
/// one-sided stress resultants.
std::vector<JunctionResidual> junction_force_balance(const ShellModel& model,
                                                     const Eigen::VectorXd& x);

/// Fraction of \int w^2 dS in \int (u^2 + w^2) dS (normal participation).
double normal_participation(const ShellModel& model, const Eigen::VectorXd& x);

}  // namespace revshell
