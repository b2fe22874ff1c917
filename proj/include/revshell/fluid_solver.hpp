#pragma once

#include "revshell/discretization.hpp"
#include "revshell/geometry.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace revshell {

/// Collocation node of the boundary l + sigma.
struct BoundaryNode {
  std::size_t piece = 0;
  Eigen::Index local = 0;
  double tau = 0.0;  // collocation variable
  double t = 0.0;    // piece parameter, t = psi(tau)
  SurfaceFrame frame;
  /// psi'(tau) / w(tau): converts density g to the stored unknown f.
  double row_scale = 1.0;
  /// \int_piece h r ds ~ sum_i quad_weight_i h_i for smooth h.
  double quad_weight = 0.0;
};

/// Fixed far-field panel rule of one piece (Gauss-Legendre per panel).
struct PieceQuadrature {
  std::vector<double> breaks;        // panel breakpoints in tau, ascending
  std::vector<double> tau;           // Gauss nodes, panel by panel
  std::vector<MeridianPoint> point;  // y(tau)
  std::vector<double> weight;        // dtau weight * w(tau) * ds/du
  Eigen::MatrixXd basis;             // Lagrange basis at the Gauss nodes
  int points_per_panel = 0;
};

/// Discretization options shared by every harmonic.
struct BoundaryOptions {
  int n = 32;             // Chebyshev parameter per piece (n - 1 nodes)
  int grading_order = 3;  // endpoint map order at non-smooth junction ends; 1 disables
  double de_step = 1.0 / 32.0;
};

/// Chebyshev discretization of the boundary of the fluid domain: wetted wall
/// pieces followed by the free surface. Harmonic independent.
class BoundaryDiscretization {
 public:
  BoundaryDiscretization(const Meridian& meridian, const BoundaryOptions& options);

  const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
  const std::vector<PieceScheme>& schemes() const { return schemes_; }
  const std::vector<BoundaryNode>& nodes() const { return nodes_; }
  const std::vector<PieceQuadrature>& quadrature() const { return quadrature_; }
  const std::vector<double>& angles() const { return angles_; }
  const BoundaryOptions& options() const { return options_; }

  Eigen::Index size() const { return static_cast<Eigen::Index>(nodes_.size()); }
  Eigen::Index offset(std::size_t piece) const { return offsets_.at(piece); }
  std::size_t free_surface_piece() const { return pieces_.size() - 1; }
  /// Sum of quad weights over sigma, i.e. \int_sigma r ds = |sigma| / (2 pi).
  double free_surface_moment() const;

  /// Row vectors over the unknowns f: green_k = \int G_m l_k w r ds and, when
  /// `normal_derivative` is given, the same with dG_m/dn at `x`. `anchor`
  /// marks x as lying on the boundary at (piece, tau).
  void layer_rows(int m, const SurfaceFrame& x, std::optional<std::pair<std::size_t, double>> anchor,
                  Eigen::Ref<Eigen::VectorXd> green, Eigen::VectorXd* normal_derivative) const;

  /// Closed polygon of the fluid domain boundary (including the axis), for
  /// inside tests.
  const std::vector<Eigen::Vector2d>& outline() const { return outline_; }

 private:
  std::vector<BoundaryPiece> pieces_;
  std::vector<PieceScheme> schemes_;
  std::vector<BoundaryNode> nodes_;
  std::vector<PieceQuadrature> quadrature_;
  std::vector<Eigen::Index> offsets_;
  std::vector<double> angles_;
  std::vector<Eigen::Vector2d> outline_;
  BoundaryOptions options_;
};

/// Prescribed rigid motion of the container (accelerations).
struct RigidMotion {
  double axial = 0.0;    // dv0_z/dt, harmonic m = 0
  double lateral = 0.0;  // dv0_x/dt, harmonic m = 1
  double pitch = 0.0;    // angular acceleration about y, harmonic m = 1
};

/// Normal wall acceleration shape on the wetted surface as a function of
/// (shell segment index, segment parameter u).
using WallField = std::function<double(std::size_t segment, double u)>;

struct NeumannData {
  int m = 0;
  Eigen::VectorXd values;        // dp/dn at the collocation nodes
  double free_surface_accel = 0.0;  // f'' (m = 0 only)
  double flux_residual = 0.0;    // \oint F r ds
  double flux_scale = 0.0;       // \oint |F| r ds
};

/// dp/dn = -rho_l (v0' . n + rotation + w'') on S0 and -rho_l (... + f'') on sigma,
/// with f = -(1/|sigma|) \int_S0 w dS so that the m = 0 flux vanishes.
NeumannData build_neumann_data(const BoundaryDiscretization& disc, int m, const WallField& wall,
                               const RigidMotion& rigid, double rho_liquid);

/// Neumann data given directly by a function of the boundary frame.
NeumannData neumann_from_function(const BoundaryDiscretization& disc, int m,
                                  const std::function<double(const SurfaceFrame&)>& flux);

struct BIESystem {
  int m = 0;
  std::shared_ptr<const BoundaryDiscretization> disc;
  Eigen::MatrixXd matrix;        // row-scaled collocation matrix in f
  Eigen::MatrixXd single_layer;  // pressure at the nodes from f
  Eigen::RowVectorXd gauge;      // mean of p over sigma (m = 0)
  bool nullspace = false;
  double rcond = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

BIESystem assemble(std::shared_ptr<const BoundaryDiscretization> disc, int m);

struct PressureField {
  int m = 0;
  std::shared_ptr<const BoundaryDiscretization> disc;
  DensityField density;
  Eigen::VectorXd unknowns;  // f, all pieces stacked
  Eigen::VectorXd trace;     // p at the collocation nodes
  double multiplier = 0.0;   // bordered-system multiplier (m = 0), ~0 for compatible data
};

/// Solves for the density; for m = 0 the additive constant is fixed by
/// mean_sigma p = gauge_value.
PressureField solve(const BIESystem& system, const NeumannData& data, double gauge_value = 0.0);

/// p_m at interior points (r >= 0). Throws for points outside the fluid domain.
Eigen::VectorXd evaluate_pressure_at(const PressureField& field,
                                     const std::vector<MeridianPoint>& probes);

/// p_m on the boundary at piece parameter t.
double evaluate_trace(const PressureField& field, std::size_t piece, double t);

bool inside_fluid(const BoundaryDiscretization& disc, MeridianPoint p);

/// Density g at every node (for diagnostics).
Eigen::VectorXd node_density(const PressureField& field);

struct AddedMassResult {
  Eigen::MatrixXd matrix;  // A_jk = -\int_S0 p_k w_j dS
  double asymmetry = 0.0;  // ||A - A^T|| / ||A||
  std::vector<PressureField> fields;  // unit-acceleration pressures, mean_sigma p = 0
  std::vector<double> flux_residuals;
};

AddedMassResult added_mass(const BIESystem& system, const std::vector<WallField>& modes,
                           double rho_liquid);

}  // namespace revshell
