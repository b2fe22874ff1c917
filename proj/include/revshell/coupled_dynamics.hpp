#pragma once

#include "revshell/elasticity.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace revshell {

/// Problem classes (a)-(e).
enum class AnalysisClass { static_load, dry_modes, wet_modes, dry_forced, wet_forced };

AnalysisClass parse_analysis_class(const std::string& tag);
std::string to_string(AnalysisClass c);
bool needs_liquid(AnalysisClass c);
bool needs_load(AnalysisClass c);

/// Hydroelastic equations in dry modal coordinates:
///   (I + A) c'' + 2 zeta Omega c' + Omega^2 c = Q0 exp(-t / tau).
struct CoupledSystem {
  Eigen::VectorXd omega2;        // dry eigenvalues
  Eigen::MatrixXd added_mass;    // A (zero when dry)
  Eigen::VectorXd load;          // Q0, modal forces of the load at t = 0
  double tau = 0.0;              // pulse decay time (s)
  double damping_ratio = 0.0;

  Eigen::Index size() const { return omega2.size(); }
  Eigen::MatrixXd mass() const;
  Eigen::MatrixXd stiffness() const;
  Eigen::MatrixXd damping() const;
};

struct WetModes {
  Eigen::VectorXd omega2;   // ascending
  Eigen::MatrixXd vectors;  // (I + A)-orthonormal columns in dry modal coordinates
};

WetModes wet_modes(const CoupledSystem& system);

struct TimeGrid {
  double t_end = 0.0;
  double dt = 0.0;       // step after the pulse
  double dt_pulse = 0.0; // step inside [0, pulse_window]
  double pulse_window = 0.0;
  double growth = 1.1;   // geometric step growth between the two regimes
};

/// Default grid: tau / 500 inside 10 tau, then at most T_min / 20.
TimeGrid default_time_grid(const CoupledSystem& system, double t_end, double dt);

std::vector<double> build_time_grid(const TimeGrid& grid);

struct ProbeSeries {
  std::string name;
  Eigen::VectorXd values;
};

struct TransientResult {
  std::vector<double> time;
  Eigen::MatrixXd c, cdot, cddot;  // rows are time steps
  Eigen::VectorXd energy;          // c'^T M c' / 2 + c^T K c / 2
  std::vector<ProbeSeries> displacement;
  std::vector<ProbeSeries> pressure;
  Eigen::VectorXd free_surface;
};

/// Newmark average acceleration from the rest state c = c' = 0.
TransientResult integrate_pulse(const CoupledSystem& system, const TimeGrid& grid);

/// Linear read-out rows for outputs that are combinations of c or c''.
struct ProbeBasis {
  std::string name;
  Eigen::RowVectorXd displacement;  // w(probe) = row . c
  Eigen::RowVectorXd pressure;      // p(probe) = row . c'' + gauge term
};

/// Fills probe series and f(t) = f_row . c; pressures carry the gauge term
/// -rho_l g f(t).
void reconstruct_outputs(TransientResult& result, const std::vector<ProbeBasis>& probes,
                         const Eigen::RowVectorXd& free_surface_row, double rho_g);

/// Closed-form response of x'' + omega^2 x = (q0 / m) exp(-t / tau), x(0) = x'(0) = 0.
double pulse_response_1dof(double omega, double q0_over_m, double tau, double t);

/// Static solution K x = f of the constrained shell (full coefficients).
Eigen::VectorXd static_solution(const ShellModel& model, const SurfaceLoad& load);

/// Fraction of the static compliance of the load captured by the retained modes.
double compliance_fraction(const ShellModel& model, const DryModes& modes, const SurfaceLoad& load);

}  // namespace revshell
