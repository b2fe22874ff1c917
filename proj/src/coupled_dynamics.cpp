#include "revshell/coupled_dynamics.hpp"

#include "revshell/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace revshell {

AnalysisClass parse_analysis_class(const std::string& tag) {
  if (tag == "a") return AnalysisClass::static_load;
  if (tag == "b") return AnalysisClass::dry_modes;
  if (tag == "c") return AnalysisClass::wet_modes;
  if (tag == "d") return AnalysisClass::dry_forced;
  if (tag == "e") return AnalysisClass::wet_forced;
  throw ValidationError("analysis class must be one of a, b, c, d, e; got '" + tag + "'");
}

std::string to_string(AnalysisClass c) {
  switch (c) {
    case AnalysisClass::static_load: return "a";
    case AnalysisClass::dry_modes: return "b";
    case AnalysisClass::wet_modes: return "c";
    case AnalysisClass::dry_forced: return "d";
    case AnalysisClass::wet_forced: return "e";
  }
  return "?";
}

bool needs_liquid(AnalysisClass c) {
  return c == AnalysisClass::wet_modes || c == AnalysisClass::wet_forced;
}

bool needs_load(AnalysisClass c) {
  return c == AnalysisClass::static_load || c == AnalysisClass::dry_forced ||
         c == AnalysisClass::wet_forced;
}

Eigen::MatrixXd CoupledSystem::mass() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(size(), size());
  if (added_mass.size() > 0) m += added_mass;
  return m;
}

Eigen::MatrixXd CoupledSystem::stiffness() const { return omega2.asDiagonal(); }

Eigen::MatrixXd CoupledSystem::damping() const {
  return (2.0 * damping_ratio * omega2.cwiseMax(0.0).cwiseSqrt()).asDiagonal();
}

WetModes wet_modes(const CoupledSystem& system) {
  const Eigen::MatrixXd M = system.mass();
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("combined mass I + A is not positive definite; the added mass is broken");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(system.stiffness(), M);
  if (solver.info() != Eigen::Success) throw NumericalError("wet eigenproblem did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

TimeGrid default_time_grid(const CoupledSystem& system, double t_end, double dt) {
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (!(system.tau > 0.0)) throw ValidationError("pulse decay time must be positive");
  const double w_max = std::sqrt(wet_modes(system).omega2.maxCoeff());
  const double period = 2.0 * std::numbers::pi / w_max;
  TimeGrid g;
  g.t_end = t_end;
  g.dt_pulse = system.tau / 500.0;
  g.pulse_window = 10.0 * system.tau;
  g.dt = dt > 0.0 ? dt : period / 20.0;
  if (g.dt > period / 20.0 * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << g.dt << " s does not resolve the highest retained wet period " << period
        << " s (need dt <= T/20)";
    throw ValidationError(msg.str());
  }
  g.dt_pulse = std::min(g.dt_pulse, g.dt);
  return g;
}

std::vector<double> build_time_grid(const TimeGrid& grid) {
  if (!(grid.t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (!(grid.dt > 0.0) || !(grid.dt_pulse > 0.0)) throw ValidationError("time steps must be positive");
  std::vector<double> t{0.0};
  double step = grid.dt_pulse;
  while (t.back() < grid.t_end) {
    if (t.back() >= grid.pulse_window) step = std::min(grid.dt, step * grid.growth);
    double next = t.back() + step;
    if (next > grid.t_end || grid.t_end - next < 1e-9 * step) next = grid.t_end;
    t.push_back(next);
    if (t.size() > 50'000'000) throw ValidationError("time grid too fine");
  }
  return t;
}

TransientResult integrate_pulse(const CoupledSystem& system, const TimeGrid& grid) {
  const Eigen::Index K = system.size();
  if (K == 0) throw ValidationError("coupled system has no modes");
  if (system.load.size() != K) throw ValidationError("load vector does not match the mode count");
  if (!(system.tau > 0.0)) throw ValidationError("pulse decay time must be positive");

  const Eigen::MatrixXd M = system.mass();
  const Eigen::MatrixXd Ks = system.stiffness();
  const Eigen::MatrixXd C = system.damping();
  Eigen::LLT<Eigen::MatrixXd> mass_llt(M);
  if (mass_llt.info() != Eigen::Success) throw NumericalError("combined mass not positive definite");

  TransientResult out;
  out.time = build_time_grid(grid);
  const auto steps = static_cast<Eigen::Index>(out.time.size());
  out.c.resize(steps, K);
  out.cdot.resize(steps, K);
  out.cddot.resize(steps, K);
  out.energy.resize(steps);

  auto force = [&](double t) -> Eigen::VectorXd { return system.load * std::exp(-t / system.tau); };
  Eigen::VectorXd c = Eigen::VectorXd::Zero(K), v = c;
  Eigen::VectorXd a = mass_llt.solve(force(0.0));
  out.c.row(0) = c.transpose();
  out.cdot.row(0) = v.transpose();
  out.cddot.row(0) = a.transpose();
  out.energy[0] = 0.0;

  double cached_dt = -1.0;
  Eigen::LLT<Eigen::MatrixXd> eff;
  for (Eigen::Index n = 0; n + 1 < steps; ++n) {
    const double dt = out.time[n + 1] - out.time[n];
    if (dt != cached_dt) {
      eff.compute(M + 0.5 * dt * C + 0.25 * dt * dt * Ks);
      if (eff.info() != Eigen::Success) throw NumericalError("Newmark effective matrix not positive definite");
      cached_dt = dt;
    }
    const Eigen::VectorXd pred_c = c + dt * v + 0.25 * dt * dt * a;
    const Eigen::VectorXd pred_v = v + 0.5 * dt * a;
    const Eigen::VectorXd a_next = eff.solve(force(out.time[n + 1]) - Ks * pred_c - C * pred_v);
    c = pred_c + 0.25 * dt * dt * a_next;
    v = pred_v + 0.5 * dt * a_next;
    a = a_next;
    if (!c.allFinite()) throw NumericalError("transient integration diverged");
    out.c.row(n + 1) = c.transpose();
    out.cdot.row(n + 1) = v.transpose();
    out.cddot.row(n + 1) = a.transpose();
    out.energy[n + 1] = 0.5 * v.dot(M * v) + 0.5 * c.dot(Ks * c);
  }
  return out;
}

void reconstruct_outputs(TransientResult& result, const std::vector<ProbeBasis>& probes,
                         const Eigen::RowVectorXd& free_surface_row, double rho_g) {
  const Eigen::Index K = result.c.cols();
  if (free_surface_row.size() != K) throw ValidationError("free-surface row size mismatch");
  result.free_surface = result.c * free_surface_row.transpose();
  result.displacement.clear();
  result.pressure.clear();
  for (const auto& p : probes) {
    if (p.displacement.size() != K || p.pressure.size() != K) {
      throw ValidationError("probe basis size mismatch for " + p.name);
    }
    result.displacement.push_back({p.name, result.c * p.displacement.transpose()});
    Eigen::VectorXd pr = result.cddot * p.pressure.transpose();
    pr -= rho_g * result.free_surface;
    result.pressure.push_back({p.name, pr});
  }
}

double pulse_response_1dof(double omega, double q0_over_m, double tau, double t) {
  const double s = 1.0 / tau;
  const double amp = q0_over_m / (omega * omega + s * s);
  return amp * (std::exp(-s * t) - std::cos(omega * t) + s * std::sin(omega * t) / omega);
}

Eigen::VectorXd static_solution(const ShellModel& model, const SurfaceLoad& load) {
  const Eigen::VectorXd f = load_vector(model, load);
  const Eigen::MatrixXd& Z = model.basis.null_space;
  Eigen::LLT<Eigen::MatrixXd> llt(model.stiffness);
  if (llt.info() != Eigen::Success) throw NumericalError("stiffness not positive definite: structure not supported");
  return Z * llt.solve(Z.transpose() * f);
}

double compliance_fraction(const ShellModel& model, const DryModes& modes, const SurfaceLoad& load) {
  const Eigen::VectorXd f = model.basis.null_space.transpose() * load_vector(model, load);
  Eigen::LLT<Eigen::MatrixXd> llt(model.stiffness);
  if (llt.info() != Eigen::Success) throw NumericalError("stiffness not positive definite");
  const double full = f.dot(llt.solve(f));
  if (!(full > 0.0)) return 1.0;
  double retained = 0.0;
  for (Eigen::Index k = 0; k < modes.omega2.size(); ++k) {
    const double q = modes.reduced.col(k).dot(f);
    retained += q * q / modes.omega2[k];
  }
  return retained / full;
}

}  // namespace revshell
