#pragma once

#include "revshell/config.hpp"
#include "revshell/coupled_dynamics.hpp"
#include "revshell/elasticity.hpp"
#include "revshell/fluid_solver.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace revshell {

/// Everything the analyses share, built lazily from a config.
struct Analysis {
  RunConfig config;
  Meridian meridian;
  ShellModel model;
  DryModes dry;
  std::shared_ptr<BoundaryDiscretization> disc;  // null without liquid
  std::shared_ptr<BIESystem> bie;
  AddedMassResult added;
  CoupledSystem coupled;
  WetModes wet;
  std::map<std::string, double> seconds;  // stage timings
};

/// Shell model and dry modes; with `wet` also the fluid system, added mass
/// and wet modes.
Analysis prepare(const RunConfig& config, bool wet);

/// Normal pulse load of the config restricted to its footprint, at t = 0.
SurfaceLoad pulse_load(const RunConfig& config);

/// Output files in memory, name -> content.
using FileSet = std::map<std::string, std::string>;

/// Runs the configured analysis class.
FileSet run(const RunConfig& config);

/// Mode tables only.
FileSet run_modes(const RunConfig& config, bool wet);

struct ConvergenceStudy {
  std::vector<std::string> parts;  // wetted wall parts
  std::vector<int> n;
  std::vector<std::vector<double>> eps;  // eps[i][part]
  std::vector<double> seconds;           // solve time at n[i]
};

/// eps_i(n) = ||p_n - p_2n|| / ||p_2n|| on each wetted part for the datum
/// dp/dn = n_r on the wall.
ConvergenceStudy convergence_study(const RunConfig& config, const std::vector<int>& n_list);

FileSet convergence_files(const ConvergenceStudy& study);

/// Writes the files into `dir` (created if needed). On failure already
/// written files are removed and IoError is thrown.
void write_files(const FileSet& files, const std::string& dir);

/// Lines of a CSV that are not '#' metadata.
std::string csv_body(const std::string& csv);

}  // namespace revshell
