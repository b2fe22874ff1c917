#pragma once

#include "revshell/coupled_dynamics.hpp"
#include "revshell/elasticity.hpp"
#include "revshell/errors.hpp"
#include "revshell/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace revshell {

// Schema violation in a configuration file; carries the offending line.
class ConfigError : public ValidationError {
 public:
  ConfigError(int line, const std::string& field, const std::string& what);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// The configuration file does not exist or cannot be opened.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LiquidSpec {
  double rho = 1000.0;  // kg/m^3
  double g = 9.81;      // m/s^2
  bool operator==(const LiquidSpec&) const = default;
};

struct DiscretizationSpec {
  int n = 32;         // Chebyshev parameter per boundary piece
  int m_max = 8;
  int modes = 10;     // K
  int degree = 16;    // Legendre degree per shell segment
  double dt = 0.0;    // 0: chosen from the highest wet period
  double t_end = 0.05;
  double damping = 0.0;
  bool operator==(const DiscretizationSpec&) const = default;
};

struct LoadSpec {
  double q0 = 0.0;   // Pa, acts along the outward normal
  double tau = 0.0;  // s
  std::vector<int> footprint;  // loaded shell segments, empty for all
  bool operator==(const LoadSpec&) const = default;
};

struct ProbeSpec {
  std::string name;
  std::optional<MeridianPoint> point;
  std::optional<double> arclength;  // along the meridian from its start
  bool operator==(const ProbeSpec&) const = default;
};

struct RunConfig {
  AnalysisClass analysis = AnalysisClass::wet_forced;
  std::vector<SegmentSpec> segments;
  std::optional<double> fill;
  MaterialSpec material;
  BoundaryCondition support = BoundaryCondition::bottom_fixed;
  std::optional<LiquidSpec> liquid;
  DiscretizationSpec discretization;
  std::optional<LoadSpec> load;
  std::vector<ProbeSpec> probes;
  std::string output = "output";
  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Resolved configuration in SI units; parses back to an equal RunConfig.
std::string echo_config(const RunConfig& config);

Meridian build_meridian(const RunConfig& config);

}  // namespace revshell
