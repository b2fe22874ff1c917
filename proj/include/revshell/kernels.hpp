#pragma once

#include "revshell/geometry.hpp"

#include <Eigen/Dense>

namespace revshell {

/// Default harmonic truncation.
inline constexpr int kDefaultMaxHarmonic = 8;

/// G_m(M, M0), the m-th azimuthal Fourier coefficient of the free-space
/// Laplace kernel 1/|x - y| over a ring source,
///   G_m = (1/2pi) \oint cos(m phi) / |x - y| dphi = Q_{m-1/2}(chi) / (pi sqrt(r r0)),
/// split as  total = log_coefficient * ln(1/sqrt(|M - M0|)) + smooth_part.
struct KernelSplit {
  double total = 0.0;
  double log_coefficient = 0.0;
  double smooth_part = 0.0;
};

KernelSplit ring_green(int m, MeridianPoint field, MeridianPoint source);

/// lim_{M -> M0} of the smooth part H_m at radius r > 0.
double ring_green_smooth_limit(int m, double r);

/// Pair geometry for the Fredholm kernel: the collocation frame M0 (where the
/// normal derivative is taken) and an integration point M'.
struct KernelPairGeometry {
  SurfaceFrame collocation;
  MeridianPoint integration;
  /// M0 - M'. Callers on a common segment should fill this from
  /// Segment::offset so that it stays accurate for close points.
  Eigen::Vector2d separation = Eigen::Vector2d::Zero();
  /// Signed curvature of the generatrix at M0; used only for chord = 0.
  double curvature = 0.0;
  /// False when M0 is a junction node (the diagonal limit does not exist).
  bool smooth = true;

  double chord() const { return separation.norm(); }
  /// Angle between the normal of the chord M0M' and the +z axis.
  double theta0() const;
};

KernelPairGeometry make_pair_geometry(const SurfaceFrame& collocation, MeridianPoint integration);

/// dG_m/dn at M0, decomposed as
///   total = -(c/2) * chord_term + log_coefficient * ln(1/sqrt(d)) + smooth,
/// where c = 2/(pi sqrt(r0 r')) is the log coefficient of G_m, d the chord,
/// chord_term = (M0 - M').n0 / d^2 = sin(theta - theta0)/d, and smooth = dH_m/dn.
struct FredholmKernel {
  double total = 0.0;
  double chord_term = 0.0;
  double log_coefficient = 0.0;
  double smooth = 0.0;
};

FredholmKernel fredholm_kernel(int m, const KernelPairGeometry& geom);

/// dH_m/dn at the collocation frame; continuous across the diagonal on smooth arcs.
double smooth_part_normal_derivative(int m, const KernelPairGeometry& geom);

/// Hot-path evaluation used by the boundary integral assembly.
struct RingKernelValues {
  double green = 0.0;              // G_m(x, y)
  double normal_derivative = 0.0;  // dG_m/dn_x
};

/// x = (r, .) with unit normal n (n_r its radial part), y = (r_src, .),
/// dist2 = |x - y|^2 > 0 and sep_dot_n = (x - y).n.
RingKernelValues ring_kernel(int m, double r, double r_src, double dist2, double sep_dot_n,
                             double n_r);

/// G_m only; r may be zero (axis points).
double ring_kernel_green(int m, double r, double r_src, double dist2);

}  // namespace revshell
