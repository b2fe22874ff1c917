#include "revshell/kernels.hpp"

#include "revshell/errors.hpp"
#include "revshell/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace revshell {

namespace {

constexpr double kPi = std::numbers::pi;

void check_harmonic(int m) {
  if (m < 0) throw ValidationError("harmonic index must be non-negative");
}

// sum_{k=1}^{m} 2/(2k-1), i.e. psi(m + 1/2) + gamma + 2 ln 2
double half_integer_digamma_shift(int m) {
  double s = 0.0;
  for (int k = 1; k <= m; ++k) s += 2.0 / (2.0 * k - 1.0);
  return s;
}

}  // namespace

double ring_kernel_green(int m, double r, double r_src, double dist2) {
  check_harmonic(m);
  if (!(dist2 > 0.0)) throw DomainError("ring kernel evaluated at coincident points");
  if (r == 0.0 || r_src == 0.0) return m == 0 ? 1.0 / std::sqrt(dist2) : 0.0;
  const double cm1 = dist2 / (2.0 * r * r_src);
  const auto q = toroidal_q(cm1, m);
  return q.value[m] / (kPi * std::sqrt(r * r_src));
}

RingKernelValues ring_kernel(int m, double r, double r_src, double dist2, double sep_dot_n,
                             double n_r) {
  check_harmonic(m);
  if (!(dist2 > 0.0)) throw DomainError("ring kernel evaluated at coincident points");
  if (!(r > 0.0)) throw DomainError("normal derivative requested on the axis");
  RingKernelValues out;
  if (r_src == 0.0) {
    if (m == 0) {
      const double inv = 1.0 / std::sqrt(dist2);
      out.green = inv;
      out.normal_derivative = -sep_dot_n * inv * inv * inv;
    }
    return out;
  }
  const double cm1 = dist2 / (2.0 * r * r_src);
  const auto q = toroidal_q(cm1, m);
  const double amp = 1.0 / (kPi * std::sqrt(r * r_src));
  const double dchi = sep_dot_n / (r * r_src) - cm1 * n_r / r;
  out.green = amp * q.value[m];
  out.normal_derivative = -amp * n_r / (2.0 * r) * q.value[m] + amp * q.derivative[m] * dchi;
  return out;
}

KernelSplit ring_green(int m, MeridianPoint field, MeridianPoint source) {
  check_harmonic(m);
  const double dr = field.r - source.r;
  const double dz = field.z - source.z;
  const double dist2 = dr * dr + dz * dz;
  if (!(dist2 > 0.0)) throw DomainError("ring_green: coincident points");
  KernelSplit s;
  s.total = ring_kernel_green(m, field.r, source.r, dist2);
  if (field.r > 0.0 && source.r > 0.0) {
    s.log_coefficient = 2.0 / (kPi * std::sqrt(field.r * source.r));
  }
  s.smooth_part = s.total + s.log_coefficient * 0.25 * std::log(dist2);
  return s;
}

double ring_green_smooth_limit(int m, double r) {
  check_harmonic(m);
  if (!(r > 0.0)) throw DomainError("smooth limit requires r > 0");
  return (std::log(8.0 * r) - half_integer_digamma_shift(m)) / (kPi * r);
}

double KernelPairGeometry::theta0() const {
  const double d = chord();
  if (!(d > 0.0)) throw DomainError("theta0 undefined for a zero chord");
  const Eigen::Vector2d e = -separation / d;  // from M0 towards M'
  Eigen::Vector2d n0(e.y(), -e.x());
  if (n0.dot(collocation.normal) < 0.0) n0 = -n0;
  return std::atan2(n0.x(), n0.y());
}

KernelPairGeometry make_pair_geometry(const SurfaceFrame& collocation, MeridianPoint integration) {
  KernelPairGeometry g;
  g.collocation = collocation;
  g.integration = integration;
  g.separation = collocation.point.vec() - integration.vec();
  return g;
}

FredholmKernel fredholm_kernel(int m, const KernelPairGeometry& geom) {
  check_harmonic(m);
  const double r = geom.collocation.point.r;
  const double n_r = geom.collocation.normal.x();
  if (!(r > 0.0)) throw DomainError("fredholm_kernel: collocation point on the axis");
  const double d2 = geom.separation.squaredNorm();
  FredholmKernel k;
  if (d2 == 0.0) {
    if (!geom.smooth) {
      throw DomainError("fredholm_kernel: zero chord at a junction node; split the segments");
    }
    const double c = 2.0 / (kPi * r);
    k.chord_term = 0.5 * geom.curvature;
    k.log_coefficient = -c * n_r / (2.0 * r);
    k.smooth = n_r / (2.0 * kPi * r * r) *
               (1.0 - std::log(8.0 * r) + half_integer_digamma_shift(m));
    k.total = std::numeric_limits<double>::quiet_NaN();
    return k;
  }
  const double r_src = geom.integration.r;
  const double sep_n = geom.separation.dot(geom.collocation.normal);
  k.total = ring_kernel(m, r, r_src, d2, sep_n, n_r).normal_derivative;
  k.chord_term = sep_n / d2;
  if (r_src > 0.0) {
    const double c = 2.0 / (kPi * std::sqrt(r * r_src));
    k.log_coefficient = -c * n_r / (2.0 * r);
    k.smooth = k.total + 0.5 * c * k.chord_term + k.log_coefficient * 0.25 * std::log(d2);
  } else {
    k.smooth = k.total;
  }
  return k;
}

double smooth_part_normal_derivative(int m, const KernelPairGeometry& geom) {
  return fredholm_kernel(m, geom).smooth;
}

}  // namespace revshell
