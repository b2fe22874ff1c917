#include "revshell/discretization.hpp"

#include "revshell/errors.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace revshell {

namespace {

constexpr double kPi = std::numbers::pi;

double weight_from_offsets(const EndpointExponents& e, double one_plus, double one_minus) {
  double w = 1.0;
  if (e.beta_left != 0.0) w *= std::pow(one_plus, e.beta_left);
  if (e.beta_right != 0.0) w *= std::pow(one_minus, e.beta_right);
  return w;
}

}  // namespace

ChebGrid cheb_nodes(int n) {
  if (n < 2) throw ValidationError("Chebyshev grid needs n >= 2");
  ChebGrid g;
  g.n = n;
  g.nodes.resize(n - 1);
  g.barycentric.resize(n - 1);
  for (int k = 1; k < n; ++k) {
    const double th = k * kPi / n;
    g.nodes[k - 1] = std::cos(th);
    const double s = std::sin(th);
    g.barycentric[k - 1] = (k % 2 == 0 ? 1.0 : -1.0) * s * s;
  }
  // exact symmetry
  for (int k = 0; k < (n - 1) / 2; ++k) {
    const double v = 0.5 * (g.nodes[k] - g.nodes[n - 2 - k]);
    g.nodes[k] = v;
    g.nodes[n - 2 - k] = -v;
  }
  if (n % 2 == 0) g.nodes[n / 2 - 1] = 0.0;

  const GaussRule gl = gauss_legendre(n);
  g.weights = Eigen::VectorXd::Zero(n - 1);
  Eigen::VectorXd basis(n - 1);
  for (Eigen::Index i = 0; i < gl.nodes.size(); ++i) {
    lagrange_basis(g, gl.nodes[i], basis);
    g.weights += gl.weights[i] * basis;
  }
  return g;
}

GaussRule gauss_legendre(int points) {
  if (points < 1) throw ValidationError("Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  for (int i = 0; i < points; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (points + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (points == 1) p0 = 1.0;
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

void lagrange_basis(const ChebGrid& grid, double t, Eigen::Ref<Eigen::VectorXd> out) {
  const Eigen::Index n = grid.size();
  double denom = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double diff = t - grid.nodes[k];
    if (diff == 0.0) {
      out.setZero();
      out[k] = 1.0;
      return;
    }
    out[k] = grid.barycentric[k] / diff;
    denom += out[k];
  }
  out /= denom;
}

Eigen::VectorXd lagrange_basis(const ChebGrid& grid, double t) {
  Eigen::VectorXd out(grid.size());
  lagrange_basis(grid, t, out);
  return out;
}

double EndpointExponents::weight(double t) const {
  return weight_from_offsets(*this, 1.0 + t, 1.0 - t);
}

double corner_exponent(double alpha) {
  constexpr double two_pi = 2.0 * kPi;
  if (!(alpha > 0.0) || alpha > two_pi + 1e-12) {
    std::ostringstream msg;
    msg << "junction angle " << alpha << " outside (0, 2 pi]";
    throw ValidationError(msg.str());
  }
  if (alpha >= two_pi - 1e-12) {
    throw DomainError("internal edge unsupported: junction angle 2 pi is hypersingular");
  }
  if (alpha <= kPi) return 0.0;
  return kPi / alpha - 1.0;
}

EndpointGrading::EndpointGrading(int left_order, int right_order)
    : left_(left_order), right_(right_order) {
  if (left_ < 1 || right_ < 1) throw ValidationError("grading order must be >= 1");
}

// Graded at both ends: regularized incomplete beta I_x(p, q), a polynomial with
// p-fold and q-fold flat ends. Graded at one end: p x^p - (p - 1) x^(p+1), which
// keeps unit slope at the smooth end.
double EndpointGrading::unit(double x) const {
  if (left_ == 1 && right_ == 1) return x;
  if (right_ == 1) return left_ * std::pow(x, left_) - (left_ - 1) * std::pow(x, left_ + 1);
  if (left_ == 1) {
    const double y = 1.0 - x;
    return 1.0 - (right_ * std::pow(y, right_) - (right_ - 1) * std::pow(y, right_ + 1));
  }
  const int n = left_ + right_ - 1;
  double sum = 0.0;
  double binom = 1.0;  // C(n, j)
  for (int j = 1; j <= n; ++j) {
    binom = binom * (n - j + 1) / j;
    if (j >= left_) sum += binom * std::pow(x, j) * std::pow(1.0 - x, n - j);
  }
  return sum;
}

double EndpointGrading::unit_prime(double x) const {
  if (left_ == 1 && right_ == 1) return 1.0;
  if (right_ == 1) return std::pow(x, left_ - 1) * (left_ * left_ - (left_ * left_ - 1) * x);
  if (left_ == 1) {
    const double y = 1.0 - x;
    return std::pow(y, right_ - 1) * (right_ * right_ - (right_ * right_ - 1) * y);
  }
  // 1 / B(p, q) = (p + q - 1)! / ((p - 1)! (q - 1)!)
  double inv_beta = 1.0;
  for (int j = 1; j <= left_ + right_ - 1; ++j) inv_beta *= j;
  for (int j = 1; j < left_; ++j) inv_beta /= j;
  for (int j = 1; j < right_; ++j) inv_beta /= j;
  return inv_beta * std::pow(x, left_ - 1) * std::pow(1.0 - x, right_ - 1);
}

double EndpointGrading::map(double tau) const {
  if (identity()) return tau;
  if (tau <= -1.0) return -1.0;
  if (tau >= 1.0) return 1.0;
  return 2.0 * unit(0.5 * (tau + 1.0)) - 1.0;
}

double EndpointGrading::derivative(double tau) const {
  if (identity()) return 1.0;
  return unit_prime(0.5 * (tau + 1.0));
}

double EndpointGrading::difference(double tau, double delta) const {
  if (identity()) return delta;
  if (std::abs(delta) > 0.05) return map(tau + delta) - map(tau);
  static const GaussRule rule = gauss_legendre(10);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * derivative(tau + 0.5 * delta * (1.0 + rule.nodes[i]));
  }
  return 0.5 * delta * sum;
}

double EndpointGrading::inverse(double u) const {
  if (identity()) return u;
  if (u <= -1.0) return -1.0;
  if (u >= 1.0) return 1.0;
  double lo = -1.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    (map(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<TanhSinhNode> tanh_sinh_rule(double a, double b, double h, double cutoff) {
  std::vector<TanhSinhNode> rule;
  const double half = 0.5 * (b - a);
  if (!(half > 0.0)) return rule;
  auto node = [&](double s) -> std::optional<TanhSinhNode> {
    const double y = 0.5 * kPi * std::sinh(s);
    const double e = std::exp(-2.0 * std::abs(y));
    const double small = 2.0 * e / (1.0 + e);  // 1 - |x|
    const double large = 2.0 / (1.0 + e);      // 1 + |x|
    const double one_plus = y >= 0.0 ? large : small;
    const double one_minus = y >= 0.0 ? small : large;
    TanhSinhNode nd;
    nd.from_a = half * one_plus;
    nd.from_b = half * one_minus;
    nd.weight = h * half * 0.5 * kPi * std::cosh(s) * one_plus * one_minus;
    if (std::min(nd.from_a, nd.from_b) < cutoff || nd.weight < 1e-300) return std::nullopt;
    return nd;
  };
  rule.push_back(*node(0.0));
  for (int j = 1; j < 100000; ++j) {
    const auto lo = node(-j * h);
    const auto hi = node(j * h);
    if (!lo && !hi) break;
    if (lo) rule.push_back(*lo);
    if (hi) rule.push_back(*hi);
  }
  return rule;
}

Eigen::VectorXd log_quadrature_row(const ChebGrid& grid, Eigen::Index node,
                                   const EndpointExponents& weight) {
  if (node < 0 || node >= grid.size()) throw ValidationError("collocation node not on grid");
  const int n = grid.n;
  const double t0 = grid.nodes[node];
  Eigen::VectorXd row = Eigen::VectorXd::Zero(grid.size());

  if (weight.beta_left == 0.5 && weight.beta_right == 0.5) {
    // \int sqrt(1-t^2) U_j(t) ln(1/|t - t0|) dt in closed form
    Eigen::VectorXd moments(n - 1);
    moments[0] = 0.5 * kPi * (std::log(2.0) - 0.5 * chebyshev_t(2, t0));
    for (int j = 1; j <= n - 2; ++j) {
      moments[j] = 0.5 * kPi * (chebyshev_t(j, t0) / j - chebyshev_t(j + 2, t0) / (j + 2));
    }
    // l_k(t) = (2/n) sin^2(theta_k) sum_j U_j(t_k) U_j(t)
    for (int k = 1; k < n; ++k) {
      const double th = k * kPi / n;
      const double s = std::sin(th);
      double acc = 0.0;
      for (int j = 0; j <= n - 2; ++j) acc += std::sin((j + 1) * th) / s * moments[j];
      row[k - 1] = 2.0 / n * s * s * acc;
    }
    return row;
  }

  const double h = 1.0 / 64.0;
  Eigen::VectorXd basis(grid.size());
  for (const auto& nd : tanh_sinh_rule(-1.0, t0, h, 1e-30)) {
    const double t = t0 - nd.from_b;
    lagrange_basis(grid, t, basis);
    const double w = weight_from_offsets(weight, nd.from_a, 1.0 - t);
    row += nd.weight * (-std::log(nd.from_b)) * w * basis;
  }
  for (const auto& nd : tanh_sinh_rule(t0, 1.0, h, 1e-30)) {
    const double t = t0 + nd.from_a;
    lagrange_basis(grid, t, basis);
    const double w = weight_from_offsets(weight, 1.0 + t, nd.from_b);
    row += nd.weight * (-std::log(nd.from_a)) * w * basis;
  }
  return row;
}

double interpolate_density(const DensityField& field, std::size_t piece, double t) {
  if (piece >= field.schemes.size()) throw ValidationError("density piece out of range");
  const PieceScheme& scheme = field.schemes[piece];
  const bool open_left = scheme.exponents.beta_left < 0.0 || scheme.grading.left() > 1;
  const bool open_right = scheme.exponents.beta_right < 0.0 || scheme.grading.right() > 1;
  if (std::abs(t) > 1.0 || (t <= -1.0 && open_left) || (t >= 1.0 && open_right)) {
    throw DomainError("density weight undefined at this endpoint");
  }
  const double tau = scheme.grading.inverse(t);
  const Eigen::VectorXd basis = lagrange_basis(scheme.grid, tau);
  const double f = basis.dot(field.values.at(piece));
  return f * scheme.exponents.weight(tau) / scheme.grading.derivative(tau);
}

}  // namespace revshell
