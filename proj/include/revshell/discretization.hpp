#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace revshell {

/// Chebyshev polynomial of the second kind U_n(t) by the three-term recurrence.
template <typename Scalar>
Scalar chebyshev_u(int degree, Scalar t) {
  if (degree < 0) return Scalar(0);
  Scalar prev = 1;
  Scalar cur = 2 * t;
  if (degree == 0) return prev;
  for (int k = 1; k < degree; ++k) {
    const Scalar next = 2 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <typename Scalar>
Scalar chebyshev_t(int degree, Scalar t) {
  if (degree == 0) return Scalar(1);
  Scalar prev = 1;
  Scalar cur = t;
  for (int k = 1; k < degree; ++k) {
    const Scalar next = 2 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Zeros of U_{n-1}: t_k = cos(k pi / n), k = 1..n-1, strictly decreasing.
struct ChebGrid {
  int n = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd barycentric;  // (-1)^k sin^2(k pi / n)
  Eigen::VectorXd weights;      // interpolatory weights of \int_{-1}^{1} h(t) dt

  Eigen::Index size() const { return nodes.size(); }
};

ChebGrid cheb_nodes(int n);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussRule gauss_legendre(int points);

/// Lagrange basis of the grid evaluated at t (barycentric formula).
void lagrange_basis(const ChebGrid& grid, double t, Eigen::Ref<Eigen::VectorXd> out);
Eigen::VectorXd lagrange_basis(const ChebGrid& grid, double t);

/// Density weight (1 + t)^beta_left (1 - t)^beta_right.
struct EndpointExponents {
  double beta_left = 0.0;
  double beta_right = 0.0;

  static EndpointExponents canonical() { return {0.5, 0.5}; }
  double weight(double t) const;
  bool singular() const { return beta_left < 0.0 || beta_right < 0.0; }
};

/// Density exponent at a node with interior angle alpha: 0 for alpha <= pi,
/// pi/alpha - 1 for pi < alpha < 2 pi. alpha = 2 pi (internal edge) throws.
double corner_exponent(double alpha);

/// Polynomial change of variables u = psi(tau) on [-1, 1] that flattens the
/// map at graded endpoints: near a graded end, 1 +- u ~ (1 +- tau)^order.
class EndpointGrading {
 public:
  EndpointGrading() = default;
  EndpointGrading(int left_order, int right_order);

  int left() const { return left_; }
  int right() const { return right_; }
  bool identity() const { return left_ == 1 && right_ == 1; }

  double map(double tau) const;
  double derivative(double tau) const;
  /// map(tau + delta) - map(tau), accurate for small delta.
  double difference(double tau, double delta) const;
  double inverse(double u) const;

 private:
  double unit(double x) const;        // [0,1] -> [0,1]
  double unit_prime(double x) const;  // d unit / dx
  int left_ = 1;
  int right_ = 1;
};

/// One node of a tanh-sinh rule on [a, b]. Offsets from both ends are kept
/// separately so that nodes crowding an endpoint stay distinguishable.
struct TanhSinhNode {
  double from_a = 0.0;
  double from_b = 0.0;
  double weight = 0.0;
};

/// Double-exponential rule with step h, dropping nodes closer than `cutoff`
/// (absolute) to either end.
std::vector<TanhSinhNode> tanh_sinh_rule(double a, double b, double h, double cutoff = 1e-100);

/// Weights W_k with sum_k W_k P(t_k) = \int ln(1/|t - t0|) w(t) P(t) dt for every
/// polynomial of degree <= n - 2, where t0 = grid.nodes[node] and w is the
/// exponent weight. The canonical weight sqrt(1 - t^2) uses closed forms;
/// other weights are integrated by the double-exponential rule.
Eigen::VectorXd log_quadrature_row(const ChebGrid& grid, Eigen::Index node,
                                   const EndpointExponents& weight = EndpointExponents::canonical());

/// Per-piece discretization data of a boundary density.
struct PieceScheme {
  ChebGrid grid;
  EndpointExponents exponents;  // applied in the collocation variable tau
  EndpointGrading grading;
};

/// Single-layer density over a set of boundary pieces. On each piece
/// g(u) = f(tau) w(tau) / psi'(tau) with u = psi(tau); f is stored at the grid nodes.
struct DensityField {
  int m = 0;
  std::vector<PieceScheme> schemes;
  std::vector<Eigen::VectorXd> values;
};

/// g at geometric segment parameter t of piece `piece`.
double interpolate_density(const DensityField& field, std::size_t piece, double t);

}  // namespace revshell
