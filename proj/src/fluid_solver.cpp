#include "revshell/fluid_solver.hpp"

#include "revshell/errors.hpp"
#include "revshell/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace revshell {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelGauss = 16;
constexpr double kNearRatio = 0.5;
constexpr double kDeCutoff = 1e-30;

bool straight_angle(double alpha) { return std::abs(alpha - kPi) < 1e-10; }

double weight_at(const EndpointExponents& e, double one_plus, double one_minus) {
  double w = 1.0;
  if (e.beta_left != 0.0) w *= std::pow(one_plus, e.beta_left);
  if (e.beta_right != 0.0) w *= std::pow(one_minus, e.beta_right);
  return w;
}

// Everything the inner loop needs about one quadrature node.
struct NodeSample {
  double tau = 0.0;
  Eigen::Vector2d sep;  // x - y
  double r_src = 0.0;
  double weight = 0.0;  // dtau weight * w * ds/du
};

struct RowTarget {
  int m = 0;
  const SurfaceFrame* x = nullptr;
  bool want_dn = false;
};

}  // namespace

BoundaryDiscretization::BoundaryDiscretization(const Meridian& meridian,
                                               const BoundaryOptions& options)
    : options_(options) {
  if (!meridian.has_liquid()) throw ValidationError("fluid problem needs a fill level");
  if (options.n < 4) throw ValidationError("Chebyshev parameter n must be >= 4");
  if (options.grading_order < 1) throw ValidationError("grading order must be >= 1");
  if (!(options.de_step > 0.0)) throw ValidationError("tanh-sinh step must be positive");

  pieces_ = meridian.wetted();
  angles_ = meridian.wetted_angles();
  const std::size_t count = pieces_.size();

  // classify piece ends
  for (std::size_t p = 0; p < count; ++p) {
    PieceScheme scheme;
    scheme.grid = cheb_nodes(options.n);
    int left = 1, right = 1;
    EndpointExponents e;
    if (p > 0) {
      const double alpha = angles_[p - 1];
      const double beta = corner_exponent(alpha);
      if (!straight_angle(alpha)) {
        if (options.grading_order > 1) {
          left = options.grading_order;
        } else {
          e.beta_left = beta;
        }
      }
    }
    if (p + 1 < count) {
      const double alpha = angles_[p];
      const double beta = corner_exponent(alpha);
      if (!straight_angle(alpha)) {
        if (options.grading_order > 1) {
          right = options.grading_order;
        } else {
          e.beta_right = beta;
        }
      }
    }
    scheme.exponents = e;
    scheme.grading = EndpointGrading(left, right);
    schemes_.push_back(scheme);
  }

  // collocation nodes
  Eigen::Index offset = 0;
  for (std::size_t p = 0; p < count; ++p) {
    offsets_.push_back(offset);
    const PieceScheme& s = schemes_[p];
    const Segment& geo = pieces_[p].geometry;
    for (Eigen::Index k = 0; k < s.grid.size(); ++k) {
      BoundaryNode node;
      node.piece = p;
      node.local = k;
      node.tau = s.grid.nodes[k];
      node.t = s.grading.map(node.tau);
      node.frame = geo.frame(node.t);
      const double dpsi = s.grading.derivative(node.tau);
      node.row_scale = dpsi / s.exponents.weight(node.tau);
      node.quad_weight = s.grid.weights[k] * node.frame.point.r * dpsi * geo.jacobian();
      nodes_.push_back(node);
    }
    offset += s.grid.size();
  }

  // far-field panel rules
  const GaussRule gauss = gauss_legendre(kPanelGauss);
  const int panels = std::max(4, options.n / 2);
  for (std::size_t p = 0; p < count; ++p) {
    const PieceScheme& s = schemes_[p];
    const Segment& geo = pieces_[p].geometry;
    PieceQuadrature q;
    q.points_per_panel = kPanelGauss;
    for (int j = 0; j <= panels; ++j) q.breaks.push_back(-std::cos(j * kPi / panels));
    q.breaks.front() = -1.0;
    q.breaks.back() = 1.0;
    for (int j = 0; j < panels; ++j) {
      const double a = q.breaks[j], b = q.breaks[j + 1];
      const double half = 0.5 * (b - a);
      for (int g = 0; g < kPanelGauss; ++g) {
        const double tau = a + half * (1.0 + gauss.nodes[g]);
        q.tau.push_back(tau);
        q.point.push_back(geo.point(s.grading.map(tau)));
        q.weight.push_back(gauss.weights[g] * half * s.exponents.weight(tau) * geo.jacobian());
      }
    }
    q.basis.resize(static_cast<Eigen::Index>(q.tau.size()), s.grid.size());
    for (std::size_t i = 0; i < q.tau.size(); ++i) {
      Eigen::VectorXd row = lagrange_basis(s.grid, q.tau[i]);
      q.basis.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    quadrature_.push_back(std::move(q));
  }

  // closed outline of D for inside tests
  for (const auto& piece : pieces_) {
    const int samples = piece.geometry.kind() == SegmentKind::arc ? 400 : 1;
    for (int j = 0; j < samples; ++j) {
      outline_.push_back(piece.geometry.point(-1.0 + 2.0 * j / samples).vec());
    }
  }
  outline_.push_back(pieces_.back().geometry.end().vec());
}

double BoundaryDiscretization::free_surface_moment() const {
  double s = 0.0;
  for (const auto& node : nodes_) {
    if (node.piece == free_surface_piece()) s += node.quad_weight;
  }
  return s;
}

namespace {

// Adds the contribution of one node to the rows of piece q.
void accumulate(const RowTarget& target, const PieceScheme& scheme, const NodeSample& s,
                const Eigen::VectorXd& basis, Eigen::Ref<Eigen::VectorXd> green,
                Eigen::VectorXd* dn, Eigen::Index offset) {
  const double d2 = s.sep.squaredNorm();
  if (!(d2 > 0.0) || s.weight == 0.0) return;
  const SurfaceFrame& x = *target.x;
  const Eigen::Index len = scheme.grid.size();
  if (target.want_dn) {
    const auto k = ring_kernel(target.m, x.point.r, s.r_src, d2, s.sep.dot(x.normal), x.normal.x());
    const double scale = s.weight * s.r_src;
    green.segment(offset, len) += (scale * k.green) * basis;
    dn->segment(offset, len) += (scale * k.normal_derivative) * basis;
  } else {
    const double gval = ring_kernel_green(target.m, x.point.r, s.r_src, d2);
    green.segment(offset, len) += (s.weight * s.r_src * gval) * basis;
  }
}

}  // namespace

void BoundaryDiscretization::layer_rows(int m, const SurfaceFrame& x,
                                        std::optional<std::pair<std::size_t, double>> anchor,
                                        Eigen::Ref<Eigen::VectorXd> green,
                                        Eigen::VectorXd* normal_derivative) const {
  green.setZero();
  if (normal_derivative) {
    normal_derivative->resize(size());
    normal_derivative->setZero();
    if (!(x.point.r > 0.0)) throw DomainError("normal derivative row requested on the axis");
  }
  RowTarget target{m, &x, normal_derivative != nullptr};
  const Eigen::Vector2d xv = x.point.vec();

  for (std::size_t p = 0; p < pieces_.size(); ++p) {
    const PieceScheme& scheme = schemes_[p];
    const PieceQuadrature& quad = quadrature_[p];
    const Segment& geo = pieces_[p].geometry;
    const Eigen::Index off = offsets_[p];
    const bool anchored = anchor && anchor->first == p;
    const int panels = static_cast<int>(quad.breaks.size()) - 1;
    const int ppp = quad.points_per_panel;

    // nearest point of the piece
    double tau_star = 0.0;
    double d_star = 0.0;
    if (anchored) {
      tau_star = anchor->second;
    } else {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < quad.tau.size(); ++i) {
        const double d = (xv - quad.point[i].vec()).squaredNorm();
        if (d < best) {
          best = d;
          best_i = i;
        }
      }
      double lo = best_i == 0 ? -1.0 : quad.tau[best_i - 1];
      double hi = best_i + 1 == quad.tau.size() ? 1.0 : quad.tau[best_i + 1];
      auto dist = [&](double tau) {
        return (xv - geo.point(scheme.grading.map(tau)).vec()).squaredNorm();
      };
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
      double fc = dist(c), fd = dist(d);
      for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - gr * (hi - lo);
          fc = dist(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + gr * (hi - lo);
          fd = dist(d);
        }
      }
      tau_star = 0.5 * (lo + hi);
      d_star = std::sqrt(dist(tau_star));
      const double d_left = std::sqrt(dist(-1.0)), d_right = std::sqrt(dist(1.0));
      if (d_left < d_star) {
        tau_star = -1.0;
        d_star = d_left;
      }
      if (d_right < d_star) {
        tau_star = 1.0;
        d_star = d_right;
      }
    }
    const double u_anchor = anchored ? scheme.grading.map(tau_star) : 0.0;

    Eigen::VectorXd far_coeff_g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(quad.tau.size()));
    Eigen::VectorXd far_coeff_n = far_coeff_g;
    Eigen::VectorXd basis(scheme.grid.size());

    auto de_panel = [&](double a, double b) {
      for (const auto& nd : tanh_sinh_rule(a, b, options_.de_step, kDeCutoff)) {
        // keep the offset from the anchor exact
        double tau, delta = 0.0;
        if (anchored && a == tau_star) {
          tau = a + nd.from_a;
          delta = nd.from_a;
        } else if (anchored && b == tau_star) {
          tau = b - nd.from_b;
          delta = -nd.from_b;
        } else {
          tau = nd.from_a < nd.from_b ? a + nd.from_a : b - nd.from_b;
          delta = tau - tau_star;
        }
        const double one_plus = a == -1.0 && nd.from_a < nd.from_b ? nd.from_a : 1.0 + tau;
        const double one_minus = b == 1.0 && nd.from_b <= nd.from_a ? nd.from_b : 1.0 - tau;
        NodeSample s;
        s.tau = tau;
        const MeridianPoint y = geo.point(scheme.grading.map(tau));
        s.r_src = std::max(0.0, y.r);
        if (anchored) {
          s.sep = -geo.offset(u_anchor, scheme.grading.difference(tau_star, delta));
        } else {
          s.sep = xv - y.vec();
        }
        s.weight = nd.weight * weight_at(scheme.exponents, one_plus, one_minus) * geo.jacobian();
        lagrange_basis(scheme.grid, tau, basis);
        accumulate(target, scheme, s, basis, green, normal_derivative, off);
      }
    };

    for (int j = 0; j < panels; ++j) {
      const double a = quad.breaks[j], b = quad.breaks[j + 1];
      const std::size_t first = static_cast<std::size_t>(j) * ppp;
      bool near = tau_star >= a && tau_star <= b && (anchored || d_star == 0.0);
      if ((j == 0 && scheme.exponents.beta_left != 0.0) ||
          (j == panels - 1 && scheme.exponents.beta_right != 0.0)) {
        near = true;
      }
      if (!near) {
        const Eigen::Vector2d pa = geo.point(scheme.grading.map(a)).vec();
        const Eigen::Vector2d pb = geo.point(scheme.grading.map(b)).vec();
        double dist = std::min((xv - pa).norm(), (xv - pb).norm());
        double length = 0.0;
        Eigen::Vector2d prev = pa;
        for (int g = 0; g < ppp; ++g) {
          const Eigen::Vector2d pt = quad.point[first + g].vec();
          dist = std::min(dist, (xv - pt).norm());
          length += (pt - prev).norm();
          prev = pt;
        }
        length += (pb - prev).norm();
        if (tau_star >= a && tau_star <= b) dist = std::min(dist, d_star);
        near = dist < kNearRatio * length;
      }
      if (near) {
        if (tau_star > a && tau_star < b) {
          de_panel(a, tau_star);
          de_panel(tau_star, b);
        } else {
          de_panel(a, b);
        }
        continue;
      }
      for (int g = 0; g < ppp; ++g) {
        const std::size_t i = first + g;
        const Eigen::Vector2d sep = xv - quad.point[i].vec();
        const double d2 = sep.squaredNorm();
        const double r_src = std::max(0.0, quad.point[i].r);
        const double scale = quad.weight[i] * r_src;
        const auto ii = static_cast<Eigen::Index>(i);
        if (target.want_dn) {
          const auto k = ring_kernel(m, x.point.r, r_src, d2, sep.dot(x.normal), x.normal.x());
          far_coeff_g[ii] = scale * k.green;
          far_coeff_n[ii] = scale * k.normal_derivative;
        } else {
          far_coeff_g[ii] = scale * ring_kernel_green(m, x.point.r, r_src, d2);
        }
      }
    }
    const Eigen::Index len = scheme.grid.size();
    green.segment(off, len) += quad.basis.transpose() * far_coeff_g;
    if (normal_derivative) normal_derivative->segment(off, len) += quad.basis.transpose() * far_coeff_n;
  }
}

NeumannData neumann_from_function(const BoundaryDiscretization& disc, int m,
                                  const std::function<double(const SurfaceFrame&)>& flux) {
  NeumannData data;
  data.m = m;
  data.values.resize(disc.size());
  for (Eigen::Index i = 0; i < disc.size(); ++i) {
    const BoundaryNode& node = disc.nodes()[static_cast<std::size_t>(i)];
    data.values[i] = flux(node.frame);
    data.flux_residual += node.quad_weight * data.values[i];
    data.flux_scale += node.quad_weight * std::abs(data.values[i]);
  }
  return data;
}

NeumannData build_neumann_data(const BoundaryDiscretization& disc, int m, const WallField& wall,
                               const RigidMotion& rigid, double rho_liquid) {
  if (m < 0) throw ValidationError("harmonic index must be non-negative");
  if (disc.pieces().size() < 2) throw ValidationError("no wetted surface");
  const std::size_t sigma = disc.free_surface_piece();

  std::vector<double> wall_accel(disc.nodes().size(), 0.0);
  double wall_flux = 0.0;
  for (std::size_t i = 0; i < disc.nodes().size(); ++i) {
    const BoundaryNode& node = disc.nodes()[i];
    if (node.piece == sigma) continue;
    const BoundaryPiece& piece = disc.pieces()[node.piece];
    if (wall) {
      wall_accel[i] = wall(static_cast<std::size_t>(piece.segment), piece.segment_parameter(node.t));
    }
    wall_flux += node.quad_weight * wall_accel[i];
  }

  NeumannData data;
  data.m = m;
  if (m == 0) data.free_surface_accel = -wall_flux / disc.free_surface_moment();
  data.values.resize(disc.size());
  for (std::size_t i = 0; i < disc.nodes().size(); ++i) {
    const BoundaryNode& node = disc.nodes()[i];
    const SurfaceFrame& f = node.frame;
    const double r = f.point.r, z = f.point.z;
    const double n_r = f.normal.x(), n_z = f.normal.y();
    double rigid_term = 0.0;
    if (m == 0) rigid_term = rigid.axial * n_z;
    if (m == 1) rigid_term = rigid.lateral * n_r + rigid.pitch * (z * n_r - r * n_z);
    double accel = rigid_term + wall_accel[i];
    if (node.piece == sigma) accel = rigid_term + data.free_surface_accel;
    const double value = -rho_liquid * accel;
    data.values[static_cast<Eigen::Index>(i)] = value;
    data.flux_residual += node.quad_weight * value;
    data.flux_scale += node.quad_weight * std::abs(value);
  }
  return data;
}

BIESystem assemble(std::shared_ptr<const BoundaryDiscretization> disc, int m) {
  if (!disc) throw ValidationError("assemble: no discretization");
  if (m < 0) throw ValidationError("harmonic index must be non-negative");
  const Eigen::Index n = disc->size();
  BIESystem sys;
  sys.m = m;
  sys.disc = disc;
  sys.matrix.resize(n, n);
  sys.single_layer.resize(n, n);
  sys.nullspace = m == 0;

  Eigen::VectorXd green(n), dn(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const BoundaryNode& node = disc->nodes()[static_cast<std::size_t>(i)];
    disc->layer_rows(m, node.frame, std::make_pair(node.piece, node.tau), green, &dn);
    sys.single_layer.row(i) = green.transpose();
    sys.matrix.row(i) = node.row_scale * dn.transpose();
    sys.matrix(i, i) += 1.0;
  }

  if (m == 0) {
    const std::size_t sigma = disc->free_surface_piece();
    sys.gauge = Eigen::RowVectorXd::Zero(n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const BoundaryNode& node = disc->nodes()[static_cast<std::size_t>(i)];
      if (node.piece != sigma) continue;
      sys.gauge += node.quad_weight * sys.single_layer.row(i);
      total += node.quad_weight;
    }
    if (!(total > 0.0)) throw NumericalError("gauge unfixable: no free surface");
    sys.gauge /= total;

    Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(n + 1, n + 1);
    bordered.topLeftCorner(n, n) = sys.matrix;
    for (Eigen::Index i = 0; i < n; ++i) {
      bordered(i, n) = disc->nodes()[static_cast<std::size_t>(i)].row_scale;
    }
    bordered.block(n, 0, 1, n) = sys.gauge;
    sys.lu.compute(bordered);
  } else {
    sys.lu.compute(sys.matrix);
  }
  sys.rcond = sys.lu.rcond();
  if (!(sys.rcond > 1e-14)) {
    std::ostringstream msg;
    msg << "boundary integral matrix singular (rcond " << sys.rcond << ")";
    throw NumericalError(msg.str());
  }
  return sys;
}

PressureField solve(const BIESystem& system, const NeumannData& data, double gauge_value) {
  const auto& disc = *system.disc;
  const Eigen::Index n = disc.size();
  if (data.values.size() != n) throw ValidationError("Neumann data does not match the system");
  if (data.m != system.m) throw ValidationError("Neumann data harmonic does not match the system");

  Eigen::VectorXd rhs(system.nullspace ? n + 1 : n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs[i] = disc.nodes()[static_cast<std::size_t>(i)].row_scale * data.values[i];
  }
  if (system.nullspace) rhs[n] = gauge_value;
  const Eigen::VectorXd sol = system.lu.solve(rhs);
  if (!sol.allFinite()) throw NumericalError("boundary integral solve produced non-finite values");

  PressureField field;
  field.m = system.m;
  field.disc = system.disc;
  field.unknowns = sol.head(n);
  if (system.nullspace) field.multiplier = sol[n];
  field.trace = system.single_layer * field.unknowns;
  field.density.m = system.m;
  field.density.schemes = disc.schemes();
  for (std::size_t p = 0; p < disc.pieces().size(); ++p) {
    field.density.values.push_back(field.unknowns.segment(disc.offset(p), disc.schemes()[p].grid.size()));
  }
  return field;
}

bool inside_fluid(const BoundaryDiscretization& disc, MeridianPoint p) {
  if (p.r < 0.0) return false;
  const auto& poly = disc.outline();
  bool inside = false;
  // polygon closes along the axis back to the first vertex
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[j];
    if ((a.y() > p.z) != (b.y() > p.z)) {
      const double r_cross = a.x() + (p.z - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.r < r_cross) inside = !inside;
    }
  }
  return inside;
}

Eigen::VectorXd evaluate_pressure_at(const PressureField& field,
                                     const std::vector<MeridianPoint>& probes) {
  const auto& disc = *field.disc;
  Eigen::VectorXd out(static_cast<Eigen::Index>(probes.size()));
  Eigen::VectorXd green(disc.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const MeridianPoint p = probes[i];
    if (!inside_fluid(disc, p)) {
      std::ostringstream msg;
      msg << "probe (" << p.r << ", " << p.z << ") lies outside the fluid domain";
      throw DomainError(msg.str());
    }
    SurfaceFrame frame;
    frame.point = p;
    frame.tangent = Eigen::Vector2d(0.0, 1.0);
    frame.normal = Eigen::Vector2d(1.0, 0.0);
    disc.layer_rows(field.m, frame, std::nullopt, green, nullptr);
    out[static_cast<Eigen::Index>(i)] = green.dot(field.unknowns);
  }
  return out;
}

double evaluate_trace(const PressureField& field, std::size_t piece, double t) {
  const auto& disc = *field.disc;
  if (piece >= disc.pieces().size()) throw ValidationError("trace piece out of range");
  if (std::abs(t) > 1.0) throw ValidationError("trace parameter outside [-1, 1]");
  const PieceScheme& scheme = disc.schemes()[piece];
  const double tau = scheme.grading.inverse(t);
  const SurfaceFrame frame = disc.pieces()[piece].geometry.frame(scheme.grading.map(tau));
  Eigen::VectorXd green(disc.size());
  disc.layer_rows(field.m, frame, std::make_pair(piece, tau), green, nullptr);
  return green.dot(field.unknowns);
}

Eigen::VectorXd node_density(const PressureField& field) {
  const auto& nodes = field.disc->nodes();
  Eigen::VectorXd g(field.unknowns.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g[i] = field.unknowns[i] / nodes[static_cast<std::size_t>(i)].row_scale;
  }
  return g;
}

AddedMassResult added_mass(const BIESystem& system, const std::vector<WallField>& modes,
                           double rho_liquid) {
  if (modes.empty()) throw ValidationError("added mass needs at least one mode");
  if (system.m != 0) throw ValidationError("added mass is assembled for the axisymmetric harmonic");
  const auto& disc = *system.disc;
  const std::size_t sigma = disc.free_surface_piece();
  const auto count = static_cast<Eigen::Index>(modes.size());

  // mode shapes at the wall nodes
  Eigen::MatrixXd shape = Eigen::MatrixXd::Zero(disc.size(), count);
  for (Eigen::Index i = 0; i < disc.size(); ++i) {
    const BoundaryNode& node = disc.nodes()[static_cast<std::size_t>(i)];
    if (node.piece == sigma) continue;
    const BoundaryPiece& piece = disc.pieces()[node.piece];
    for (Eigen::Index k = 0; k < count; ++k) {
      shape(i, k) = modes[static_cast<std::size_t>(k)](static_cast<std::size_t>(piece.segment),
                                                      piece.segment_parameter(node.t));
    }
  }

  AddedMassResult out;
  out.matrix.resize(count, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const NeumannData data =
        build_neumann_data(disc, 0, modes[static_cast<std::size_t>(k)], RigidMotion{}, rho_liquid);
    out.flux_residuals.push_back(data.flux_residual);
    PressureField field = solve(system, data, 0.0);
    for (Eigen::Index j = 0; j < count; ++j) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < disc.size(); ++i) {
        const BoundaryNode& node = disc.nodes()[static_cast<std::size_t>(i)];
        if (node.piece == sigma) continue;
        s += node.quad_weight * field.trace[i] * shape(i, j);
      }
      out.matrix(j, k) = -2.0 * kPi * s;
    }
    out.fields.push_back(std::move(field));
  }
  const double norm = out.matrix.norm();
  out.asymmetry = norm > 0.0 ? (out.matrix - out.matrix.transpose()).norm() / norm : 0.0;
  return out;
}

}  // namespace revshell
