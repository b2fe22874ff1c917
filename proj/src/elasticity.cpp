#include "revshell/elasticity.hpp"

#include "revshell/discretization.hpp"
#include "revshell/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace revshell {

namespace {

constexpr double kPi = std::numbers::pi;

// P_j and its first three derivatives at xi, j = 0..degree.
struct Legendre {
  Eigen::VectorXd p, d1, d2, d3;
};

Legendre legendre(int degree, double xi) {
  Legendre out;
  out.p = Eigen::VectorXd::Zero(degree + 1);
  out.d1 = out.p;
  out.d2 = out.p;
  out.d3 = out.p;
  out.p[0] = 1.0;
  if (degree == 0) return out;
  out.p[1] = xi;
  out.d1[1] = 1.0;
  for (int n = 1; n < degree; ++n) {
    const double a = 2.0 * n + 1.0;
    out.p[n + 1] = (a * xi * out.p[n] - n * out.p[n - 1]) / (n + 1);
    out.d1[n + 1] = (a * (xi * out.d1[n] + out.p[n]) - n * out.d1[n - 1]) / (n + 1);
    out.d2[n + 1] = (a * (xi * out.d2[n] + 2.0 * out.d1[n]) - n * out.d2[n - 1]) / (n + 1);
    out.d3[n + 1] = (a * (xi * out.d3[n] + 3.0 * out.d2[n]) - n * out.d3[n - 1]) / (n + 1);
  }
  return out;
}

// Linear functionals of the local coefficients [a; b] at one point.
struct PointRows {
  SurfaceFrame frame;
  double curvature = 0.0;
  Eigen::RowVectorXd u, w, ur, uz, beta;
  Eigen::RowVectorXd eps_s, eps_theta, kappa_s, kappa_theta;
  Eigen::RowVectorXd dkappa_s, dkappa_theta;  // d/ds, used for the shear resultant
};

bool on_axis(const MeridianPoint& p, double scale) { return std::abs(p.r) <= 1e-12 * scale; }

PointRows point_rows(const Segment& seg, int degree, double xi) {
  const Legendre L = legendre(degree, xi);
  const Eigen::Index np = degree + 1;
  const double J = seg.jacobian();
  const double k = seg.curvature();
  PointRows out;
  out.frame = seg.frame(xi);
  out.curvature = k;
  const double r = out.frame.point.r;
  const double t_r = out.frame.tangent.x(), t_z = out.frame.tangent.y();
  const double n_r = out.frame.normal.x(), n_z = out.frame.normal.y();

  auto zero = [&] { return Eigen::RowVectorXd::Zero(2 * np); };
  out.u = zero();
  out.w = zero();
  out.u.head(np) = L.p.transpose();
  out.w.tail(np) = L.p.transpose();
  out.ur = t_r * out.u + n_r * out.w;
  out.uz = t_z * out.u + n_z * out.w;

  Eigen::RowVectorXd du = zero(), dw = zero(), d2u = zero(), d2w = zero(), d3w = zero();
  du.head(np) = L.d1.transpose() / J;
  d2u.head(np) = L.d2.transpose() / (J * J);
  dw.tail(np) = L.d1.transpose() / J;
  d2w.tail(np) = L.d2.transpose() / (J * J);
  d3w.tail(np) = L.d3.transpose() / (J * J * J);

  out.beta = dw - k * out.u;
  out.eps_s = du + k * out.w;
  out.kappa_s = d2w - k * du;
  out.dkappa_s = d3w - k * d2u;
  if (r > 0.0) {
    out.eps_theta = out.ur / r;
    out.kappa_theta = out.beta * (t_r / r);
    // d/ds (beta t_r / r) with dt_r/ds = -k n_r and dr/ds = t_r
    const Eigen::RowVectorXd dbeta = out.kappa_s;
    out.dkappa_theta = (dbeta * t_r - out.beta * k * n_r) / r - out.beta * (t_r * t_r / (r * r));
  } else {
    out.eps_theta = zero();
    out.kappa_theta = zero();
    out.dkappa_theta = zero();
  }
  return out;
}

Eigen::MatrixXd null_space_of(const Eigen::MatrixXd& c, Eigen::Index cols) {
  if (c.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  // rank revealing QR of c^T: the trailing columns of Q span ker(c)
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(c.transpose());
  qr.setThreshold(1e-11);
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, cols);
  return q.rightCols(cols - rank);
}

int quadrature_points(int degree) { return 2 * degree + 16; }

}  // namespace

void MaterialSpec::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (!(E > 0.0)) fail("material: E must be positive");
  if (!(nu >= 0.0 && nu < 0.5)) fail("material: nu must lie in [0, 0.5)");
  if (!(rho > 0.0)) fail("material: rho must be positive");
  if (!(h > 0.0)) fail("material: h must be positive");
}

BoundaryCondition parse_boundary_condition(const std::string& tag) {
  if (tag == "a") return BoundaryCondition::top_bottom_fixed;
  if (tag == "b") return BoundaryCondition::bottom_fixed;
  if (tag == "none") return BoundaryCondition::none;
  throw ValidationError("boundary condition must be a or b, got '" + tag + "'");
}

ShellModel assemble_shell(const Meridian& meridian, const MaterialSpec& material, int degree,
                          BoundaryCondition bc) {
  material.validate();
  if (degree < 3) throw ValidationError("basis degree must be >= 3");
  if (meridian.size() == 0) throw ValidationError("empty meridian");

  ShellModel model{meridian, material, RitzBasis{}, {}, {}, {}, {}, {}};
  RitzBasis& basis = model.basis;
  basis.degree = degree;
  basis.segments = meridian.size();
  basis.bc = bc;
  const Eigen::Index ps = basis.per_segment();
  const Eigen::Index n = basis.full_size();
  const double scale = meridian.total_length();

  for (std::size_t i = 0; i < meridian.size(); ++i) {
    const Segment& seg = meridian.segment(i);
    if (seg.kind() == SegmentKind::arc && material.h > seg.radius() / 10.0) {
      std::ostringstream msg;
      msg << "segment " << i + 1 << ": thickness exceeds a tenth of the curvature radius";
      model.warnings.push_back(msg.str());
    }
  }

  // stiffness and mass
  model.full_stiffness = Eigen::MatrixXd::Zero(n, n);
  model.full_mass = Eigen::MatrixXd::Zero(n, n);
  const double C = material.membrane_stiffness();
  const double D = material.bending_stiffness();
  const double nu = material.nu;
  const GaussRule gauss = gauss_legendre(quadrature_points(degree));
  for (std::size_t i = 0; i < meridian.size(); ++i) {
    const Segment& seg = meridian.segment(i);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ps, ps);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ps, ps);
    for (Eigen::Index g = 0; g < gauss.nodes.size(); ++g) {
      const PointRows pr = point_rows(seg, degree, gauss.nodes[g]);
      const double dA = gauss.weights[g] * seg.jacobian() * 2.0 * kPi * pr.frame.point.r;
      auto pair = [&](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
        return Eigen::MatrixXd(a.transpose() * a + nu * (a.transpose() * b + b.transpose() * a) +
                               b.transpose() * b);
      };
      K += dA * (C * pair(pr.eps_s, pr.eps_theta) + D * pair(pr.kappa_s, pr.kappa_theta));
      M += dA * material.rho * material.h *
           (pr.u.transpose() * pr.u + pr.w.transpose() * pr.w);
    }
    const Eigen::Index off = static_cast<Eigen::Index>(i) * ps;
    model.full_stiffness.block(off, off, ps, ps) = K;
    model.full_mass.block(off, off, ps, ps) = M;
  }

  // constraints
  std::vector<Eigen::RowVectorXd> rows;
  auto place = [&](std::size_t seg, const Eigen::RowVectorXd& local) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    row.segment(static_cast<Eigen::Index>(seg) * ps, ps) = local;
    return row;
  };
  auto clamp = [&](std::size_t seg, double xi) {
    const PointRows pr = point_rows(meridian.segment(seg), degree, xi);
    rows.push_back(place(seg, pr.ur));
    rows.push_back(place(seg, pr.uz));
    rows.push_back(place(seg, pr.beta));
  };
  auto fix_segment = [&](std::size_t seg) {
    for (Eigen::Index j = 0; j < ps; ++j) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
      row[static_cast<Eigen::Index>(seg) * ps + j] = 1.0;
      rows.push_back(row);
    }
  };

  for (std::size_t i = 0; i + 1 < meridian.size(); ++i) {
    const PointRows a = point_rows(meridian.segment(i), degree, 1.0);
    const PointRows b = point_rows(meridian.segment(i + 1), degree, -1.0);
    rows.push_back(place(i, a.ur) - place(i + 1, b.ur));
    rows.push_back(place(i, a.uz) - place(i + 1, b.uz));
    rows.push_back(place(i, a.beta) - place(i + 1, b.beta));
  }
  for (std::size_t i = 0; i < meridian.size(); ++i) {
    for (double xi : {-1.0, 1.0}) {
      const PointRows pr = point_rows(meridian.segment(i), degree, xi);
      if (on_axis(pr.frame.point, scale)) {
        rows.push_back(place(i, pr.ur));
        rows.push_back(place(i, pr.beta));
      }
    }
  }
  const std::size_t last = meridian.size() - 1;
  auto support = [&](std::size_t seg, double xi) {
    const bool axis = on_axis(meridian.segment(seg).point(xi), scale);
    if (axis && meridian.size() >= 2) {
      fix_segment(seg);
    } else {
      clamp(seg, xi);
    }
  };
  if (bc != BoundaryCondition::none) support(0, -1.0);
  if (bc == BoundaryCondition::top_bottom_fixed) support(last, 1.0);

  basis.constraints.resize(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    basis.constraints.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  basis.null_space = null_space_of(basis.constraints, n);
  if (basis.null_space.cols() == 0) throw ValidationError("constraints leave no free displacement");

  const Eigen::MatrixXd& Z = basis.null_space;
  model.stiffness = Z.transpose() * model.full_stiffness * Z;
  model.mass = Z.transpose() * model.full_mass * Z;
  model.stiffness = 0.5 * (model.stiffness + model.stiffness.transpose()).eval();
  model.mass = 0.5 * (model.mass + model.mass.transpose()).eval();
  return model;
}

ShellDisplacement displacement(const ShellModel& model, const Eigen::VectorXd& x,
                               std::size_t segment, double xi) {
  if (segment >= model.basis.segments) throw ValidationError("segment index out of range");
  if (x.size() != model.basis.full_size()) throw ValidationError("coefficient vector size mismatch");
  const Eigen::Index ps = model.basis.per_segment();
  const Eigen::VectorXd local = x.segment(static_cast<Eigen::Index>(segment) * ps, ps);
  const PointRows pr = point_rows(model.meridian.segment(segment), model.basis.degree, xi);
  return {pr.u.dot(local), pr.w.dot(local), pr.ur.dot(local), pr.uz.dot(local),
          pr.beta.dot(local)};
}

double strain_energy(const ShellModel& model, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(model.full_stiffness * x);
}

DryModes dry_modes(const ShellModel& model, int count) {
  const Eigen::Index dim = model.stiffness.rows();
  if (count < 1 || count > dim) {
    std::ostringstream msg;
    msg << "mode count " << count << " outside [1, " << dim << "]";
    throw ValidationError(msg.str());
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.stiffness, model.mass);
  if (solver.info() != Eigen::Success) throw NumericalError("dry eigenproblem did not converge");
  DryModes out;
  out.omega2 = solver.eigenvalues().head(count);
  out.reduced = solver.eigenvectors().leftCols(count);
  // fix the sign: largest normal displacement coefficient positive
  for (Eigen::Index k = 0; k < count; ++k) {
    Eigen::Index idx;
    out.reduced.col(k).cwiseAbs().maxCoeff(&idx);
    if (out.reduced(idx, k) < 0.0) out.reduced.col(k) *= -1.0;
  }
  out.shapes = model.basis.null_space * out.reduced;
  const Eigen::MatrixXd ortho =
      out.reduced.transpose() * model.mass * out.reduced - Eigen::MatrixXd::Identity(count, count);
  out.max_orthogonality_error = ortho.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::VectorXd kv = model.stiffness * out.reduced.col(k);
    const Eigen::VectorXd res = kv - out.omega2[k] * (model.mass * out.reduced.col(k));
    const double denom = std::max(kv.norm(), 1e-300);
    out.max_residual = std::max(out.max_residual, res.norm() / denom);
  }
  if (out.max_residual > 1e-8) {
    std::ostringstream msg;
    msg << "dry eigenpairs inaccurate, residual " << out.max_residual;
    throw NumericalError(msg.str());
  }
  if ((out.omega2.array() < -1e-8 * std::abs(out.omega2[count - 1])).any()) {
    throw NumericalError("negative dry eigenvalue: the structure is not properly supported");
  }
  return out;
}

std::function<double(std::size_t, double)> normal_field(const ShellModel& model,
                                                        const Eigen::VectorXd& x) {
  return [&model, x](std::size_t segment, double xi) {
    return displacement(model, x, segment, xi).w;
  };
}

Eigen::VectorXd load_vector(const ShellModel& model, const SurfaceLoad& load) {
  const Eigen::Index ps = model.basis.per_segment();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(model.basis.full_size());
  const GaussRule gauss = gauss_legendre(quadrature_points(model.basis.degree));
  for (std::size_t i = 0; i < model.basis.segments; ++i) {
    const Segment& seg = model.meridian.segment(i);
    Eigen::VectorXd local = Eigen::VectorXd::Zero(ps);
    for (Eigen::Index g = 0; g < gauss.nodes.size(); ++g) {
      const double xi = gauss.nodes[g];
      const PointRows pr = point_rows(seg, model.basis.degree, xi);
      const double dA = gauss.weights[g] * seg.jacobian() * 2.0 * kPi * pr.frame.point.r;
      if (load.normal) local += dA * load.normal(i, xi) * pr.w.transpose();
      if (load.meridional) local += dA * load.meridional(i, xi) * pr.u.transpose();
    }
    f.segment(static_cast<Eigen::Index>(i) * ps, ps) = local;
  }
  return f;
}

double modal_force(const ShellModel& model, const Eigen::VectorXd& x, const SurfaceLoad& load) {
  if (x.size() != model.basis.full_size()) throw ValidationError("coefficient vector size mismatch");
  return load_vector(model, load).dot(x);
}

std::vector<JunctionResidual> junction_force_balance(const ShellModel& model,
                                                     const Eigen::VectorXd& x) {
  const Eigen::Index ps = model.basis.per_segment();
  const double C = model.material.membrane_stiffness();
  const double D = model.material.bending_stiffness();
  const double nu = model.material.nu;
  // (F_r, F_z, M_s) at one end of one segment
  auto resultants = [&](std::size_t seg, double xi) {
    const Eigen::VectorXd local = x.segment(static_cast<Eigen::Index>(seg) * ps, ps);
    const PointRows pr = point_rows(model.meridian.segment(seg), model.basis.degree, xi);
    const double r = pr.frame.point.r;
    const double t_r = pr.frame.tangent.x();
    const double eps_s = pr.eps_s.dot(local), eps_t = pr.eps_theta.dot(local);
    const double ks = pr.kappa_s.dot(local), kt = pr.kappa_theta.dot(local);
    const double N_s = C * (eps_s + nu * eps_t);
    const double M_s = D * (ks + nu * kt);
    const double M_t = D * (kt + nu * ks);
    const double dM_s = D * (pr.dkappa_s.dot(local) + nu * pr.dkappa_theta.dot(local));
    const double Q = dM_s + t_r * (M_s - M_t) / r;
    const Eigen::Vector2d F = N_s * pr.frame.tangent - Q * pr.frame.normal;
    return Eigen::Vector3d(F.x(), F.y(), M_s);
  };
  // a fully constrained segment carries a support reaction, not a junction force
  auto fixed = [&](std::size_t seg) {
    return model.basis.null_space.middleRows(static_cast<Eigen::Index>(seg) * ps, ps).norm() < 1e-12;
  };
  std::vector<JunctionResidual> out;
  for (std::size_t i = 0; i + 1 < model.basis.segments; ++i) {
    if (fixed(i) || fixed(i + 1)) continue;
    const Eigen::Vector3d left = resultants(i, 1.0);
    const Eigen::Vector3d right = resultants(i + 1, -1.0);
    JunctionResidual res;
    res.node = i;
    res.jump = left - right;
    const double scale = std::max(left.norm(), right.norm());
    res.relative = scale > 0.0 ? res.jump.norm() / scale : 0.0;
    out.push_back(res);
  }
  return out;
}

double normal_participation(const ShellModel& model, const Eigen::VectorXd& x) {
  const GaussRule gauss = gauss_legendre(quadrature_points(model.basis.degree));
  double ww = 0.0, total = 0.0;
  for (std::size_t i = 0; i < model.basis.segments; ++i) {
    const Segment& seg = model.meridian.segment(i);
    for (Eigen::Index g = 0; g < gauss.nodes.size(); ++g) {
      const ShellDisplacement d = displacement(model, x, i, gauss.nodes[g]);
      const double dA = gauss.weights[g] * seg.jacobian() * seg.point(gauss.nodes[g]).r;
      ww += dA * d.w * d.w;
      total += dA * (d.u * d.u + d.w * d.w);
    }
  }
  return total > 0.0 ? ww / total : 0.0;
}

}  // namespace revshell
