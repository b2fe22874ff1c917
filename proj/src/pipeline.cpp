#include "revshell/pipeline.hpp"

#include "revshell/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace revshell {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Probe resolved against the shell and the fluid domain.
struct ResolvedProbe {
  std::string name;
  MeridianPoint point;          // where the pressure is read
  MeridianLocation shell;       // where the displacement is read
  enum { interior, boundary, dry } where = dry;
  std::size_t piece = 0;
  double t = 0.0;
};

ResolvedProbe resolve_probe(const Analysis& a, const ProbeSpec& spec) {
  ResolvedProbe p;
  p.name = spec.name;
  if (spec.point) {
    p.point = *spec.point;
    p.shell = locate(a.meridian, p.point);
  } else {
    p.shell = locate_arclength(a.meridian, *spec.arclength);
    p.point = p.shell.point;
  }
  if (!a.disc) return p;
  const double tol = 1e-9 * std::max(1.0, a.meridian.total_length());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.disc->pieces().size(); ++i) {
    const auto [t, d] = nearest_parameter(a.disc->pieces()[i].geometry, p.point);
    if (d < best) {
      best = d;
      p.piece = i;
      p.t = t;
    }
  }
  if (best <= tol) p.where = ResolvedProbe::boundary;
  else if (inside_fluid(*a.disc, p.point)) p.where = ResolvedProbe::interior;
  return p;
}

std::string probe_file_name(const std::string& kind, const std::string& probe) {
  return kind + "_" + probe + ".csv";
}

std::string probe_metadata(const ResolvedProbe& p) {
  std::ostringstream o;
  o << "# probe " << p.name << " at r = " << short_num(p.point.r) << " m, z = " << short_num(p.point.z) << " m\n";
  return o.str();
}

std::string modes_csv(const Eigen::VectorXd& omega2, const std::string& title) {
  std::ostringstream o;
  o << "# " << title << ", axisymmetric harmonic m = 0\n";
  o << "index,omega_rad_s,frequency_hz\n";
  for (Eigen::Index k = 0; k < omega2.size(); ++k) {
    const double w = std::sqrt(std::max(0.0, omega2[k]));
    o << k + 1 << "," << num(w) << "," << num(w / (2.0 * std::numbers::pi)) << "\n";
  }
  return o.str();
}

std::string series_csv(const std::string& meta, const std::string& column, const std::vector<double>& t,
                       const Eigen::VectorXd& v) {
  std::ostringstream o;
  o << meta;
  o << "t_s," << column << "\n";
  for (std::size_t i = 0; i < t.size(); ++i) o << num(t[i]) << "," << num(v[static_cast<Eigen::Index>(i)]) << "\n";
  return o.str();
}

void report_header(std::ostringstream& r, const Analysis& a) {
  r << "revshell-hydro report\n";
  r << "analysis class: " << to_string(a.config.analysis) << "\n";
  r << "shell segments:\n";
  for (std::size_t i = 0; i < a.meridian.size(); ++i) {
    const Segment& s = a.meridian.segment(i);
    r << "  " << i << " " << to_string(s.surface_kind()) << " from (" << short_num(s.start().r) << ", "
      << short_num(s.start().z) << ") to (" << short_num(s.end().r) << ", " << short_num(s.end().z)
      << "), length " << short_num(s.length()) << " m\n";
  }
  if (a.meridian.has_liquid()) {
    r << "fill level: " << short_num(*a.meridian.fill_level()) << " m, free-surface radius "
      << short_num(a.meridian.free_surface_radius()) << " m\n";
  }
  r << "shell basis: Legendre degree " << a.config.discretization.degree << ", " << a.model.basis.reduced_size()
    << " free coefficients\n";
  for (const auto& w : a.model.warnings) r << "warning: " << w << "\n";
  r << "dry modes: " << a.dry.omega2.size() << ", max residual " << short_num(a.dry.max_residual)
    << ", max orthogonality error " << short_num(a.dry.max_orthogonality_error) << "\n";
  if (a.bie) {
    const auto& d = a.config.discretization;
    r << "boundary integral system: n = " << d.n << " per piece, " << a.disc->size() << " unknowns, reciprocal condition "
      << short_num(a.bie->rcond) << " (condition ~ " << short_num(1.0 / a.bie->rcond) << ")\n";
    r << "harmonics: m = 0 used (axisymmetric load), m_max = " << d.m_max << " accepted\n";
    double flux = 0.0;
    for (double f : a.added.flux_residuals) flux = std::max(flux, std::abs(f));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a.added.matrix + a.added.matrix.transpose()));
    r << "added mass: asymmetry " << short_num(a.added.asymmetry) << ", smallest eigenvalue "
      << short_num(es.eigenvalues().minCoeff()) << ", largest eigenvalue " << short_num(es.eigenvalues().maxCoeff())
      << ", max flux residual " << short_num(flux) << "\n";
  }
}

void report_timings(std::ostringstream& r, const Analysis& a, double total) {
  r << "timings (s):\n";
  for (const auto& [stage, s] : a.seconds) r << "  " << stage << " " << short_num(s) << "\n";
  r << "  total " << short_num(total) << "\n";
}

std::vector<WallField> mode_fields(const Analysis& a) {
  std::vector<WallField> out;
  for (Eigen::Index k = 0; k < a.dry.shapes.cols(); ++k) {
    out.push_back(normal_field(a.model, a.dry.shapes.col(k)));
  }
  return out;
}

}  // namespace

SurfaceLoad pulse_load(const RunConfig& config) {
  SurfaceLoad load;
  if (!config.load) return load;
  const double q0 = config.load->q0;
  const std::vector<int> footprint = config.load->footprint;
  load.normal = [q0, footprint](std::size_t seg, double) {
    if (footprint.empty()) return q0;
    for (int k : footprint) {
      if (static_cast<std::size_t>(k) == seg) return q0;
    }
    return 0.0;
  };
  return load;
}

Analysis prepare(const RunConfig& config, bool wet) {
  auto t0 = Clock::now();
  const auto& d = config.discretization;
  Meridian meridian = build_meridian(config);
  ShellModel model = assemble_shell(meridian, config.material, d.degree, config.support);
  Analysis a{config, std::move(meridian), std::move(model), {}, nullptr, nullptr, {}, {}, {}, {}};
  a.dry = dry_modes(a.model, d.modes);
  a.seconds["shell"] = since(t0);

  const auto K = a.dry.omega2.size();
  a.coupled.omega2 = a.dry.omega2;
  a.coupled.added_mass = Eigen::MatrixXd::Zero(K, K);
  a.coupled.damping_ratio = d.damping;
  a.coupled.load = Eigen::VectorXd::Zero(K);
  if (config.load) {
    a.coupled.tau = config.load->tau;
    a.coupled.load = a.dry.shapes.transpose() * load_vector(a.model, pulse_load(config));
  }

  if (wet) {
    if (!config.liquid || !a.meridian.has_liquid()) throw ValidationError("wet analysis needs a liquid block and a fill level");
    t0 = Clock::now();
    BoundaryOptions opt;
    opt.n = d.n;
    a.disc = std::make_shared<BoundaryDiscretization>(a.meridian, opt);
    a.bie = std::make_shared<BIESystem>(assemble(a.disc, 0));
    a.seconds["boundary system"] = since(t0);
    t0 = Clock::now();
    a.added = added_mass(*a.bie, mode_fields(a), config.liquid->rho);
    a.coupled.added_mass = 0.5 * (a.added.matrix + a.added.matrix.transpose());
    a.seconds["added mass"] = since(t0);
  }
  a.wet = wet_modes(a.coupled);
  return a;
}

FileSet run_modes(const RunConfig& config, bool wet) {
  const auto t0 = Clock::now();
  const Analysis a = prepare(config, wet);
  FileSet files;
  files["modes_dry.csv"] = modes_csv(a.dry.omega2, "dry modes");
  std::ostringstream r;
  report_header(r, a);
  if (wet) {
    files["modes_wet.csv"] = modes_csv(a.wet.omega2, "wet modes");
    r << "wet/dry frequency ratios:";
    for (Eigen::Index k = 0; k < a.wet.omega2.size(); ++k) {
      r << " " << short_num(std::sqrt(a.wet.omega2[k] / a.dry.omega2[k]));
    }
    r << "\n";
  }
  report_timings(r, a, since(t0));
  files["report.txt"] = r.str();
  return files;
}

FileSet run(const RunConfig& config) {
  const auto t0 = Clock::now();
  const AnalysisClass cls = config.analysis;
  if (cls == AnalysisClass::dry_modes) return run_modes(config, false);
  if (cls == AnalysisClass::wet_modes) return run_modes(config, true);

  Analysis a = prepare(config, cls == AnalysisClass::wet_forced);
  FileSet files;
  std::ostringstream r;
  report_header(r, a);

  std::vector<ResolvedProbe> probes;
  for (const auto& spec : config.probes) probes.push_back(resolve_probe(a, spec));
  for (const auto& p : probes) {
    r << "probe " << p.name << ": shell point segment " << p.shell.segment << " (r = " << short_num(p.shell.point.r)
      << ", z = " << short_num(p.shell.point.z) << "), distance " << short_num(p.shell.distance) << " m, pressure "
      << (p.where == ResolvedProbe::interior   ? "in the liquid"
          : p.where == ResolvedProbe::boundary ? "on the wetted boundary"
                                               : "not available (no liquid)")
      << "\n";
  }

  if (cls == AnalysisClass::static_load) {
    const Eigen::VectorXd x = static_solution(a.model, pulse_load(config));
    std::ostringstream o;
    o << "# static response to q0 = " << short_num(config.load->q0) << " Pa\n";
    o << "segment,xi,r_m,z_m,u_m,w_m\n";
    constexpr int samples = 41;
    for (std::size_t s = 0; s < a.meridian.size(); ++s) {
      for (int i = 0; i < samples; ++i) {
        const double xi = -1.0 + 2.0 * i / (samples - 1);
        const MeridianPoint p = a.meridian.segment(s).point(xi);
        const ShellDisplacement u = displacement(a.model, x, s, xi);
        o << s << "," << num(xi) << "," << num(p.r) << "," << num(p.z) << "," << num(u.u) << "," << num(u.w) << "\n";
      }
    }
    files["static.csv"] = o.str();
    r << "static strain energy: " << short_num(strain_energy(a.model, x)) << " J\n";
    for (const auto& p : probes) {
      r << "probe " << p.name << " static normal displacement "
        << short_num(displacement(a.model, x, p.shell.segment, p.shell.u).w) << " m\n";
    }
    double worst = 0.0;
    for (const auto& j : junction_force_balance(a.model, x)) worst = std::max(worst, j.relative);
    r << "junction force balance: max relative residual " << short_num(worst) << "\n";
    report_timings(r, a, since(t0));
    files["report.txt"] = r.str();
    return files;
  }

  const bool wet = cls == AnalysisClass::wet_forced;
  files["modes_dry.csv"] = modes_csv(a.dry.omega2, "dry modes");
  if (wet) files["modes_wet.csv"] = modes_csv(a.wet.omega2, "wet modes");

  auto t1 = Clock::now();
  const TimeGrid grid = default_time_grid(a.coupled, config.discretization.t_end, config.discretization.dt);
  TransientResult tr = integrate_pulse(a.coupled, grid);
  a.seconds["time integration"] = since(t1);

  t1 = Clock::now();
  const auto K = a.dry.omega2.size();
  std::vector<ProbeBasis> basis;
  for (const auto& p : probes) {
    ProbeBasis b{p.name, Eigen::RowVectorXd::Zero(K), Eigen::RowVectorXd::Zero(K)};
    for (Eigen::Index k = 0; k < K; ++k) {
      b.displacement[k] = displacement(a.model, a.dry.shapes.col(k), p.shell.segment, p.shell.u).w;
      if (!wet) continue;
      const PressureField& field = a.added.fields[static_cast<std::size_t>(k)];
      if (p.where == ResolvedProbe::boundary) b.pressure[k] = evaluate_trace(field, p.piece, p.t);
      else if (p.where == ResolvedProbe::interior) b.pressure[k] = evaluate_pressure_at(field, {p.point})[0];
    }
    basis.push_back(std::move(b));
  }
  Eigen::RowVectorXd f_row = Eigen::RowVectorXd::Zero(K);
  if (wet) {
    const auto fields = mode_fields(a);
    for (Eigen::Index k = 0; k < K; ++k) {
      f_row[k] = build_neumann_data(*a.disc, 0, fields[static_cast<std::size_t>(k)], RigidMotion{}, 0.0)
                     .free_surface_accel;
    }
  }
  const double rho_g = wet ? config.liquid->rho * config.liquid->g : 0.0;
  reconstruct_outputs(tr, basis, f_row, rho_g);
  a.seconds["reconstruction"] = since(t1);

  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& p = probes[i];
    files[probe_file_name("displacement", p.name)] =
        series_csv(probe_metadata(p) + "# normal displacement at shell point r = " + short_num(p.shell.point.r) +
                       " m, z = " + short_num(p.shell.point.z) + " m\n",
                   "w_m", tr.time, tr.displacement[i].values);
    if (wet && p.where != ResolvedProbe::dry) {
      files[probe_file_name("pressure", p.name)] =
          series_csv(probe_metadata(p) + "# dynamic pressure including -rho_l g f(t)\n", "p_pa", tr.time,
                     tr.pressure[i].values);
    }
  }
  if (wet) {
    files["free_surface.csv"] = series_csv("# planar free-surface elevation f(t)\n", "f_m", tr.time, tr.free_surface);
  }

  r << "time grid: " << tr.time.size() << " points, pulse step " << short_num(grid.dt_pulse) << " s inside "
    << short_num(grid.pulse_window) << " s, main step " << short_num(grid.dt) << " s, t_end " << short_num(grid.t_end)
    << " s\n";
  const double w_max = std::sqrt(a.wet.omega2.maxCoeff());
  r << "highest retained frequency " << short_num(w_max / (2.0 * std::numbers::pi)) << " Hz, steps per period "
    << short_num(2.0 * std::numbers::pi / w_max / grid.dt) << "\n";
  r << "modal truncation: " << K << " modes capture " << short_num(compliance_fraction(a.model, a.dry, pulse_load(config)))
    << " of the static compliance of the load\n";
  // energy audit past the pulse
  const double t_quiet = 40.0 * a.coupled.tau;
  Eigen::Index first = 0;
  while (first < static_cast<Eigen::Index>(tr.time.size()) && tr.time[static_cast<std::size_t>(first)] < t_quiet) ++first;
  if (first < tr.energy.size()) {
    const double e0 = tr.energy[first];
    double drift = 0.0;
    for (Eigen::Index i = first; i < tr.energy.size(); ++i) drift = std::max(drift, std::abs(tr.energy[i] - e0));
    r << "energy after 40 tau: " << short_num(e0) << " J, max relative drift " << short_num(e0 > 0 ? drift / e0 : 0.0)
      << "\n";
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    r << "probe " << probes[i].name << " peak |w| " << short_num(tr.displacement[i].values.cwiseAbs().maxCoeff())
      << " m";
    if (wet && probes[i].where != ResolvedProbe::dry) {
      r << ", peak |p| " << short_num(tr.pressure[i].values.cwiseAbs().maxCoeff()) << " Pa";
    }
    r << "\n";
  }
  report_timings(r, a, since(t0));
  files["report.txt"] = r.str();
  return files;
}

ConvergenceStudy convergence_study(const RunConfig& config, const std::vector<int>& n_list) {
  if (n_list.size() < 3) throw ValidationError("convergence study needs at least three n values");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 4) throw ValidationError("n values must be at least 4");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ValidationError("n values must be strictly ascending");
  }
  const Meridian meridian = build_meridian(config);
  if (!meridian.has_liquid()) throw ValidationError("convergence study needs a fill level");

  const WallField datum = [&meridian](std::size_t seg, double u) { return meridian.segment(seg).normal(u).x(); };

  // fixed sample points per wetted wall part
  const auto& pieces = meridian.wetted();
  const std::size_t parts = pieces.size() - 1;
  const GaussRule rule = gauss_legendre(33);
  const Eigen::VectorXd& nodes = rule.nodes;
  const Eigen::VectorXd sqrt_w = rule.weights.cwiseSqrt();

  struct Solved {
    std::vector<Eigen::VectorXd> traces;
    double seconds = 0.0;
  };
  std::map<int, Solved> cache;
  auto solved = [&](int n) -> const Solved& {
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const auto t0 = Clock::now();
    BoundaryOptions opt;
    opt.n = n;
    auto disc = std::make_shared<BoundaryDiscretization>(meridian, opt);
    const BIESystem sys = assemble(disc, 0);
    const PressureField field = solve(sys, build_neumann_data(*disc, 0, datum, RigidMotion{}, 1.0), 0.0);
    Solved s;
    for (std::size_t p = 0; p < parts; ++p) {
      Eigen::VectorXd v(nodes.size());
      for (Eigen::Index i = 0; i < nodes.size(); ++i) v[i] = evaluate_trace(field, p, nodes[i]);
      s.traces.push_back(v);
    }
    s.seconds = since(t0);
    return cache.emplace(n, std::move(s)).first->second;
  };

  ConvergenceStudy out;
  std::map<std::string, int> seen;
  for (std::size_t p = 0; p < parts; ++p) {
    std::string name = to_string(pieces[p].kind);
    const int k = seen[name]++;
    if (k > 0) name += std::to_string(k + 1);
    out.parts.push_back(name);
  }
  for (int n : n_list) {
    const Solved& fine = solved(2 * n);
    const Solved& coarse = solved(n);
    std::vector<double> eps;
    for (std::size_t p = 0; p < parts; ++p) {
      const Eigen::VectorXd diff = coarse.traces[p] - fine.traces[p];
      eps.push_back(diff.cwiseProduct(sqrt_w).norm() / fine.traces[p].cwiseProduct(sqrt_w).norm());
    }
    out.n.push_back(n);
    out.eps.push_back(eps);
    out.seconds.push_back(coarse.seconds);
  }
  return out;
}

FileSet convergence_files(const ConvergenceStudy& study) {
  std::ostringstream o;
  o << "# relative change eps(n) = ||p_n - p_2n|| / ||p_2n|| per wetted part, datum dp/dn = n_r\n";
  for (std::size_t i = 0; i < study.n.size(); ++i) {
    o << "# seconds n=" << study.n[i] << " " << short_num(study.seconds[i]) << "\n";
  }
  o << "n";
  for (const auto& p : study.parts) o << ",eps_" << p;
  o << "\n";
  for (std::size_t i = 0; i < study.n.size(); ++i) {
    o << study.n[i];
    for (double e : study.eps[i]) o << "," << num(e);
    o << "\n";
  }
  std::ostringstream r;
  r << "revshell-hydro convergence study\n";
  double total = 0.0;
  for (std::size_t i = 0; i < study.n.size(); ++i) {
    r << "n = " << study.n[i] << ": solve " << short_num(study.seconds[i]) << " s\n";
    total += study.seconds[i];
  }
  r << "total " << short_num(total) << " s\n";
  return {{"convergence.csv", o.str()}, {"report.txt", r.str()}};
}

void write_files(const FileSet& files, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  std::vector<fs::path> written;
  for (const auto& [name, content] : files) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out << content;
    if (out) out.close();
    if (!out) {
      for (const auto& w : written) fs::remove(w, ec);
      fs::remove(path, ec);
      throw IoError("cannot write '" + path.string() + "'");
    }
    written.push_back(path);
  }
}

std::string csv_body(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] == '#') continue;
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace revshell
