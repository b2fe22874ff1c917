#include "revshell/geometry.hpp"

#include "revshell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace revshell {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d right_normal(const Eigen::Vector2d& t) { return {t.y(), -t.x()}; }

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::disk: return "disk";
    case SurfaceKind::cylinder: return "cylinder";
    case SurfaceKind::cone: return "cone";
    case SurfaceKind::sphere: return "sphere";
    case SurfaceKind::free_surface: return "free_surface";
  }
  return "unknown";
}

Segment Segment::line(MeridianPoint from, MeridianPoint to) {
  Segment s;
  s.kind_ = SegmentKind::line;
  s.a_ = from.vec();
  s.b_ = to.vec();
  s.length_ = (s.b_ - s.a_).norm();
  if (!(s.length_ > 0.0)) throw ValidationError("line segment has zero length");
  return s;
}

Segment Segment::arc(MeridianPoint from, MeridianPoint to, MeridianPoint center, bool ccw) {
  Segment s;
  s.kind_ = SegmentKind::arc;
  s.a_ = from.vec();
  s.b_ = to.vec();
  s.center_ = center.vec();
  const Eigen::Vector2d da = s.a_ - s.center_;
  const Eigen::Vector2d db = s.b_ - s.center_;
  s.radius_ = da.norm();
  if (!(s.radius_ > 0.0)) throw ValidationError("arc radius must be positive");
  if (std::abs(db.norm() - s.radius_) > kConnectTolerance * std::max(1.0, s.radius_)) {
    throw ValidationError("arc endpoints are not equidistant from the center");
  }
  s.phi0_ = std::atan2(da.y(), da.x());
  double sweep = std::atan2(db.y(), db.x()) - s.phi0_;
  if (ccw) {
    while (sweep <= 0.0) sweep += 2.0 * kPi;
  } else {
    while (sweep >= 0.0) sweep -= 2.0 * kPi;
  }
  if (std::abs(sweep) >= 2.0 * kPi - 1e-12 || (s.a_ - s.b_).norm() < kConnectTolerance) {
    throw ValidationError("arc sweep must be below 2*pi");
  }
  s.sweep_ = sweep;
  s.length_ = s.radius_ * std::abs(sweep);
  return s;
}

SurfaceKind Segment::surface_kind() const {
  if (kind_ == SegmentKind::arc) return SurfaceKind::sphere;
  const Eigen::Vector2d d = b_ - a_;
  if (std::abs(d.y()) <= 1e-12 * length_) return SurfaceKind::disk;
  if (std::abs(d.x()) <= 1e-12 * length_) return SurfaceKind::cylinder;
  return SurfaceKind::cone;
}

MeridianPoint Segment::point(double u) const {
  if (kind_ == SegmentKind::line) {
    // exact endpoints at u = +-1
    return MeridianPoint::from(0.5 * (1.0 - u) * a_ + 0.5 * (1.0 + u) * b_);
  }
  if (u == -1.0) return MeridianPoint::from(a_);
  if (u == 1.0) return MeridianPoint::from(b_);
  const double phi = phi0_ + 0.5 * (u + 1.0) * sweep_;
  return MeridianPoint::from(center_ + radius_ * Eigen::Vector2d(std::cos(phi), std::sin(phi)));
}

Eigen::Vector2d Segment::tangent(double u) const {
  if (kind_ == SegmentKind::line) return (b_ - a_) / length_;
  const double phi = phi0_ + 0.5 * (u + 1.0) * sweep_;
  const double sgn = sweep_ > 0.0 ? 1.0 : -1.0;
  return sgn * Eigen::Vector2d(-std::sin(phi), std::cos(phi));
}

Eigen::Vector2d Segment::normal(double u) const { return right_normal(tangent(u)); }

SurfaceFrame Segment::frame(double u) const {
  SurfaceFrame f;
  f.point = point(u);
  f.tangent = tangent(u);
  f.normal = right_normal(f.tangent);
  f.theta = std::atan2(f.normal.x(), f.normal.y());
  return f;
}

double Segment::curvature() const {
  if (kind_ == SegmentKind::line) return 0.0;
  return (sweep_ > 0.0 ? 1.0 : -1.0) / radius_;
}

Eigen::Vector2d Segment::offset(double u, double du) const {
  if (kind_ == SegmentKind::line) return 0.5 * du * (b_ - a_);
  const double phi = phi0_ + 0.5 * (u + 1.0) * sweep_;
  const double half = 0.25 * du * sweep_;
  const double mid = phi + half;
  return 2.0 * radius_ * std::sin(half) * Eigen::Vector2d(-std::sin(mid), std::cos(mid));
}

Segment Segment::sub(double a, double b) const {
  if (!(a < b) || a < -1.0 || b > 1.0) throw ValidationError("invalid sub-segment range");
  Segment s = *this;
  if (kind_ == SegmentKind::line) {
    s.a_ = point(a).vec();
    s.b_ = point(b).vec();
    s.length_ = (s.b_ - s.a_).norm();
  } else {
    s.a_ = point(a).vec();
    s.b_ = point(b).vec();
    s.phi0_ = phi0_ + 0.5 * (a + 1.0) * sweep_;
    s.sweep_ = 0.5 * (b - a) * sweep_;
    s.length_ = radius_ * std::abs(s.sweep_);
  }
  return s;
}

double interior_angle(const Eigen::Vector2d& incoming, const Eigen::Vector2d& outgoing) {
  const double c = cross(incoming, outgoing);
  const double d = incoming.dot(outgoing);
  // fluid lies to the left of the traversal direction
  if (std::abs(c) <= 1e-12 && d < 0.0) return 2.0 * kPi;  // folded back: internal edge
  return kPi - std::atan2(c, d);
}

Meridian::Meridian(std::vector<Segment> segments, std::optional<double> fill_level)
    : segments_(std::move(segments)), fill_level_(fill_level) {
  if (segments_.empty()) throw ValidationError("meridian needs at least one segment");
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    junction_angles_.push_back(
        interior_angle(segments_[i].tangent(1.0), segments_[i + 1].tangent(-1.0)));
  }
  if (fill_level_) locate_free_surface();
}

double Meridian::total_length() const {
  double l = 0.0;
  for (const auto& s : segments_) l += s.length();
  return l;
}

void Meridian::locate_free_surface() {
  const double level = *fill_level_;
  const double scale = std::max(1.0, total_length());
  const double tol = 1e-12 * scale;
  const MeridianPoint bottom = segments_.front().start();
  if (bottom.r > tol) {
    throw ValidationError("a liquid-filled meridian must start on the axis (closed bottom)");
  }
  if (level <= bottom.z + tol) throw ValidationError("fill level is at or below the bottom");

  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    auto height = [&](double u) { return seg.point(u).z - level; };
    double u_cross = 2.0;  // > 1 means no crossing inside this segment
    if (std::abs(height(1.0)) <= tol) {
      u_cross = 1.0;
    } else {
      constexpr int kSamples = 64;
      double prev_u = -1.0;
      for (int k = 1; k <= kSamples; ++k) {
        const double cur_u = -1.0 + 2.0 * k / kSamples;
        if (height(cur_u) > 0.0 && height(prev_u) <= 0.0) {
          double lo = prev_u, hi = cur_u;
          for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            (height(mid) > 0.0 ? hi : lo) = mid;
          }
          u_cross = 0.5 * (lo + hi);
          break;
        }
        prev_u = cur_u;
      }
    }
    if (u_cross > 1.0) {
      BoundaryPiece piece{seg, static_cast<int>(i), -1.0, 1.0, false, seg.surface_kind()};
      wetted_.push_back(piece);
      continue;
    }
    if (u_cross <= -1.0 + 1e-14) {
      // crossing exactly at the start node: previous segment ended at the level
    } else {
      Segment part = u_cross < 1.0 ? seg.sub(-1.0, u_cross) : seg;
      wetted_.push_back(BoundaryPiece{part, static_cast<int>(i), -1.0, u_cross, false,
                                      seg.surface_kind()});
    }
    break;
  }
  if (wetted_.empty()) throw ValidationError("fill level does not wet the shell");
  const MeridianPoint rim = wetted_.back().geometry.end();
  if (std::abs(rim.z - level) > 1e-9 * scale) {
    throw ValidationError("fill level lies above the top rim of the shell");
  }
  if (rim.r <= 1e-9 * scale) {
    throw ValidationError("fill level meets the axis: degenerate free surface");
  }
  free_surface_radius_ = rim.r;
  Segment sigma = Segment::line(MeridianPoint{rim.r, level}, MeridianPoint{0.0, level});
  wetted_.push_back(BoundaryPiece{sigma, -1, -1.0, 1.0, true, SurfaceKind::free_surface});

  for (std::size_t i = 0; i + 1 < wetted_.size(); ++i) {
    wetted_angles_.push_back(
        interior_angle(wetted_[i].geometry.tangent(1.0), wetted_[i + 1].geometry.tangent(-1.0)));
  }
}

Meridian build_meridian(const std::vector<SegmentSpec>& specs, std::optional<double> fill_level) {
  if (specs.empty()) throw ValidationError("geometry block required: no segments given");
  std::vector<Segment> segments;
  segments.reserve(specs.size());
  MeridianPoint previous_end{};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    SegmentSpec spec = specs[i];
    for (const MeridianPoint* p : {&spec.from, &spec.to}) {
      if (p->r < -kConnectTolerance) {
        std::ostringstream msg;
        msg << "segment " << i + 1 << ": negative radius " << p->r;
        throw ValidationError(msg.str());
      }
    }
    spec.from.r = std::max(0.0, spec.from.r);
    spec.to.r = std::max(0.0, spec.to.r);
    if (i > 0) {
      const double gap = (spec.from.vec() - previous_end.vec()).norm();
      if (gap > kConnectTolerance) {
        std::ostringstream msg;
        msg << "segment " << i + 1 << " does not start where segment " << i
            << " ends (gap " << gap << " m)";
        throw ValidationError(msg.str());
      }
      spec.from = previous_end;  // snap
    }
    if (spec.kind == SegmentKind::line) {
      segments.push_back(Segment::line(spec.from, spec.to));
    } else {
      segments.push_back(Segment::arc(spec.from, spec.to, spec.center, spec.ccw));
    }
    previous_end = segments.back().end();
  }
  return Meridian(std::move(segments), fill_level);
}

SurfaceFrame frame_at(const Meridian& meridian, std::size_t segment_index, double t) {
  if (segment_index >= meridian.size()) throw ValidationError("segment index out of range");
  if (std::abs(t) > 1.0) throw ValidationError("segment parameter outside [-1, 1]");
  return meridian.segment(segment_index).frame(t);
}

double free_surface_area(const Meridian& meridian) {
  if (!meridian.has_liquid()) throw ValidationError("meridian has no free surface");
  const double r = meridian.free_surface_radius();
  return std::numbers::pi * r * r;
}

const std::vector<BoundaryPiece>& wetted_quadrature_curve(const Meridian& meridian) {
  if (!meridian.has_liquid()) throw ValidationError("meridian has no liquid fill");
  return meridian.wetted();
}

std::pair<double, double> nearest_parameter(const Segment& segment, MeridianPoint p) {
  const Eigen::Vector2d x = p.vec();
  auto dist = [&](double u) { return (segment.point(u).vec() - x).norm(); };
  constexpr int samples = 64;
  double best_u = -1.0, best = dist(-1.0);
  for (int i = 1; i <= samples; ++i) {
    const double u = -1.0 + 2.0 * i / samples;
    const double d = dist(u);
    if (d < best) {
      best = d;
      best_u = u;
    }
  }
  // golden section around the best sample
  double a = std::max(-1.0, best_u - 2.0 / samples), b = std::min(1.0, best_u + 2.0 / samples);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = dist(c), fd = dist(d);
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = dist(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = dist(d);
    }
  }
  const double u = 0.5 * (a + b);
  const double du = dist(u);
  if (du < best) return {u, du};
  return {best_u, best};
}

MeridianLocation locate(const Meridian& meridian, MeridianPoint p) {
  MeridianLocation best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < meridian.size(); ++i) {
    const auto [u, d] = nearest_parameter(meridian.segment(i), p);
    if (d < best.distance - 1e-12) best = {i, u, d, meridian.segment(i).point(u)};
  }
  return best;
}

MeridianLocation locate_arclength(const Meridian& meridian, double s) {
  if (s < 0.0 || s > meridian.total_length() * (1.0 + 1e-12)) {
    throw ValidationError("arclength outside the meridian");
  }
  double start = 0.0;
  for (std::size_t i = 0; i < meridian.size(); ++i) {
    const Segment& seg = meridian.segment(i);
    if (s <= start + seg.length() || i + 1 == meridian.size()) {
      const double u = std::clamp(2.0 * (s - start) / seg.length() - 1.0, -1.0, 1.0);
      return {i, u, 0.0, seg.point(u)};
    }
    start += seg.length();
  }
  throw ValidationError("empty meridian");
}

}  // namespace revshell
