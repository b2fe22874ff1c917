#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <string>
#include <vector>

namespace revshell {

/// A point of the meridian half-plane (r >= 0, z), metres.
struct MeridianPoint {
  double r = 0.0;
  double z = 0.0;

  Eigen::Vector2d vec() const { return {r, z}; }
  static MeridianPoint from(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }
  bool operator==(const MeridianPoint&) const = default;
};

enum class SegmentKind { line, arc };

/// What surface of revolution a segment generates. Used for labelling only.
enum class SurfaceKind { disk, cylinder, cone, sphere, free_surface };

std::string to_string(SurfaceKind kind);

/// Local frame on the meridian. The outward normal is the right-hand
/// perpendicular of the tangent, n = (t_z, -t_r); theta satisfies
/// cos(theta) = n_z and sin(theta) = n_r.
struct SurfaceFrame {
  MeridianPoint point;
  Eigen::Vector2d tangent;
  Eigen::Vector2d normal;
  double theta = 0.0;
};

/// One generator piece of the meridian: a straight line (disk, cylinder or
/// cone) or a circular arc (sphere zone). Parameterized over u in [-1, 1],
/// affine in arclength.
class Segment {
 public:
  static Segment line(MeridianPoint from, MeridianPoint to);
  /// Circular arc about `center`; `ccw` selects the sweep sense in the
  /// (r, z) plane. Both endpoints must lie on the same circle.
  static Segment arc(MeridianPoint from, MeridianPoint to, MeridianPoint center, bool ccw);

  SegmentKind kind() const { return kind_; }
  SurfaceKind surface_kind() const;

  MeridianPoint start() const { return point(-1.0); }
  MeridianPoint end() const { return point(1.0); }
  double length() const { return length_; }
  /// ds/du.
  double jacobian() const { return 0.5 * length_; }

  MeridianPoint point(double u) const;
  Eigen::Vector2d tangent(double u) const;
  Eigen::Vector2d normal(double u) const;
  SurfaceFrame frame(double u) const;
  /// Signed curvature k with dt/ds = -k n (positive when the fluid side is convex).
  double curvature() const;

  /// point(u + du) - point(u), free of cancellation for small du.
  Eigen::Vector2d offset(double u, double du) const;

  /// The piece of this segment between parameters a < b, reparameterized to [-1, 1].
  Segment sub(double a, double b) const;

  // arc data (meaningless for lines)
  MeridianPoint center() const { return MeridianPoint::from(center_); }
  double radius() const { return radius_; }

 private:
  SegmentKind kind_ = SegmentKind::line;
  Eigen::Vector2d a_{0, 0}, b_{0, 0};
  Eigen::Vector2d center_{0, 0};
  double radius_ = 0.0;
  double phi0_ = 0.0;   // start angle
  double sweep_ = 0.0;  // signed
  double length_ = 0.0;
};

/// Input description of one segment.
struct SegmentSpec {
  SegmentKind kind = SegmentKind::line;
  MeridianPoint from;
  MeridianPoint to;
  MeridianPoint center;  // arc only
  bool ccw = true;       // arc only

  bool operator==(const SegmentSpec&) const = default;
};

/// A piece of the boundary of the meridian fluid domain D. Wall pieces refer
/// to (part of) a shell segment; the last piece of a wetted curve is the
/// free-surface radius.
struct BoundaryPiece {
  Segment geometry;
  int segment = -1;  // shell segment index, -1 for the free surface
  double u_begin = -1.0;
  double u_end = 1.0;  // range inside the shell segment
  bool free_surface = false;
  SurfaceKind kind = SurfaceKind::cylinder;

  /// Maps the piece parameter to the parameter of the underlying shell segment.
  double segment_parameter(double t) const {
    return u_begin + 0.5 * (t + 1.0) * (u_end - u_begin);
  }
};

/// Interior angle of D at a node (radians), in (0, 2*pi].
double interior_angle(const Eigen::Vector2d& incoming_tangent,
                      const Eigen::Vector2d& outgoing_tangent);

inline constexpr double kConnectTolerance = 1e-9;

/// The generating curve of a compound shell of revolution, ordered from the
/// bottom upward, plus an optional liquid fill level.
class Meridian {
 public:
  Meridian(std::vector<Segment> segments, std::optional<double> fill_level);

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  const Segment& segment(std::size_t i) const { return segments_.at(i); }

  /// Interior angles at the nodes between consecutive shell segments.
  const std::vector<double>& junction_angles() const { return junction_angles_; }

  std::optional<double> fill_level() const { return fill_level_; }
  bool has_liquid() const { return fill_level_.has_value(); }

  /// Wetted wall pieces followed by the free surface (empty without liquid).
  const std::vector<BoundaryPiece>& wetted() const { return wetted_; }
  /// Interior angles between consecutive wetted pieces (size = wetted().size() - 1).
  const std::vector<double>& wetted_angles() const { return wetted_angles_; }
  double free_surface_radius() const { return free_surface_radius_; }

  double total_length() const;

 private:
  void locate_free_surface();

  std::vector<Segment> segments_;
  std::optional<double> fill_level_;
  std::vector<double> junction_angles_;
  std::vector<BoundaryPiece> wetted_;
  std::vector<double> wetted_angles_;
  double free_surface_radius_ = 0.0;
};

/// Validates and snaps a chain of segment specs. With a fill level the chain
/// must start on the axis (a closed bottom).
Meridian build_meridian(const std::vector<SegmentSpec>& specs, std::optional<double> fill_level);

SurfaceFrame frame_at(const Meridian& meridian, std::size_t segment_index, double t);

/// Closest point of a segment: parameter u and distance.
std::pair<double, double> nearest_parameter(const Segment& segment, MeridianPoint p);

struct MeridianLocation {
  std::size_t segment = 0;
  double u = 0.0;
  double distance = 0.0;
  MeridianPoint point;
};

/// Closest shell point to p (first segment wins ties).
MeridianLocation locate(const Meridian& meridian, MeridianPoint p);
/// Shell point at arclength s from the start of the meridian.
MeridianLocation locate_arclength(const Meridian& meridian, double s);

/// Area of the planar free surface disk, pi r_sigma^2.
double free_surface_area(const Meridian& meridian);

/// Boundary decomposition of D: wetted wall pieces followed by the free surface.
const std::vector<BoundaryPiece>& wetted_quadrature_curve(const Meridian& meridian);

}  // namespace revshell
