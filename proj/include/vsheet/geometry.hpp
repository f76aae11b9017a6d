#pragma once

// Constant-speed parameterized curves and their differential geometry.
//
// A curve z : S -> R^2 is parameterized over S = R/Z (closed) or [0, 1]
// (open) with |z'| = L, the arclength. Closed curves run counter-clockwise.
// The normal is n = s^perp with s = z'/L, so for a counter-clockwise loop n
// points into the enclosed region and z'' = kappa * L^2 * n.

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "vsheet/vec2.hpp"

namespace vsheet::geometry {

enum class CurveKind { Closed, Open };

/// Position and the first three parameter derivatives at one alpha.
struct CurvePoint {
  Vec2 z;
  Vec2 d1;
  Vec2 d2;
  Vec2 d3;
};

struct Frame {
  Vec2 tangent;
  Vec2 normal;
  double curvature = 0.0;
};

struct CircleShape {
  Vec2 center;
  double radius = 1.0;
};

struct SegmentShape {
  double half_length = 1.0;
};

/// Trigonometric series x(alpha), y(alpha) in cos/sin(2 pi m alpha).
struct FourierSeries {
  std::vector<double> cos_x, sin_x, cos_y, sin_y;
};

struct FourierShape {
  std::shared_ptr<const FourierSeries> series;
};

class ParamCurve {
public:
  using Shape = std::variant<CircleShape, SegmentShape, FourierShape>;

  ParamCurve(CurveKind kind, double length, Shape shape);

  CurveKind kind() const { return kind_; }
  bool closed() const { return kind_ == CurveKind::Closed; }
  double length() const { return length_; }
  const Shape &shape() const { return shape_; }

  CurvePoint eval(double alpha) const;
  Vec2 position(double alpha) const { return eval(alpha).z; }
  Frame frame(double alpha) const;

  /// Center and radius when the curve was built as an exact circle.
  std::optional<CircleShape> circle() const;

  /// Rigid motion of the whole curve (rotation about the origin, then shift).
  ParamCurve transformed(double angle, Vec2 shift) const;

private:
  CurveKind kind_;
  double length_;
  Shape shape_;
  double angle_ = 0.0;
  Vec2 shift_;
};

ParamCurve make_circle(Vec2 center, double radius);

/// z(alpha) = (a (2 alpha - 1), 0), alpha in [0, 1].
ParamCurve make_segment(double half_length);

struct FourierMode {
  int wavenumber = 0;
  double amplitude = 0.0;
};

/// Polar curve r(theta) = R (1 + sum_k delta_k cos(k theta)) around `center`,
/// reparameterized to constant speed.
ParamCurve make_fourier_curve(double base_radius, std::span<const FourierMode> modes,
                              Vec2 center = {});

/// sup |alpha - beta| / |z(alpha) - z(beta)| over `samples` dyadic nodes
/// (periodic distance for closed curves).
double arc_chord_constant(const ParamCurve &curve, int samples = 1024);

/// Smallest distance between two distinct curves of the list.
double pairwise_distance(std::span<const ParamCurve> curves, int samples = 1024,
                         double disjoint_floor = 1e-8);

/// Area enclosed by a closed curve.
double enclosed_area(const ParamCurve &curve, int samples = 4096);

/// max_alpha | |z'(alpha)| / L - 1 | on a uniform sample.
double speed_residual(const ParamCurve &curve, int samples = 1024);

/// Winding number of a closed curve around p (0 outside, 1 inside for CCW).
int winding_number(const ParamCurve &curve, Vec2 p, int samples = 2048);

/// Sup norm of z, z', z'' over a uniform sample (the C^2 norm used in the
/// injectivity constants).
double c2_norm(const ParamCurve &curve, int samples = 512);

} // namespace vsheet::geometry
