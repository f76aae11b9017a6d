#include "vsheet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vsheet::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Arc-chord constant above which a reparameterized curve counts as
// self-intersecting.
constexpr double kArcChordCap = 1e3;

CurvePoint eval_circle(const CircleShape &c, double alpha) {
  const double t = kTwoPi * alpha;
  const double cs = std::cos(t), sn = std::sin(t);
  const double r = c.radius;
  const double w = kTwoPi;
  return {c.center + Vec2{r * cs, r * sn}, Vec2{-r * w * sn, r * w * cs},
          Vec2{-r * w * w * cs, -r * w * w * sn}, Vec2{r * w * w * w * sn, -r * w * w * w * cs}};
}

CurvePoint eval_segment(const SegmentShape &s, double alpha) {
  const double a = s.half_length;
  return {Vec2{a * (2.0 * alpha - 1.0), 0.0}, Vec2{2.0 * a, 0.0}, Vec2{}, Vec2{}};
}

CurvePoint eval_series(const FourierSeries &f, double alpha) {
  CurvePoint p;
  p.z = {f.cos_x[0], f.cos_y[0]};
  const double t = kTwoPi * alpha;
  const double c1 = std::cos(t), s1 = std::sin(t);
  double cm = 1.0, sm = 0.0;
  const std::size_t modes = f.cos_x.size();
  for (std::size_t m = 1; m < modes; ++m) {
    const double cn = cm * c1 - sm * s1;
    sm = sm * c1 + cm * s1;
    cm = cn;
    const double w = kTwoPi * static_cast<double>(m);
    const double ax = f.cos_x[m], bx = f.sin_x[m], ay = f.cos_y[m], by = f.sin_y[m];
    // value, d/dalpha, d2, d3 of a cos + b sin
    p.z += Vec2{ax * cm + bx * sm, ay * cm + by * sm};
    p.d1 += w * Vec2{-ax * sm + bx * cm, -ay * sm + by * cm};
    p.d2 += (w * w) * Vec2{-ax * cm - bx * sm, -ay * cm - by * sm};
    p.d3 += (w * w * w) * Vec2{ax * sm - bx * cm, ay * sm - by * cm};
  }
  return p;
}

// Real DFT of periodic samples into cos/sin coefficients up to n/2.
void real_dft(std::span<const double> v, std::vector<double> &a, std::vector<double> &b) {
  const std::size_t n = v.size();
  const std::size_t modes = n / 2 + 1;
  std::vector<double> ct(n), st(n);
  for (std::size_t k = 0; k < n; ++k) {
    ct[k] = std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    st[k] = std::sin(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  }
  a.assign(modes, 0.0);
  b.assign(modes, 0.0);
  for (std::size_t m = 0; m < modes; ++m) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = (m * j) % n;
      sa += v[j] * ct[idx];
      sb += v[j] * st[idx];
    }
    const double scale = (m == 0 || 2 * m == n) ? 1.0 / static_cast<double>(n)
                                                : 2.0 / static_cast<double>(n);
    a[m] = sa * scale;
    b[m] = sb * scale;
  }
  if (n % 2 == 0)
    b[n / 2] = 0.0;
}

double periodic_gap(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

} // namespace

ParamCurve::ParamCurve(CurveKind kind, double length, Shape shape)
    : kind_(kind), length_(length), shape_(std::move(shape)) {
  if (!(length > 0.0))
    throw std::invalid_argument("ParamCurve: length must be positive");
}

CurvePoint ParamCurve::eval(double alpha) const {
  CurvePoint p = std::visit(
      [alpha](const auto &s) -> CurvePoint {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleShape>)
          return eval_circle(s, alpha);
        else if constexpr (std::is_same_v<T, SegmentShape>)
          return eval_segment(s, alpha);
        else
          return eval_series(*s.series, alpha);
      },
      shape_);
  if (angle_ != 0.0) {
    p.z = rotate(p.z, angle_);
    p.d1 = rotate(p.d1, angle_);
    p.d2 = rotate(p.d2, angle_);
    p.d3 = rotate(p.d3, angle_);
  }
  p.z += shift_;
  return p;
}

Frame ParamCurve::frame(double alpha) const {
  const CurvePoint p = eval(alpha);
  Frame f;
  f.tangent = p.d1 / length_;
  f.normal = perp(f.tangent);
  f.curvature = dot(p.d2, f.normal) / (length_ * length_);
  return f;
}

std::optional<CircleShape> ParamCurve::circle() const {
  if (const auto *c = std::get_if<CircleShape>(&shape_))
    return CircleShape{rotate(c->center, angle_) + shift_, c->radius};
  return std::nullopt;
}

ParamCurve ParamCurve::transformed(double angle, Vec2 shift) const {
  ParamCurve out = *this;
  out.angle_ = angle_ + angle;
  out.shift_ = rotate(shift_, angle) + shift;
  return out;
}

ParamCurve make_circle(Vec2 center, double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("make_circle: radius must be positive, got " +
                                std::to_string(radius));
  return ParamCurve(CurveKind::Closed, kTwoPi * radius, CircleShape{center, radius});
}

ParamCurve make_segment(double half_length) {
  if (!(half_length > 0.0))
    throw std::invalid_argument("make_segment: half length must be positive, got " +
                                std::to_string(half_length));
  return ParamCurve(CurveKind::Open, 2.0 * half_length, SegmentShape{half_length});
}

ParamCurve make_fourier_curve(double base_radius, std::span<const FourierMode> modes,
                              Vec2 center) {
  if (!(base_radius > 0.0))
    throw std::invalid_argument("make_fourier_curve: base radius must be positive");
  bool trivial = true;
  for (const auto &m : modes) {
    if (m.wavenumber < 0)
      throw std::invalid_argument("make_fourier_curve: negative wavenumber");
    if (m.amplitude != 0.0 && m.wavenumber != 0)
      trivial = false;
  }
  if (trivial) {
    double r = base_radius;
    for (const auto &m : modes)
      r += base_radius * m.amplitude; // k = 0 modes rescale the circle
    return make_circle(center, r);
  }

  // polar radius and its theta-derivatives
  auto radius = [&](double th, double &dr, double &ddr) {
    double r = 1.0;
    dr = 0.0;
    ddr = 0.0;
    for (const auto &m : modes) {
      const double k = m.wavenumber;
      r += m.amplitude * std::cos(k * th);
      dr -= m.amplitude * k * std::sin(k * th);
      ddr -= m.amplitude * k * k * std::cos(k * th);
    }
    return base_radius * r;
  };

  constexpr int kSpeedNodes = 2048;
  std::vector<double> speed(kSpeedNodes);
  double rmin = std::numeric_limits<double>::max();
  for (int j = 0; j < kSpeedNodes; ++j) {
    const double th = kTwoPi * j / kSpeedNodes;
    double dr, ddr;
    const double r = radius(th, dr, ddr);
    dr *= base_radius;
    rmin = std::min(rmin, r);
    speed[j] = std::hypot(r, dr);
  }
  if (!(rmin > 0.0))
    throw std::domain_error("make_fourier_curve: polar radius is not positive");

  std::vector<double> sa, sb;
  real_dft(speed, sa, sb);
  const double mean_speed = sa[0];
  const double length = kTwoPi * mean_speed;
  while (sa.size() > 2 && std::abs(sa.back()) < 1e-17 * mean_speed &&
         std::abs(sb.back()) < 1e-17 * mean_speed) {
    sa.pop_back();
    sb.pop_back();
  }

  // cumulative arclength s(theta) from the spectral interpolant of |w'(theta)|
  auto arclength = [&](double th) {
    double s = mean_speed * th;
    for (std::size_t m = 1; m < sa.size(); ++m) {
      const double md = static_cast<double>(m);
      s += sa[m] * std::sin(md * th) / md - sb[m] * (std::cos(md * th) - 1.0) / md;
    }
    return s;
  };
  auto speed_at = [&](double th) {
    double dr, ddr;
    const double r = radius(th, dr, ddr);
    return std::hypot(r, dr * base_radius);
  };

  constexpr int kNodes = 1024;
  std::vector<double> xs(kNodes), ys(kNodes);
  double th;
  for (int j = 0; j < kNodes; ++j) {
    const double target = length * j / kNodes;
    th = kTwoPi * j / kNodes;
    for (int it = 0; it < 60; ++it) {
      const double step = (arclength(th) - target) / speed_at(th);
      th -= step;
      if (std::abs(step) < 1e-15)
        break;
    }
    double dr, ddr;
    const double r = radius(th, dr, ddr);
    xs[j] = center.x + r * std::cos(th);
    ys[j] = center.y + r * std::sin(th);
  }

  auto series = std::make_shared<FourierSeries>();
  real_dft(xs, series->cos_x, series->sin_x);
  real_dft(ys, series->cos_y, series->sin_y);
  // Nyquist terms are aliased; drop them along with the negligible tail.
  std::size_t keep = series->cos_x.size() - 1;
  const double cutoff = 1e-16 * base_radius;
  while (keep > 2) {
    const std::size_t m = keep - 1;
    if (std::abs(series->cos_x[m]) > cutoff || std::abs(series->sin_x[m]) > cutoff ||
        std::abs(series->cos_y[m]) > cutoff || std::abs(series->sin_y[m]) > cutoff)
      break;
    --keep;
  }
  series->cos_x.resize(keep);
  series->sin_x.resize(keep);
  series->cos_y.resize(keep);
  series->sin_y.resize(keep);

  ParamCurve curve(CurveKind::Closed, length, FourierShape{series});
  const double chord = arc_chord_constant(curve, 512);
  if (!(chord < kArcChordCap))
    throw std::domain_error("make_fourier_curve: curve self-intersects (arc-chord constant " +
                            std::to_string(chord) + ")");
  return curve;
}

double arc_chord_constant(const ParamCurve &curve, int samples) {
  if (samples < 2)
    throw std::invalid_argument("arc_chord_constant: need at least 2 samples");
  const bool closed = curve.closed();
  std::vector<Vec2> pts(samples);
  std::vector<double> alpha(samples);
  for (int j = 0; j < samples; ++j) {
    alpha[j] = closed ? static_cast<double>(j) / samples : static_cast<double>(j) / (samples - 1);
    pts[j] = curve.position(alpha[j]);
  }
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    for (int j = i + 1; j < samples; ++j) {
      const double gap = closed ? periodic_gap(alpha[i], alpha[j]) : std::abs(alpha[i] - alpha[j]);
      const double chord = norm(pts[i] - pts[j]);
      if (chord == 0.0)
        return std::numeric_limits<double>::infinity();
      sup = std::max(sup, gap / chord);
    }
  }
  return sup;
}

namespace {

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
}

std::vector<Vec2> polyline(const ParamCurve &c, int samples) {
  std::vector<Vec2> pts;
  const int denom = c.closed() ? samples : samples - 1;
  for (int j = 0; j < samples; ++j)
    pts.push_back(c.position(static_cast<double>(j) / denom));
  if (c.closed())
    pts.push_back(pts.front());
  return pts;
}

bool polylines_cross(const std::vector<Vec2> &p, const std::vector<Vec2> &q) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    for (std::size_t k = 0; k + 1 < q.size(); ++k)
      if (segments_cross(p[i], p[i + 1], q[k], q[k + 1]))
        return true;
  return false;
}

} // namespace

double pairwise_distance(std::span<const ParamCurve> curves, int samples, double disjoint_floor) {
  if (curves.size() < 2)
    throw std::invalid_argument("pairwise_distance: need at least two curves");
  auto sample = [samples](const ParamCurve &c, int j) {
    return c.closed() ? static_cast<double>(j) / samples : static_cast<double>(j) / (samples - 1);
  };
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t k = i + 1; k < curves.size(); ++k) {
      double d2min = std::numeric_limits<double>::max();
      double a_best = 0.0, b_best = 0.0;
      for (int p = 0; p < samples; ++p) {
        const double a = sample(curves[i], p);
        const Vec2 za = curves[i].position(a);
        for (int q = 0; q < samples; ++q) {
          const double b = sample(curves[k], q);
          const double d2 = norm2(za - curves[k].position(b));
          if (d2 < d2min) {
            d2min = d2;
            a_best = a;
            b_best = b;
          }
        }
      }
      // one Newton step on f(a, b) = |z_i(a) - z_k(b)|^2
      const CurvePoint pa = curves[i].eval(a_best);
      const CurvePoint pb = curves[k].eval(b_best);
      const Vec2 delta = pa.z - pb.z;
      const double ga = 2.0 * dot(delta, pa.d1);
      const double gb = -2.0 * dot(delta, pb.d1);
      const double haa = 2.0 * (norm2(pa.d1) + dot(delta, pa.d2));
      const double hbb = 2.0 * (norm2(pb.d1) - dot(delta, pb.d2));
      const double hab = -2.0 * dot(pa.d1, pb.d1);
      const double det = haa * hbb - hab * hab;
      if (det > 0.0 && haa > 0.0) {
        double na = a_best - (hbb * ga - hab * gb) / det;
        double nb = b_best - (haa * gb - hab * ga) / det;
        if (!curves[i].closed())
          na = std::clamp(na, 0.0, 1.0);
        if (!curves[k].closed())
          nb = std::clamp(nb, 0.0, 1.0);
        const double d2 = norm2(curves[i].position(na) - curves[k].position(nb));
        d2min = std::min(d2min, d2);
      }
      best = std::min(best, std::sqrt(d2min));
      if (polylines_cross(polyline(curves[i], samples), polyline(curves[k], samples)))
        best = 0.0;
    }
  }
  if (best < disjoint_floor)
    throw std::domain_error("pairwise_distance: curves overlap (distance " +
                            std::to_string(best) + ")");
  return best;
}

double enclosed_area(const ParamCurve &curve, int samples) {
  if (!curve.closed())
    throw std::invalid_argument("enclosed_area: curve is open");
  double area = 0.0;
  for (int j = 0; j < samples; ++j) {
    const CurvePoint p = curve.eval(static_cast<double>(j) / samples);
    area += cross(p.z, p.d1);
  }
  return 0.5 * area / samples;
}

double speed_residual(const ParamCurve &curve, int samples) {
  double worst = 0.0;
  const int denom = curve.closed() ? samples : samples - 1;
  for (int j = 0; j < samples; ++j) {
    const CurvePoint p = curve.eval(static_cast<double>(j) / denom);
    worst = std::max(worst, std::abs(norm(p.d1) / curve.length() - 1.0));
  }
  return worst;
}

int winding_number(const ParamCurve &curve, Vec2 p, int samples) {
  if (!curve.closed())
    return 0;
  double total = 0.0;
  Vec2 prev = curve.position(0.0) - p;
  for (int j = 1; j <= samples; ++j) {
    const Vec2 cur = curve.position(static_cast<double>(j) / samples) - p;
    total += std::atan2(cross(prev, cur), dot(prev, cur));
    prev = cur;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

double c2_norm(const ParamCurve &curve, int samples) {
  double worst = 0.0;
  const int denom = curve.closed() ? samples : samples - 1;
  for (int j = 0; j < samples; ++j) {
    const CurvePoint p = curve.eval(static_cast<double>(j) / denom);
    worst = std::max({worst, norm(p.z), norm(p.d1), norm(p.d2)});
  }
  return worst;
}

} // namespace vsheet::geometry
