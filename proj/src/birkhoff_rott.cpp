#include "vsheet/birkhoff_rott.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "vsheet/quadrature.hpp"

namespace vsheet::br {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

template <class... Ts> struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

// Endpoint-clustered nodes a = (1 - cos theta)/2 at theta midpoints, with
// the weight of d(alpha).
void open_node(int j, int m, double &alpha, double &weight) {
  const double th = kPi * (j + 0.5) / m;
  alpha = 0.5 * (1.0 - std::cos(th));
  weight = (kPi / m) * 0.5 * std::sin(th);
}

} // namespace

// ---------------------------------------------------------------------------
// Strength profiles

StrengthProfile::StrengthProfile(Law law, Regularity regularity, double holder_exponent)
    : law_(std::move(law)), regularity_(regularity), holder_exponent_(holder_exponent) {
  if (!(holder_exponent > 0.0 && holder_exponent <= 1.0))
    throw std::invalid_argument("strength: Hoelder exponent must lie in (0, 1]");
  if (regularity == Regularity::OpenHolder && holder_exponent >= 1.0)
    throw std::invalid_argument("strength: open profiles need a Hoelder exponent below 1");
}

double StrengthProfile::value(double alpha) const {
  return std::visit(
      Overloaded{
          [](const ConstantStrength &c) { return c.value; },
          [alpha](const FourierStrength &f) {
            double g = f.mean;
            for (std::size_t m = 0; m < f.cos_coeffs.size(); ++m)
              g += f.cos_coeffs[m] * std::cos(kTwoPi * (m + 1.0) * alpha);
            for (std::size_t m = 0; m < f.sin_coeffs.size(); ++m)
              g += f.sin_coeffs[m] * std::sin(kTwoPi * (m + 1.0) * alpha);
            return g;
          },
          [alpha](const SemicircleStrength &s) {
            const double t = std::clamp(alpha, 0.0, 1.0);
            return 2.0 * s.half_length * s.amplitude * std::sqrt(t * (1.0 - t));
          }},
      law_);
}

double StrengthProfile::derivative(double alpha) const {
  return std::visit(
      Overloaded{[](const ConstantStrength &) { return 0.0; },
                 [alpha](const FourierStrength &f) {
                   double g = 0.0;
                   for (std::size_t m = 0; m < f.cos_coeffs.size(); ++m) {
                     const double w = kTwoPi * (m + 1.0);
                     g -= w * f.cos_coeffs[m] * std::sin(w * alpha);
                   }
                   for (std::size_t m = 0; m < f.sin_coeffs.size(); ++m) {
                     const double w = kTwoPi * (m + 1.0);
                     g += w * f.sin_coeffs[m] * std::cos(w * alpha);
                   }
                   return g;
                 },
                 [alpha](const SemicircleStrength &s) {
                   const double r = std::sqrt(alpha * (1.0 - alpha));
                   if (!(r > 0.0))
                     return std::numeric_limits<double>::infinity();
                   return s.half_length * s.amplitude * (1.0 - 2.0 * alpha) / r;
                 }},
      law_);
}

bool StrengthProfile::is_constant() const {
  if (std::holds_alternative<ConstantStrength>(law_))
    return true;
  if (const auto *f = std::get_if<FourierStrength>(&law_)) {
    auto zero = [](double c) { return c == 0.0; };
    return std::all_of(f->cos_coeffs.begin(), f->cos_coeffs.end(), zero) &&
           std::all_of(f->sin_coeffs.begin(), f->sin_coeffs.end(), zero);
  }
  return false;
}

StrengthProfile constant_strength(double gamma0) {
  return {ConstantStrength{gamma0}, Regularity::ClosedC2};
}

StrengthProfile fourier_strength(double mean, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs) {
  return {FourierStrength{mean, std::move(cos_coeffs), std::move(sin_coeffs)},
          Regularity::ClosedC2};
}

StrengthProfile semicircle_strength(double amplitude, double half_length) {
  if (!(half_length > 0.0))
    throw std::invalid_argument("semicircle strength: half length must be positive");
  return {SemicircleStrength{amplitude, half_length}, Regularity::OpenHolder, 0.5};
}

StrengthProfile rotating_segment_strength(double omega, double half_length) {
  return semicircle_strength(2.0 * omega, half_length);
}

double holder_seminorm(const StrengthProfile &gamma, double b, int samples) {
  if (samples < 2)
    throw std::invalid_argument("holder_seminorm: need at least two samples");
  std::vector<double> g(samples);
  for (int j = 0; j < samples; ++j)
    g[j] = gamma.value(static_cast<double>(j) / (samples - 1));
  double best = 0.0;
  for (int j = 0; j < samples; ++j)
    for (int k = j + 1; k < samples; ++k) {
      const double d = static_cast<double>(k - j) / (samples - 1);
      best = std::max(best, std::abs(g[k] - g[j]) / std::pow(d, b));
    }
  return best;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

void validate_component(const SheetComponent &c, std::size_t index) {
  const bool closed = c.curve.closed();
  const auto &g = c.strength;
  std::ostringstream where;
  where << "sheet " << index << ": ";
  if (closed && g.regularity() != Regularity::ClosedC2)
    throw std::invalid_argument(where.str() + "closed curve needs a closed C^2 strength");
  if (!closed && g.regularity() != Regularity::ClosedC2 && g.regularity() != Regularity::OpenHolder)
    throw std::invalid_argument(where.str() + "unknown regularity");
  if (!closed && g.regularity() == Regularity::ClosedC2)
    throw std::invalid_argument(where.str() + "open curve tagged with closed C^2 regularity");
  constexpr int kSamples = 512;
  for (int j = 0; j <= kSamples; ++j) {
    const double a = static_cast<double>(j) / kSamples;
    const double v = g.value(a);
    const bool tip = !closed && (j == 0 || j == kSamples);
    if (tip) {
      if (std::abs(v) > 1e-12)
        throw std::invalid_argument(where.str() + "strength must vanish at the tips of an open sheet");
    } else if (!(v > 0.0)) {
      throw std::invalid_argument(where.str() + "strength must be positive");
    }
  }
}

} // namespace

SheetConfiguration::SheetConfiguration(std::vector<SheetComponent> components, double omega,
                                       double disjoint_floor)
    : components_(std::move(components)), omega_(omega) {
  if (components_.empty())
    throw std::invalid_argument("configuration: no sheets");
  if (!std::isfinite(omega))
    throw std::invalid_argument("configuration: omega must be finite");
  for (std::size_t i = 0; i < components_.size(); ++i)
    validate_component(components_[i], i);
  std::stable_partition(components_.begin(), components_.end(),
                        [](const SheetComponent &c) { return c.curve.closed(); });
  closed_count_ = static_cast<std::size_t>(
      std::count_if(components_.begin(), components_.end(),
                    [](const SheetComponent &c) { return c.curve.closed(); }));
  if (components_.size() == 1) {
    separation_ = std::numeric_limits<double>::infinity();
  } else {
    std::vector<ParamCurve> curves;
    for (const auto &c : components_)
      curves.push_back(c.curve);
    separation_ = geometry::pairwise_distance(curves, 1024, disjoint_floor);
  }
}

SheetConfiguration SheetConfiguration::transformed(double angle, Vec2 shift) const {
  std::vector<SheetComponent> moved;
  for (const auto &c : components_)
    moved.push_back({c.curve.transformed(angle, shift), c.strength});
  return SheetConfiguration(std::move(moved), omega_, 0.0);
}

// ---------------------------------------------------------------------------
// Kernel and evaluator

Vec2 kernel_K2(Vec2 x) {
  const double r2 = norm2(x);
  if (!(r2 > 0.0))
    throw std::domain_error("kernel_K2: singular at the origin");
  return perp(x) / (kTwoPi * r2);
}

BREvaluator::BREvaluator(const SheetConfiguration &config, QuadratureOptions options)
    : config_(&config), options_(options) {
  if (options.closed_nodes < 8 || options.closed_nodes % 2 != 0 || options.open_nodes < 8)
    throw std::invalid_argument("BREvaluator: node counts must be even and at least 8");
  nodes_.resize(config.size());
  for (std::size_t k = 0; k < config.size(); ++k) {
    const auto &c = config[k];
    const double L = c.curve.length();
    Nodes &nd = nodes_[k];
    if (c.curve.closed()) {
      const int n = options.closed_nodes;
      for (int j = 0; j < n; ++j) {
        const double a = static_cast<double>(j) / n;
        nd.position.push_back(c.curve.position(a));
        nd.weight.push_back(c.strength.value(a) * L / n);
      }
    } else {
      const int n = options.open_nodes;
      for (int j = 0; j < n; ++j) {
        double a, w;
        open_node(j, n, a, w);
        nd.position.push_back(c.curve.position(a));
        nd.weight.push_back(c.strength.value(a) * L * w);
      }
    }
  }
}

Vec2 BREvaluator::induced(std::size_t k, Vec2 x) const {
  const Nodes &nd = nodes_.at(k);
  Vec2 v;
  for (std::size_t j = 0; j < nd.position.size(); ++j)
    v += nd.weight[j] * kernel_K2(x - nd.position[j]);
  return v;
}

Vec2 BREvaluator::self_term(std::size_t i, double alpha) const {
  const auto &c = (*config_)[i];
  const auto &curve = c.curve;
  const auto &gamma = c.strength;
  const double L = curve.length();
  if (curve.closed()) {
    const int n = options_.closed_nodes;
    const Vec2 z = curve.position(alpha);
    Vec2 v;
    for (int m = 1; m < n; m += 2) {
      const double a = alpha + static_cast<double>(m) / n;
      v += (gamma.value(a - std::floor(a)) * L * 2.0 / n) * kernel_K2(z - curve.position(a));
    }
    return v;
  }

  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("BR: open sheets are evaluated at interior points only");
  const geometry::CurvePoint p = curve.eval(alpha);
  const double g0 = gamma.value(alpha);
  const double g1 = gamma.derivative(alpha);
  const Vec2 limit = -(g1 * perp(p.d1) + 0.5 * g0 * perp(p.d2)) / (kTwoPi * L);
  const Nodes &nd = nodes_[i];
  const int n = options_.open_nodes;
  Vec2 v;
  for (int j = 0; j < n; ++j) {
    double a, w;
    open_node(j, n, a, w);
    const double d = alpha - a;
    if (std::abs(d) < 1e-9) {
      v += w * limit;
      continue;
    }
    v += nd.weight[j] * kernel_K2(p.z - nd.position[j]);
    v -= (g0 * L * w) * kernel_K2(d * p.d1);
  }
  const Vec2 normal = perp(p.d1) / L;
  v += (g0 / kTwoPi * std::log(alpha / (1.0 - alpha))) * normal;
  return v;
}

Vec2 BREvaluator::evaluate(std::size_t i, double alpha) const {
  Vec2 v = self_term(i, alpha);
  const Vec2 z = (*config_)[i].curve.position(alpha);
  for (std::size_t k = 0; k < config_->size(); ++k)
    if (k != i)
      v += induced(k, z);
  return v;
}

Vec2 evaluate_BR(const SheetConfiguration &config, std::size_t i, double alpha, double tolerance,
                 QuadratureOptions options) {
  if (i >= config.size())
    throw std::out_of_range("evaluate_BR: sheet index out of range");
  const Vec2 coarse = BREvaluator(config, options).evaluate(i, alpha);
  QuadratureOptions fine_options{2 * options.closed_nodes, 2 * options.open_nodes};
  const Vec2 fine = BREvaluator(config, fine_options).evaluate(i, alpha);
  if (norm(fine - coarse) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "BR quadrature not converged at sheet " << i << ", alpha " << alpha << ": ("
        << coarse.x << ", " << coarse.y << ") vs (" << fine.x << ", " << fine.y << ")";
    throw QuadratureError(msg.str(), coarse, fine);
  }
  return fine;
}

OneSided one_sided_velocities(const BREvaluator &br, std::size_t i, double alpha) {
  const auto &c = br.config()[i];
  const Vec2 v = br.evaluate(i, alpha);
  const Vec2 s = c.curve.frame(alpha).tangent;
  const double half = 0.5 * c.strength.value(alpha);
  return {v - half * s, v + half * s};
}

// ---------------------------------------------------------------------------
// Residuals

double BRResidualReport::max_normal() const {
  double m = 0.0;
  for (const auto &c : curves)
    m = std::max(m, c.normal_max);
  return m;
}

double BRResidualReport::max_tangential() const {
  double m = 0.0;
  for (const auto &c : curves)
    m = std::max(m, c.tangential);
  return m;
}

double BRResidualReport::max_vector() const {
  double m = 0.0;
  for (const auto &c : curves)
    m = std::max(m, c.vector_max);
  return m;
}

std::vector<double> residual_samples(const ParamCurve &curve, ResidualSampling sampling) {
  const int n = sampling.samples;
  if (n < 2)
    throw std::invalid_argument("residual_samples: need at least two samples");
  std::vector<double> a(n);
  if (curve.closed()) {
    for (int j = 0; j < n; ++j)
      a[j] = static_cast<double>(j) / n;
  } else {
    const double gap = sampling.endpoint_gap;
    for (int j = 0; j < n; ++j)
      a[j] = gap + (1.0 - 2.0 * gap) * 0.5 * (1.0 - std::cos(kPi * (j + 0.5) / n));
  }
  return a;
}

BRResidualReport stationarity_residual(const SheetConfiguration &config, ResidualSampling sampling,
                                       QuadratureOptions options) {
  const BREvaluator br(config, options);
  BRResidualReport report;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto &c = config[i];
    const std::vector<double> alphas = residual_samples(c.curve, sampling);
    const int n = static_cast<int>(alphas.size());
    std::vector<double> normal(n), tangential(n), magnitude(n);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) {
      const double a = alphas[j];
      const Frame f = c.curve.frame(a);
      const Vec2 w = br.evaluate(i, a) - config.omega() * perp(c.curve.position(a));
      normal[j] = dot(w, f.normal);
      tangential[j] = dot(w, f.tangent) * c.strength.value(a);
      magnitude[j] = norm(w);
    }
    CurveResidual r;
    r.closed = c.curve.closed();
    for (int j = 0; j < n; ++j)
      r.normal_max = std::max(r.normal_max, std::abs(normal[j]));
    if (r.closed) {
      r.constant = quad::pairwise_sum(tangential) / n;
      for (int j = 0; j < n; ++j)
        r.tangential = std::max(r.tangential, std::abs(tangential[j] - r.constant));
    } else {
      for (int j = 0; j < n; ++j) {
        r.tangential = std::max(r.tangential, std::abs(tangential[j]));
        r.vector_max = std::max(r.vector_max, magnitude[j]);
      }
    }
    report.curves.push_back(r);
  }
  return report;
}

std::vector<double> concentricity_residual(const SheetConfiguration &config, int samples) {
  std::vector<geometry::CircleShape> circles;
  std::vector<double> circulation;
  for (const auto &c : config.components()) {
    const auto circle = c.curve.circle();
    if (!circle || !c.strength.is_constant())
      throw std::invalid_argument(
          "concentricity_residual: every sheet must be a circle of constant strength");
    circles.push_back(*circle);
    circulation.push_back(c.strength.value(0.0) * c.curve.length());
  }
  std::vector<double> out(circles.size(), 0.0);
  for (std::size_t k = 0; k < circles.size(); ++k) {
    const auto &curve = config[k].curve;
    for (int j = 0; j < samples; ++j) {
      const double a = static_cast<double>(j) / samples;
      const Vec2 x = curve.position(a);
      const Vec2 n = curve.frame(a).normal;
      double u = 0.0;
      for (std::size_t i = 0; i < circles.size(); ++i) {
        if (i == k)
          continue;
        const Vec2 r = x - circles[i].center;
        const double r2 = norm2(r);
        if (r2 < circles[i].radius * circles[i].radius)
          continue;
        u += circulation[i] * dot(perp(r), n) / (kTwoPi * r2);
      }
      out[k] = std::max(out[k], std::abs(u));
    }
  }
  return out;
}

} // namespace vsheet::br
