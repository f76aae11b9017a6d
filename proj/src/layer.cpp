#include "vsheet/layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "vsheet/quadrature.hpp"

namespace vsheet::layer {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMinPanel = 1e-13;
constexpr int kMaxDepth = 60;

// Sheet parameter alpha as a function of the panel variable s in [0, 1].
double alpha_of(bool closed, double s) {
  return closed ? s : 0.5 * (1.0 - std::cos(kPi * s));
}

double dalpha_ds(bool closed, double s) { return closed ? 1.0 : 0.5 * kPi * std::sin(kPi * s); }

double s_of(bool closed, double alpha) {
  return closed ? alpha - std::floor(alpha) : std::acos(std::clamp(1.0 - 2.0 * alpha, -1.0, 1.0)) / kPi;
}

double segment_distance(Vec2 x, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = norm2(ab);
  double t = l2 > 0.0 ? dot(x - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(x - (a + t * ab));
}

// Distance from x to the quadrilateral with vertices in cyclic order.
double quad_distance(Vec2 x, const Vec2 (&q)[4]) {
  double winding = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 4; ++e) {
    const Vec2 a = q[e], b = q[(e + 1) % 4];
    best = std::min(best, segment_distance(x, a, b));
    winding += std::atan2(cross(a - x, b - x), dot(a - x, b - x));
  }
  if (std::abs(winding) > kPi)
    return 0.0;
  return best;
}

} // namespace

LayerPoint layer_map(const ParamCurve &curve, const StrengthProfile &gamma, double epsilon,
                     double alpha, double eta) {
  const geometry::CurvePoint p = curve.eval(alpha);
  const double L = curve.length();
  const double g = gamma.value(alpha);
  const double gp = g > 0.0 || curve.closed() ? gamma.derivative(alpha) : 0.0;
  const Vec2 n = perp(p.d1) / L;
  const double kappa = dot(p.d2, n) / (L * L);
  LayerPoint out;
  out.position = p.z + (epsilon * g * eta) * n;
  out.d_alpha = p.d1 + (epsilon * eta) * (gp * n + g * perp(p.d2) / L);
  out.d_eta = (epsilon * g) * n;
  out.jacobian = epsilon * L * g - epsilon * epsilon * L * g * g * kappa * eta;
  return out;
}

LayerGrid::LayerGrid(ParamCurve curve, StrengthProfile strength, double epsilon, int n_alpha,
                     int n_eta)
    : curve_(std::move(curve)), strength_(std::move(strength)), epsilon_(epsilon),
      n_alpha_(n_alpha), n_eta_(n_eta) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("layer: epsilon must be positive");
  if (n_alpha < 8 || n_eta < 8)
    throw std::invalid_argument("layer: need N_alpha, N_eta >= 8");
  const bool closed = curve_.closed();
  alpha_.resize(n_alpha);
  theta_.resize(n_alpha);
  alpha_weight_.resize(n_alpha);
  for (int j = 0; j < n_alpha; ++j) {
    if (closed) {
      alpha_[j] = static_cast<double>(j) / n_alpha;
      theta_[j] = alpha_[j];
      alpha_weight_[j] = 1.0 / n_alpha;
    } else {
      const double th = kPi * (j + 0.5) / n_alpha;
      theta_[j] = th;
      alpha_[j] = 0.5 * (1.0 - std::cos(th));
      alpha_weight_[j] = (kPi / n_alpha) * 0.5 * std::sin(th);
    }
  }
  const double h = 1.0 / (n_eta - 1);
  eta_.resize(n_eta);
  for (int k = 0; k < n_eta; ++k)
    eta_[k] = k == n_eta - 1 ? 0.0 : -1.0 + k * h;
  eta_weight_ = quad::extended_simpson_weights(n_eta, h);

  points_.resize(static_cast<std::size_t>(n_alpha) * n_eta);
  for (int j = 0; j < n_alpha; ++j)
    for (int k = 0; k < n_eta; ++k)
      points_[index(j, k)] = layer_map(curve_, strength_, epsilon, alpha_[j], eta_[k]);
}

LayerGrid build_layer(const ParamCurve &curve, const StrengthProfile &strength, double epsilon,
                      int n_alpha, int n_eta) {
  LayerGrid grid(curve, strength, epsilon, n_alpha, n_eta);
  for (const auto &p : grid.points())
    if (!(p.jacobian > 0.0))
      throw std::domain_error("build_layer: jacobian not positive at epsilon " +
                              std::to_string(epsilon) + " (layer folds over)");
  return grid;
}

std::vector<LayerGrid> build_layers(const SheetConfiguration &config, double epsilon,
                                    Resolution resolution) {
  std::vector<LayerGrid> out;
  out.reserve(config.size());
  for (const auto &c : config.components()) {
    const int na = c.curve.closed() ? resolution.alpha_closed : resolution.alpha_open;
    out.push_back(build_layer(c.curve, c.strength, epsilon, na, resolution.eta));
  }
  return out;
}

double layer_area(const LayerGrid &layer) {
  std::vector<double> rows(layer.n_alpha());
  for (int j = 0; j < layer.n_alpha(); ++j) {
    double s = 0.0;
    for (int k = 0; k < layer.n_eta(); ++k)
      s += layer.eta_weight()[k] * layer.at(j, k).jacobian;
    rows[j] = s * layer.alpha_weight()[j];
  }
  return quad::pairwise_sum(rows);
}

InjectivityCertificate injectivity_certificate(const ParamCurve &curve,
                                               const StrengthProfile &strength, double epsilon,
                                               int random_pairs, std::uint64_t seed) {
  InjectivityCertificate cert;
  const double L = curve.length();
  const double F = geometry::arc_chord_constant(curve, 512);
  const double c2 = geometry::c2_norm(curve);
  double gmax = 0.0;
  for (int j = 0; j <= 1024; ++j)
    gmax = std::max(gmax, std::abs(strength.value(j / 1024.0)));
  cert.c0 = std::min({L / 4.0, 1.0 / (2.0 * F), 0.5});
  cert.eps0 = std::min(L / (8.0 * c2 * gmax), L / (64.0 * F * c2 * gmax));

  const bool closed = curve.closed();
  auto ratio = [&](double a, double e, double b, double f) {
    const Vec2 ra = layer_map(curve, strength, epsilon, a, e).position;
    const Vec2 rb = layer_map(curve, strength, epsilon, b, f).position;
    double gap = std::abs(a - b);
    if (closed)
      gap = std::min(gap, 1.0 - gap);
    const double denom = gap + epsilon * std::abs(strength.value(a) * e - strength.value(b) * f);
    if (!(denom > 1e-300))
      return std::numeric_limits<double>::infinity();
    return norm(ra - rb) / denom;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> wide(-2.0, 2.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int p = 0; p < random_pairs; ++p) {
    const double a = unit(rng), b = unit(rng);
    worst = std::min(worst, ratio(a, wide(rng), b, wide(rng)));
  }
  // near-diagonal pairs, including purely transverse ones
  const int diagonal = std::max(1000, random_pairs / 10);
  for (int p = 0; p < diagonal; ++p) {
    const double a = unit(rng);
    const double delta = std::pow(10.0, -1.0 - 6.0 * unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    double b = p % 4 == 0 ? a : a + delta;
    if (closed)
      b -= std::floor(b);
    else if (b < 0.0 || b > 1.0)
      b = a - delta;
    worst = std::min(worst, ratio(a, wide(rng), b, wide(rng)));
  }
  cert.worst_pair_ratio = worst;
  cert.passed = worst >= cert.c0;
  return cert;
}

double min_cross_layer_distance(std::span<const LayerGrid> layers) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < layers.size(); ++a)
    for (std::size_t b = a + 1; b < layers.size(); ++b) {
      const auto &la = layers[a], &lb = layers[b];
      for (int ka : {0, la.n_eta() - 1})
        for (int j = 0; j < la.n_alpha(); ++j) {
          const Vec2 x = la.at(j, ka).position;
          for (int kb : {0, lb.n_eta() - 1})
            for (int i = 0; i < lb.n_alpha(); ++i)
              best = std::min(best, norm(x - lb.at(i, kb).position));
        }
    }
  return best;
}

// ---------------------------------------------------------------------------
// Velocity

LayerVelocity::LayerVelocity(std::span<const LayerGrid> layers, SelfCellPolicy policy,
                             int base_panels)
    : layers_(layers), policy_(policy) {
  if (base_panels < 1)
    throw std::invalid_argument("LayerVelocity: need at least one panel");
  const auto &g = quad::gauss8();
  cache_.resize(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (int p = 0; p < base_panels; ++p) {
      PanelCache pc;
      pc.s0 = static_cast<double>(p) / base_panels;
      pc.s1 = static_cast<double>(p + 1) / base_panels;
      const double half = 0.5 * (pc.s1 - pc.s0), mid = 0.5 * (pc.s1 + pc.s0);
      for (std::size_t q = 0; q < g.nodes.size(); ++q)
        pc.columns.push_back(column(k, mid + half * g.nodes[q], half * g.weights[q]));
      const auto &layer = layers[k];
      const double a0 = alpha_of(layer.closed(), pc.s0), a1 = alpha_of(layer.closed(), pc.s1);
      const double eps = layer.epsilon();
      pc.corners[0] = layer_map(layer.curve(), layer.strength(), eps, a0, 0.0).position;
      pc.corners[1] = layer_map(layer.curve(), layer.strength(), eps, a1, 0.0).position;
      pc.corners[2] = layer_map(layer.curve(), layer.strength(), eps, a1, -1.0).position;
      pc.corners[3] = layer_map(layer.curve(), layer.strength(), eps, a0, -1.0).position;
      pc.span = layer.curve().length() * std::abs(a1 - a0);
      cache_[k].push_back(std::move(pc));
    }
  }
}

LayerVelocity::Column LayerVelocity::column(std::size_t k, double s, double ds_weight) const {
  const LayerGrid &layer = layers_[k];
  const bool closed = layer.closed();
  const double alpha = alpha_of(closed, s);
  const auto &curve = layer.curve();
  const geometry::CurvePoint p = curve.eval(alpha);
  const double L = curve.length();
  const double eps = layer.epsilon();
  const double g = layer.strength().value(alpha);
  const Vec2 n = perp(p.d1) / L;
  const double kappa = dot(p.d2, n) / (L * L);
  return {p.z, (eps * g) * n, eps * L * g, -eps * eps * L * g * g * kappa,
          ds_weight * dalpha_ds(closed, s) / eps};
}

// eps^-1 int_{-1}^{0} K2(x - base - t dir) (j0 + j1 t) dt, times the panel weight.
Vec2 LayerVelocity::column_velocity(const Column &c, Vec2 x) const {
  const double D = norm2(c.dir);
  if (!(D > 0.0))
    return {};
  const Vec2 r0 = x - c.base;
  const double t0 = dot(r0, c.dir) / D;
  const double b = cross(c.dir, r0) / D;
  const double ua = -1.0 - t0, ub = -t0;
  const double c0 = c.j0 + c.j1 * t0;
  const double A = b == 0.0 ? 0.0 : std::atan(ub / b) - std::atan(ua / b);
  const double qa = std::max(ua * ua + b * b, 1e-300), qb = std::max(ub * ub + b * b, 1e-300);
  const double I1 = 0.5 * std::log(qb / qa);
  const double I2 = (ub - ua) - b * A;
  const Vec2 dp = perp(c.dir);
  const Vec2 v = (-c0 * A) * c.dir + I1 * (-b * c.j1 * c.dir - c0 * dp) - (c.j1 * I2) * dp;
  return (c.weight / (kTwoPi * D)) * v;
}

double LayerVelocity::distance_to_panel(std::size_t k, double s0, double s1, Vec2 x) const {
  const LayerGrid &layer = layers_[k];
  const bool closed = layer.closed();
  const double a0 = alpha_of(closed, s0), a1 = alpha_of(closed, s1);
  const double eps = layer.epsilon();
  const Vec2 q[4] = {layer_map(layer.curve(), layer.strength(), eps, a0, 0.0).position,
                     layer_map(layer.curve(), layer.strength(), eps, a1, 0.0).position,
                     layer_map(layer.curve(), layer.strength(), eps, a1, -1.0).position,
                     layer_map(layer.curve(), layer.strength(), eps, a0, -1.0).position};
  return quad_distance(x, q);
}

Vec2 LayerVelocity::adaptive(std::size_t k, double s0, double s1, Vec2 x, int depth) const {
  const LayerGrid &layer = layers_[k];
  const double width = s1 - s0;
  const double span = layer.curve().length() *
                      std::abs(alpha_of(layer.closed(), s1) - alpha_of(layer.closed(), s0));
  const bool accept = width < kMinPanel || depth >= kMaxDepth ||
                      distance_to_panel(k, s0, s1, x) >= 2.0 * span;
  if (!accept) {
    const double mid = 0.5 * (s0 + s1);
    return adaptive(k, s0, mid, x, depth + 1) + adaptive(k, mid, s1, x, depth + 1);
  }
  const auto &g = quad::gauss8();
  const double half = 0.5 * width, mid = 0.5 * (s0 + s1);
  Vec2 v;
  for (std::size_t q = 0; q < g.nodes.size(); ++q)
    v += column_velocity(column(k, mid + half * g.nodes[q], half * g.weights[q]), x);
  return v;
}

Vec2 LayerVelocity::panel(std::size_t k, double s0, double s1, Vec2 x,
                          std::optional<double> split) const {
  if (split && *split > s0 && *split < s1)
    return adaptive(k, s0, *split, x, 1) + adaptive(k, *split, s1, x, 1);
  return adaptive(k, s0, s1, x, 0);
}

Vec2 LayerVelocity::midpoint(std::size_t k, Vec2 x) const {
  const LayerGrid &layer = layers_[k];
  const int na = layer.n_alpha(), ne = layer.n_eta() - 1;
  const bool closed = layer.closed();
  Vec2 v;
  double skip_d = std::numeric_limits<double>::infinity();
  Vec2 skip_v;
  for (int j = 0; j < na; ++j) {
    const double s = (j + 0.5) / na;
    const double alpha = alpha_of(closed, s);
    const double w_alpha = dalpha_ds(closed, s) / na;
    for (int e = 0; e < ne; ++e) {
      const double eta = -1.0 + (e + 0.5) / ne;
      const LayerPoint p = layer_map(layer.curve(), layer.strength(), layer.epsilon(), alpha, eta);
      const double w = p.jacobian * w_alpha / ne / layer.epsilon();
      const Vec2 r = x - p.position;
      const double cell = std::max(norm(p.d_alpha) * w_alpha, norm(p.d_eta) / ne);
      if (norm(r) < cell && norm(r) < skip_d) {
        // the cell holding x is replaced by a disk whose contribution is zero
        if (skip_d < std::numeric_limits<double>::infinity())
          v += skip_v;
        skip_d = norm(r);
        skip_v = norm2(r) > 0.0 ? w * br::kernel_K2(r) : Vec2{};
        continue;
      }
      if (norm2(r) > 0.0)
        v += w * br::kernel_K2(r);
    }
  }
  return v;
}

Vec2 LayerVelocity::operator()(Vec2 x, std::optional<TargetHint> hint) const {
  Vec2 v;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (policy_ == SelfCellPolicy::MidpointDisk) {
      v += midpoint(k, x);
      continue;
    }
    std::optional<double> split;
    if (hint && hint->layer == k)
      split = s_of(layers_[k].closed(), hint->alpha);
    for (const PanelCache &pc : cache_[k]) {
      const bool splits = split && *split > pc.s0 && *split < pc.s1;
      if (!splits && quad_distance(x, pc.corners) >= 2.0 * pc.span) {
        for (const Column &c : pc.columns)
          v += column_velocity(c, x);
      } else {
        v += panel(k, pc.s0, pc.s1, x, split);
      }
    }
  }
  return v;
}

std::vector<Vec2> LayerVelocity::on_layer(std::size_t i) const {
  const LayerGrid &layer = layers_[i];
  const int n = static_cast<int>(layer.points().size());
  std::vector<Vec2> out(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int idx = 0; idx < n; ++idx) {
    const int j = idx / layer.n_eta();
    out[idx] = (*this)(layer.points()[idx].position, TargetHint{i, layer.alpha()[j]});
  }
  return out;
}

std::vector<Vec2> LayerVelocity::on_layer_serial(std::size_t i) const {
  const LayerGrid &layer = layers_[i];
  const int n = static_cast<int>(layer.points().size());
  std::vector<Vec2> out(n);
  for (int idx = 0; idx < n; ++idx) {
    const int j = idx / layer.n_eta();
    out[idx] = (*this)(layer.points()[idx].position, TargetHint{i, layer.alpha()[j]});
  }
  return out;
}

Vec2 layer_velocity(std::span<const LayerGrid> layers, Vec2 x, SelfCellPolicy policy) {
  return LayerVelocity(layers, policy)(x);
}

Vec2 linear_profile(const br::BREvaluator &br, std::size_t i, double alpha, double eta) {
  const auto &c = br.config()[i];
  const Vec2 s = c.curve.frame(alpha).tangent;
  return br.evaluate(i, alpha) - ((eta + 0.5) * c.strength.value(alpha)) * s;
}

double linearity_defect(const LayerGrid &layer, std::span<const Vec2> velocity,
                        const br::BREvaluator &br, std::size_t i) {
  if (velocity.size() != layer.points().size())
    throw std::invalid_argument("linearity_defect: velocity does not match the grid");
  const auto &c = br.config()[i];
  std::vector<double> worst(layer.n_alpha(), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < layer.n_alpha(); ++j) {
    const double a = layer.alpha()[j];
    const Vec2 base = br.evaluate(i, a);
    const Vec2 jump = c.strength.value(a) * c.curve.frame(a).tangent;
    for (int k = 0; k < layer.n_eta(); ++k) {
      const Vec2 g = base - (layer.eta()[k] + 0.5) * jump;
      worst[j] = std::max(worst[j], norm(velocity[layer.index(j, k)] - g));
    }
  }
  return *std::max_element(worst.begin(), worst.end());
}

} // namespace vsheet::layer
