#include "vsheet/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vsheet/quadrature.hpp"

namespace vsheet::functional {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

IValues compute_I(double omega, std::span<const LayerGrid> layers,
                  std::span<const PoissonSolution> solutions,
                  std::span<const std::vector<Vec2>> velocity) {
  if (solutions.size() != layers.size() || velocity.size() != layers.size())
    throw std::invalid_argument("compute_I: need one solution and one velocity field per layer");
  std::vector<double> full, tilde, rot, direct;
  double total_area = 0.0;
  double eps = 0.0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerGrid &layer = layers[i];
    const PoissonSolution &sol = solutions[i];
    const auto &v = velocity[i];
    if (sol.p.size() != layer.points().size() || v.size() != layer.points().size())
      throw std::invalid_argument("compute_I: field sizes do not match layer " + std::to_string(i));
    eps = layer.epsilon();
    total_area += layer::layer_area(layer);
    for (int j = 0; j < layer.n_alpha(); ++j) {
      double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
      for (int k = 0; k < layer.n_eta(); ++k) {
        const std::size_t idx = layer.index(j, k);
        const auto &pt = layer.at(j, k);
        const double w = layer.eta_weight()[k] * pt.jacobian;
        const Vec2 x = pt.position;
        const Vec2 u = x + sol.gradient[idx];
        const Vec2 stream = -perp(v[idx]);
        a += w * dot(u, stream - omega * x);
        b += w * dot(u, stream);
        c += w * dot(u, x);
        d += w * dot(x, stream);
      }
      const double wa = layer.alpha_weight()[j] / eps;
      full.push_back(a * wa);
      tilde.push_back(b * wa);
      rot.push_back(c * wa);
      direct.push_back(d * wa);
    }
  }
  IValues out;
  out.I_eps = quad::pairwise_sum(full);
  out.I_tilde = quad::pairwise_sum(tilde);
  out.J_eps = quad::pairwise_sum(rot);
  out.consistency = std::abs(out.I_eps - (out.I_tilde - omega * out.J_eps));
  out.I1_direct = quad::pairwise_sum(direct);
  out.I1_area = total_area * total_area / (4.0 * kPi * eps * eps);
  return out;
}

std::vector<std::vector<bool>> nesting_relation(const SheetConfiguration &config) {
  const std::size_t n = config.size();
  std::vector<std::vector<bool>> inside(n, std::vector<bool>(n, false));
  constexpr int kProbes = 8;
  for (std::size_t i = 0; i < n; ++i) {
    if (!config[i].curve.closed())
      continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i)
        continue;
      int votes = 0;
      for (int m = 0; m < kProbes; ++m) {
        const Vec2 p = config[j].curve.position((m + 0.5) / kProbes);
        if (geometry::winding_number(config[i].curve, p) != 0)
          ++votes;
      }
      inside[j][i] = 2 * votes > kProbes;
    }
  }
  return inside;
}

double cauchy_schwarz_gap(const br::StrengthProfile &gamma, int samples) {
  std::vector<double> g(samples), inv(samples);
  for (int j = 0; j < samples; ++j) {
    const double v = gamma.value((j + 0.5) / samples);
    g[j] = v / samples;
    inv[j] = 1.0 / (v * samples);
  }
  return quad::pairwise_sum(g) * quad::pairwise_sum(inv) - 1.0;
}

double isoperimetric_gap(const geometry::ParamCurve &curve) {
  const double L = curve.length();
  return 1.0 - 4.0 * kPi * geometry::enclosed_area(curve) / (L * L);
}

FunctionalReport positivity_decomposition(const SheetConfiguration &config,
                                          std::span<const LayerGrid> layers,
                                          std::span<const PoissonSolution> solutions,
                                          const IValues &values) {
  if (layers.size() != config.size() || solutions.size() != config.size())
    throw std::invalid_argument("positivity_decomposition: one layer and solution per sheet");
  FunctionalReport r;
  r.values = values;
  r.epsilon = layers.front().epsilon();
  const double eps2 = r.epsilon * r.epsilon;
  const std::size_t n = config.size();
  std::vector<double> area(n);
  for (std::size_t i = 0; i < n; ++i) {
    area[i] = layer::layer_area(layers[i]);
    const double ip = elliptic::integrate(layers[i], solutions[i].p);
    r.A.push_back((area[i] * area[i] / (4.0 * kPi) - ip) / eps2);
    const auto &c = config[i];
    if (c.curve.closed()) {
      const int samples = 4096;
      std::vector<double> g(samples), inv(samples);
      for (int j = 0; j < samples; ++j) {
        const double v = c.strength.value((j + 0.5) / samples);
        g[j] = v / samples;
        inv[j] = 1.0 / (v * samples);
      }
      const double ig = quad::pairwise_sum(g), iinv = quad::pairwise_sum(inv);
      const double L = c.curve.length();
      const double U = geometry::enclosed_area(c.curve);
      r.cs_gap.push_back(ig * iinv - 1.0);
      r.iso_gap.push_back(1.0 - 4.0 * kPi * U / (L * L));
      r.surrogate.push_back(L * L / (4.0 * kPi) * (ig / iinv) * (iinv * ig - 4.0 * kPi * U / (L * L)));
    } else {
      r.cs_gap.push_back(kNaN);
      r.iso_gap.push_back(kNaN);
      r.surrogate.push_back(kNaN);
    }
  }
  r.nesting = nesting_relation(config);
  r.lower_bound = std::accumulate(r.A.begin(), r.A.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ind = 1.0 - (r.nesting[j][i] ? 1.0 : 0.0) - (r.nesting[i][j] ? 1.0 : 0.0);
      const double b = ind * area[i] * area[j] / (4.0 * kPi * eps2);
      r.B.push_back({i, j, b});
      r.lower_bound += 2.0 * b;
    }
  return r;
}

RateFit fit_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_log_slope: need at least two matching points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::max(std::abs(y[i]), 1e-300));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  RateFit fit;
  fit.exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (my + fit.exponent * (lx[i] - mx));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
      ++j;
    const double mean = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      r[order[k]] = mean;
    i = j + 1;
  }
  return r;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman: need at least two matching points");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double m = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - m) * (ry[i] - m);
    sxx += (rx[i] - m) * (rx[i] - m);
    syy += (ry[i] - m) * (ry[i] - m);
  }
  if (sxx == 0.0 || syy == 0.0)
    return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::EquilibriumConsistent:
    return "EQUILIBRIUM_CONSISTENT";
  case Verdict::Obstructed:
    return "OBSTRUCTED";
  case Verdict::Inconclusive:
    return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

VerdictReport rigidity_verdict(const VerdictInputs &in, VerdictThresholds t) {
  if (in.epsilon.size() < 3 || in.value.size() != in.epsilon.size())
    throw std::invalid_argument("rigidity_verdict: need at least three sweep values");
  VerdictReport r;
  r.floor = *std::min_element(in.value.begin(), in.value.end());
  r.spearman = spearman(in.epsilon, in.value);
  const bool all_zero = std::all_of(in.value.begin(), in.value.end(),
                                    [&](double v) { return std::abs(v) <= t.zero_tol; });
  r.exponent = all_zero ? 0.0 : fit_log_slope(in.epsilon, in.value).exponent;

  std::ostringstream why;
  why.precision(6);
  if (r.floor > t.floor_tol && (r.spearman <= 0.0 || r.exponent <= t.min_exponent)) {
    r.verdict = Verdict::Obstructed;
    why << "I stays above " << t.floor_tol << " (min " << r.floor << ", exponent " << r.exponent
        << ", spearman " << r.spearman << ")";
  } else if (all_zero || r.exponent > t.min_exponent) {
    if (in.stationary) {
      r.verdict = Verdict::EquilibriumConsistent;
      if (all_zero)
        why << "|I| <= " << t.zero_tol << " across the sweep";
      else
        why << "|I| decays with exponent " << r.exponent;
    } else {
      r.verdict = Verdict::Inconclusive;
      why << "I vanishes but the configuration is not stationary";
      if (!in.residual_note.empty())
        why << ": " << in.residual_note;
    }
  } else {
    r.verdict = Verdict::Inconclusive;
    why << "no positive floor and no decay (min " << r.floor << ", exponent " << r.exponent << ")";
  }
  r.reason = why.str();
  return r;
}

} // namespace vsheet::functional
