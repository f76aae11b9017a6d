#pragma once

// First-variation functional of the layered configuration
//
//   I   = sum_i eps^-1 int_{D_i} (x + grad p) . (-v^perp - Omega x) dx
//   I~  = sum_i eps^-1 int_{D_i} (x + grad p) . (-v^perp) dx
//   J   = sum_i eps^-1 int_{D_i} (x + grad p) . x dx,      I = I~ - Omega J
//
// together with the per-layer and per-pair terms of its lower bound.

#include <span>
#include <string>
#include <vector>

#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/elliptic.hpp"
#include "vsheet/layer.hpp"

namespace vsheet::functional {

using br::SheetConfiguration;
using elliptic::PoissonSolution;
using layer::LayerGrid;

struct IValues {
  double I_eps = 0.0;
  double I_tilde = 0.0;
  double J_eps = 0.0;
  /// |I - (I~ - Omega J)|
  double consistency = 0.0;
  /// eps^-1 sum_i int_{D_i} x . (-v^perp) dx by quadrature ...
  double I1_direct = 0.0;
  /// ... and its closed form (sum_i |D_i|)^2 / (4 pi eps^2).
  double I1_area = 0.0;
};

/// `velocity[i]` holds v at the nodes of layer i (LayerVelocity::on_layer).
IValues compute_I(double omega, std::span<const LayerGrid> layers,
                  std::span<const PoissonSolution> solutions,
                  std::span<const std::vector<Vec2>> velocity);

/// inside[j][i] is true when sheet j lies in the region enclosed by closed sheet i.
std::vector<std::vector<bool>> nesting_relation(const SheetConfiguration &config);

struct PairTerm {
  std::size_t i = 0, j = 0;
  double value = 0.0;
};

struct FunctionalReport {
  double epsilon = 0.0;
  IValues values;
  std::vector<double> A;         ///< per sheet
  std::vector<PairTerm> B;       ///< per unordered pair i < j
  std::vector<std::vector<bool>> nesting;
  std::vector<double> cs_gap;    ///< per sheet; NaN for open sheets
  std::vector<double> iso_gap;   ///< per sheet; NaN for open sheets
  std::vector<double> surrogate; ///< analytic lower bound of A_i; NaN for open sheets
  /// sum_i A_i + sum_{i != j} B_ij (ordered pairs).
  double lower_bound = 0.0;
};

FunctionalReport positivity_decomposition(const SheetConfiguration &config,
                                          std::span<const LayerGrid> layers,
                                          std::span<const PoissonSolution> solutions,
                                          const IValues &values);

/// int gamma * int gamma^-1 - 1 over a uniform sample.
double cauchy_schwarz_gap(const br::StrengthProfile &gamma, int samples = 4096);
/// 1 - 4 pi |U| / L^2.
double isoperimetric_gap(const geometry::ParamCurve &curve);

/// Least-squares slope of log|y| against log x.
struct RateFit {
  double exponent = 0.0;
  double residual = 0.0; ///< rms residual of the log-log fit
};
RateFit fit_log_slope(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation.
double spearman(std::span<const double> x, std::span<const double> y);

enum class Verdict { EquilibriumConsistent, Obstructed, Inconclusive };

std::string to_string(Verdict v);

struct VerdictInputs {
  std::vector<double> epsilon;
  std::vector<double> value; ///< I^eps along the sweep
  bool stationary = false;   ///< stationarity residuals within tolerance
  std::string residual_note; ///< explanation when not stationary
};

struct VerdictReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  double floor = 0.0;    ///< min over the sweep
  double exponent = 0.0; ///< fitted exponent of |I| against eps
  double spearman = 0.0;
};

struct VerdictThresholds {
  double floor_tol = 1e-3;
  double zero_tol = 1e-8;
  double min_exponent = 0.25;
};

VerdictReport rigidity_verdict(const VerdictInputs &inputs, VerdictThresholds thresholds = {});

} // namespace vsheet::functional
