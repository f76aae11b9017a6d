#pragma once

// Birkhoff-Rott integral along a finite union of vortex sheets.
//
//   BR(z_i(alpha)) = sum_k PV int_{S_k} K2(z_i(alpha) - z_k(a)) gamma_k(a) L_k da
//   K2(x) = x^perp / (2 pi |x|^2)
//
// Self-interaction on a closed curve uses the alternate-point trapezoidal
// rule. On an open curve the nodes are clustered at the endpoints through
// a = (1 - cos theta) / 2 and the singular part K2(z'(alpha)(alpha - a))
// gamma(alpha) is subtracted and integrated in closed form.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vsheet/geometry.hpp"
#include "vsheet/vec2.hpp"

namespace vsheet::br {

using geometry::Frame;
using geometry::ParamCurve;

enum class Regularity { ClosedC2, OpenHolder };

struct ConstantStrength {
  double value = 1.0;
};

/// gamma(alpha) = a0 + sum_m (cos_m cos(2 pi m alpha) + sin_m sin(2 pi m alpha)).
struct FourierStrength {
  double mean = 1.0;
  std::vector<double> cos_coeffs; // index m-1 holds mode m
  std::vector<double> sin_coeffs;
};

/// gamma(x) = amplitude * sqrt(a^2 - x^2) along the segment z(alpha) = (a(2 alpha - 1), 0).
struct SemicircleStrength {
  double amplitude = 1.0;
  double half_length = 1.0;
};

/// Vorticity strength with respect to arclength, gamma_i(alpha).
class StrengthProfile {
public:
  using Law = std::variant<ConstantStrength, FourierStrength, SemicircleStrength>;

  StrengthProfile(Law law, Regularity regularity, double holder_exponent = 1.0);

  double value(double alpha) const;
  double derivative(double alpha) const;
  Regularity regularity() const { return regularity_; }
  /// b in (0, 1) for OpenHolder profiles; 1 for closed C^2 profiles.
  double holder_exponent() const { return holder_exponent_; }
  const Law &law() const { return law_; }
  bool is_constant() const;

private:
  Law law_;
  Regularity regularity_;
  double holder_exponent_;
};

StrengthProfile constant_strength(double gamma0);
StrengthProfile fourier_strength(double mean, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs = {});
/// gamma(x) = amplitude sqrt(a^2 - x^2); Hoelder exponent 1/2 at the tips.
StrengthProfile semicircle_strength(double amplitude, double half_length);
/// Relative equilibrium of a segment of half length a rotating at angular
/// velocity omega: gamma(x) = 2 omega sqrt(a^2 - x^2).
StrengthProfile rotating_segment_strength(double omega, double half_length);

/// Sampled C^b seminorm sup |gamma(a) - gamma(b)| / |a - b|^b.
double holder_seminorm(const StrengthProfile &gamma, double b, int samples = 257);

struct SheetComponent {
  ParamCurve curve;
  StrengthProfile strength;
};

/// A finite disjoint union of sheets plus an angular velocity. Closed
/// components come first.
class SheetConfiguration {
public:
  SheetConfiguration(std::vector<SheetComponent> components, double omega,
                     double disjoint_floor = 1e-6);

  const std::vector<SheetComponent> &components() const { return components_; }
  const SheetComponent &operator[](std::size_t i) const { return components_[i]; }
  std::size_t size() const { return components_.size(); }
  std::size_t closed_count() const { return closed_count_; }
  double omega() const { return omega_; }
  /// d_Gamma, or +inf for a single component.
  double separation() const { return separation_; }

  SheetConfiguration transformed(double angle, Vec2 shift) const;

private:
  std::vector<SheetComponent> components_;
  double omega_;
  std::size_t closed_count_ = 0;
  double separation_;
};

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string &what, Vec2 coarse, Vec2 fine)
      : std::runtime_error(what), coarse_(coarse), fine_(fine) {}
  Vec2 coarse() const { return coarse_; }
  Vec2 fine() const { return fine_; }

private:
  Vec2 coarse_;
  Vec2 fine_;
};

Vec2 kernel_K2(Vec2 x);

struct QuadratureOptions {
  int closed_nodes = 1024;
  int open_nodes = 2048;
};

/// Precomputed quadrature nodes for every sheet of a configuration.
class BREvaluator {
public:
  explicit BREvaluator(const SheetConfiguration &config, QuadratureOptions options = {});

  /// BR(z_i(alpha)).
  Vec2 evaluate(std::size_t i, double alpha) const;
  /// Velocity induced by sheet k at a point x off that sheet.
  Vec2 induced(std::size_t k, Vec2 x) const;
  /// The principal-value self-interaction BR_i(z_i(alpha)).
  Vec2 self_term(std::size_t i, double alpha) const;

  const SheetConfiguration &config() const { return *config_; }

private:
  struct Nodes {
    std::vector<Vec2> position;
    std::vector<double> weight; // gamma * L * d(alpha)
  };
  const SheetConfiguration *config_;
  QuadratureOptions options_;
  std::vector<Nodes> nodes_;
};

/// BR(z_i(alpha)) with a refinement check: throws QuadratureError when
/// doubling the nodes moves the value by more than `tolerance`.
Vec2 evaluate_BR(const SheetConfiguration &config, std::size_t i, double alpha,
                 double tolerance = 1e-6, QuadratureOptions options = {});

struct OneSided {
  Vec2 plus;  ///< limit on the side n points into
  Vec2 minus; ///< limit on the opposite side
};

OneSided one_sided_velocities(const BREvaluator &br, std::size_t i, double alpha);

struct CurveResidual {
  bool closed = true;
  double normal_max = 0.0;     ///< max |(BR - Omega z^perp) . n|
  double tangential = 0.0;     ///< closed: max |T - C|; open: max |T|, T = (BR - Omega z^perp).s gamma
  double constant = 0.0;       ///< C_i (closed curves; mean of T)
  double vector_max = 0.0;     ///< open curves: max |BR - Omega z^perp|
};

struct BRResidualReport {
  std::vector<CurveResidual> curves;
  double max_normal() const;
  double max_tangential() const;
  double max_vector() const;
};

struct ResidualSampling {
  int samples = 256;
  double endpoint_gap = 1e-3;
};

/// Sample points used for residuals: uniform on closed curves, Chebyshev
/// clustered in [gap, 1 - gap] on open curves.
std::vector<double> residual_samples(const ParamCurve &curve, ResidualSampling sampling);

BRResidualReport stationarity_residual(const SheetConfiguration &config,
                                       ResidualSampling sampling = {},
                                       QuadratureOptions options = {});

/// For configurations of circles with constant strength: per circle, max over
/// the circle of |BR . n| assembled from the explicit inside/outside fields.
std::vector<double> concentricity_residual(const SheetConfiguration &config, int samples = 256);

} // namespace vsheet::br
