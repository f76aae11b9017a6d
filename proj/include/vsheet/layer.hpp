#pragma once

// Thin vortex layers around each sheet.
//
//   R(alpha, eta) = z(alpha) + eps gamma(alpha) n(alpha) eta,   eta in [-1, 0]
//   det grad R    = eps L gamma - eps^2 L gamma^2 kappa eta
//
// The layer carries vorticity 1/eps, so its velocity field is
//   v(x) = eps^-1 sum_k int_{D_k} K2(x - y) dy.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/geometry.hpp"
#include "vsheet/vec2.hpp"

namespace vsheet::layer {

using br::SheetConfiguration;
using br::StrengthProfile;
using geometry::ParamCurve;

struct LayerPoint {
  Vec2 position;
  Vec2 d_alpha; ///< dR/dalpha
  Vec2 d_eta;   ///< dR/deta
  double jacobian = 0.0;
};

/// R and its derivatives at one (alpha, eta); eta is not restricted to [-1, 0].
LayerPoint layer_map(const ParamCurve &curve, const StrengthProfile &gamma, double epsilon,
                     double alpha, double eta);

/// Tensor grid over (alpha, eta). Closed curves use alpha_j = j / N_alpha;
/// open curves use the endpoint-clustered nodes alpha = (1 - cos theta) / 2
/// at theta_j = (j + 1/2) pi / N_alpha. eta_k = -1 + k / (N_eta - 1), so the
/// last row is the sheet itself.
class LayerGrid {
public:
  LayerGrid(ParamCurve curve, StrengthProfile strength, double epsilon, int n_alpha, int n_eta);

  double epsilon() const { return epsilon_; }
  const ParamCurve &curve() const { return curve_; }
  const StrengthProfile &strength() const { return strength_; }
  bool closed() const { return curve_.closed(); }
  int n_alpha() const { return n_alpha_; }
  int n_eta() const { return n_eta_; }
  double eta_step() const { return 1.0 / (n_eta_ - 1); }

  const std::vector<double> &alpha() const { return alpha_; }
  /// theta_j for open curves, alpha_j for closed ones.
  const std::vector<double> &theta() const { return theta_; }
  const std::vector<double> &eta() const { return eta_; }
  /// Quadrature weights for d(alpha) and d(eta).
  const std::vector<double> &alpha_weight() const { return alpha_weight_; }
  const std::vector<double> &eta_weight() const { return eta_weight_; }

  std::size_t index(int j, int k) const { return static_cast<std::size_t>(j) * n_eta_ + k; }
  const LayerPoint &at(int j, int k) const { return points_[index(j, k)]; }
  const std::vector<LayerPoint> &points() const { return points_; }

private:
  ParamCurve curve_;
  StrengthProfile strength_;
  double epsilon_;
  int n_alpha_, n_eta_;
  std::vector<double> alpha_, theta_, eta_, alpha_weight_, eta_weight_;
  std::vector<LayerPoint> points_;
};

/// Throws std::invalid_argument for bad sizes and std::domain_error when the
/// jacobian is not positive at every node.
LayerGrid build_layer(const ParamCurve &curve, const StrengthProfile &strength, double epsilon,
                      int n_alpha, int n_eta);

struct Resolution {
  int alpha_closed = 512;
  int alpha_open = 768;
  int eta = 16;
};

std::vector<LayerGrid> build_layers(const SheetConfiguration &config, double epsilon,
                                    Resolution resolution = {});

double layer_area(const LayerGrid &layer);

struct InjectivityCertificate {
  double c0 = 0.0;
  /// Threshold from the a priori estimate; informational.
  double eps0 = 0.0;
  double worst_pair_ratio = 0.0;
  bool passed = false;
};

InjectivityCertificate injectivity_certificate(const ParamCurve &curve,
                                               const StrengthProfile &strength, double epsilon,
                                               int random_pairs = 10000,
                                               std::uint64_t seed = 20240611);

/// Smallest sampled distance between the boundaries of two different layers
/// (+inf for a single layer).
double min_cross_layer_distance(std::span<const LayerGrid> layers);

enum class SelfCellPolicy {
  /// Transverse integral in closed form, adaptive Gauss panels along the sheet.
  SemiAnalytic,
  /// Cell-centred midpoint rule, skipping the cell that contains the target.
  MidpointDisk,
};

/// Where a target sits on a layer, used to split panels at the singular column.
struct TargetHint {
  std::size_t layer = 0;
  double alpha = 0.0;
};

class LayerVelocity {
public:
  explicit LayerVelocity(std::span<const LayerGrid> layers,
                         SelfCellPolicy policy = SelfCellPolicy::SemiAnalytic,
                         int base_panels = 64);

  Vec2 operator()(Vec2 x, std::optional<TargetHint> hint = std::nullopt) const;

  /// Velocity at every node of layer i, in LayerGrid::index order. Runs
  /// targets in parallel.
  std::vector<Vec2> on_layer(std::size_t i) const;
  /// Same as on_layer without threading.
  std::vector<Vec2> on_layer_serial(std::size_t i) const;

  std::span<const LayerGrid> layers() const { return layers_; }

private:
  struct Column {
    Vec2 base;   // z(alpha')
    Vec2 dir;    // eps gamma n
    double j0;   // jacobian at eta' = 0
    double j1;   // d jacobian / d eta'
    double weight; // includes 1/eps
  };
  struct PanelCache {
    double s0, s1;
    Vec2 corners[4];
    double span;
    std::vector<Column> columns;
  };

  Column column(std::size_t k, double s, double ds_weight) const;
  Vec2 column_velocity(const Column &c, Vec2 x) const;
  Vec2 panel(std::size_t k, double s0, double s1, Vec2 x, std::optional<double> split) const;
  Vec2 adaptive(std::size_t k, double s0, double s1, Vec2 x, int depth) const;
  Vec2 midpoint(std::size_t k, Vec2 x) const;
  double distance_to_panel(std::size_t k, double s0, double s1, Vec2 x) const;

  std::span<const LayerGrid> layers_;
  SelfCellPolicy policy_;
  std::vector<std::vector<PanelCache>> cache_;
};

Vec2 layer_velocity(std::span<const LayerGrid> layers, Vec2 x,
                    SelfCellPolicy policy = SelfCellPolicy::SemiAnalytic);

/// g(alpha, eta) = BR(z(alpha)) - (eta + 1/2) gamma(alpha) s(alpha).
Vec2 linear_profile(const br::BREvaluator &br, std::size_t i, double alpha, double eta);

/// max over the nodes of layer i of |v(R(alpha, eta)) - g(alpha, eta)|, where
/// `velocity` holds v at the nodes (LayerVelocity::on_layer).
double linearity_defect(const LayerGrid &layer, std::span<const Vec2> velocity,
                        const br::BREvaluator &br, std::size_t i);

} // namespace vsheet::layer
