#pragma once

// Scenario files, epsilon sweeps across all modules, rate fits and result files.

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vsheet/functional.hpp"

namespace vsheet::harness {

class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CurveSpec {
  std::string type; ///< "circle" | "segment" | "fourier"
  Vec2 center;
  double radius = 1.0;      ///< circle radius or fourier base radius
  double half_length = 1.0; ///< segment
  std::vector<geometry::FourierMode> modes;
};

struct StrengthSpec {
  std::string type; ///< "constant" | "fourier" | "semicircle"
  double gamma0 = 1.0;
  std::vector<double> cos_coeffs, sin_coeffs;
  double omega = 1.0;                ///< semicircle: rotation rate of the segment
  std::optional<std::string> regularity; ///< "closed_c2" | "open_holder"
};

struct Tolerances {
  double stationarity = 1e-3; ///< BR residual bound for "stationary"
  double floor = 1e-3;
  double zero = 1e-8;
  double min_exponent = 0.25;
};

struct ScenarioSpec {
  std::string name;
  std::vector<CurveSpec> curves;
  std::vector<StrengthSpec> strengths;
  double omega = 0.0;
  std::vector<double> eps_sweep{0.08, 0.04, 0.02, 0.01};
  int n_alpha = 512;
  int n_eta = 16;
  int n_res = 256;
  Tolerances tolerances;

  br::SheetConfiguration configuration() const;
};

ScenarioSpec parse_scenario(const nlohmann::json &j);
/// Reads and validates a scenario file; errors name the file, line and field.
ScenarioSpec load_scenario(const std::filesystem::path &path);
nlohmann::json to_json(const ScenarioSpec &spec);

/// Bundled scenario file for a name, looked up in the scenario directory.
std::filesystem::path scenario_path(const std::string &name);
std::filesystem::path scenario_dir();

struct LayerSummary {
  layer::InjectivityCertificate certificate;
  double area = 0.0;
  double area_over_eps = 0.0;
  double area_leading = 0.0; ///< L int gamma
  double area_bound = 0.0;   ///< 3 eps L max gamma^2 max|kappa|
  elliptic::TalentiGaps talenti;
  double linearity_defect = 0.0;
  double flux_residual = 0.0;
  double c = 0.0;
};

struct EpsPoint {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  std::vector<LayerSummary> layers;
  double min_layer_distance = 0.0;
  functional::FunctionalReport report;
};

struct RateFit {
  double exponent = 0.0;
  double residual = 0.0; ///< 1 - R^2
};

struct RunArtifact {
  ScenarioSpec spec;
  br::BRResidualReport residuals;
  bool stationary = false;
  std::vector<EpsPoint> points;
  std::optional<RateFit> fit_I;
  std::optional<RateFit> fit_I_tilde;
  std::optional<RateFit> fit_linearity;
  functional::VerdictReport verdict;

  double residual_BR1() const { return residuals.max_normal(); }
  double residual_BR2() const { return residuals.max_tangential(); }
};

/// Least-squares slope of log value against log eps. With log_correction the
/// values are first divided by |log eps|. A zero value gives +inf.
RateFit fit_rate(std::span<const double> eps, std::span<const double> values,
                 bool log_correction = false);

/// Progress lines (key=value) go to log when given.
RunArtifact run_scenario(const ScenarioSpec &spec, std::ostream *log = nullptr);

nlohmann::json to_json(const RunArtifact &artifact);
void write_sweep_csv(std::ostream &out, const RunArtifact &artifact);

struct EmittedPaths {
  std::filesystem::path report;
  std::filesystem::path sweep;
};
/// Writes report.json and sweep.csv into out_dir (created if missing).
EmittedPaths emit_results(const RunArtifact &artifact, const std::filesystem::path &out_dir);

/// Shortest round-trip decimal form used in every output file.
std::string format_number(double v);

} // namespace vsheet::harness
