#include "vsheet/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "vsheet/quadrature.hpp"

#ifndef VSHEET_SCENARIO_DIR
#define VSHEET_SCENARIO_DIR "scenarios"
#endif

namespace vsheet::harness {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string &path, const std::string &what) {
  throw ScenarioError(path + ": " + what);
}

const json &field(const json &obj, const std::string &key, const std::string &path) {
  if (!obj.is_object())
    fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end())
    fail(path + "." + key, "missing field");
  return *it;
}

double number(const json &v, const std::string &path) {
  if (!v.is_number())
    fail(path, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

double number_or(const json &obj, const std::string &key, const std::string &path, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, path + "." + key);
}

int integer_or(const json &obj, const std::string &key, const std::string &path, int fallback) {
  const auto it = obj.find(key);
  if (it == obj.end())
    return fallback;
  if (!it->is_number_integer())
    fail(path + "." + key, "expected an integer");
  return it->get<int>();
}

std::string string_field(const json &obj, const std::string &key, const std::string &path) {
  const json &v = field(obj, key, path);
  if (!v.is_string())
    fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

const json &array_field(const json &obj, const std::string &key, const std::string &path) {
  const json &v = field(obj, key, path);
  if (!v.is_array())
    fail(path + "." + key, "expected an array");
  return v;
}

std::vector<double> numbers(const json &arr, const std::string &path) {
  if (!arr.is_array())
    fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(number(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

CurveSpec parse_curve(const json &j, const std::string &path) {
  CurveSpec c;
  c.type = string_field(j, "type", path);
  if (c.type == "circle") {
    const auto ctr = numbers(field(j, "center", path), path + ".center");
    if (ctr.size() != 2)
      fail(path + ".center", "expected [x, y]");
    c.center = {ctr[0], ctr[1]};
    c.radius = number(field(j, "radius", path), path + ".radius");
    if (!(c.radius > 0.0))
      fail(path + ".radius", "must be positive");
  } else if (c.type == "segment") {
    c.half_length = number(field(j, "a", path), path + ".a");
    if (!(c.half_length > 0.0))
      fail(path + ".a", "must be positive");
  } else if (c.type == "fourier") {
    c.radius = number(field(j, "R", path), path + ".R");
    if (!(c.radius > 0.0))
      fail(path + ".R", "must be positive");
    if (const auto it = j.find("center"); it != j.end()) {
      const auto ctr = numbers(*it, path + ".center");
      if (ctr.size() != 2)
        fail(path + ".center", "expected [x, y]");
      c.center = {ctr[0], ctr[1]};
    }
    const json &modes = array_field(j, "modes", path);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const std::string mp = path + ".modes[" + std::to_string(m) + "]";
      const json &k = field(modes[m], "k", mp);
      if (!k.is_number_integer() || k.get<int>() < 1)
        fail(mp + ".k", "expected a positive integer");
      c.modes.push_back({k.get<int>(), number(field(modes[m], "delta", mp), mp + ".delta")});
    }
  } else {
    fail(path + ".type", "unknown curve type '" + c.type + "'");
  }
  return c;
}

StrengthSpec parse_strength(const json &j, const std::string &path) {
  StrengthSpec s;
  s.type = string_field(j, "type", path);
  if (s.type == "constant") {
    s.gamma0 = number(field(j, "gamma0", path), path + ".gamma0");
  } else if (s.type == "fourier") {
    s.gamma0 = number(field(j, "mean", path), path + ".mean");
    if (const auto it = j.find("cos"); it != j.end())
      s.cos_coeffs = numbers(*it, path + ".cos");
    if (const auto it = j.find("sin"); it != j.end())
      s.sin_coeffs = numbers(*it, path + ".sin");
  } else if (s.type == "semicircle") {
    s.omega = number(field(j, "omega", path), path + ".omega");
  } else {
    fail(path + ".type", "unknown strength type '" + s.type + "'");
  }
  if (const auto it = j.find("regularity"); it != j.end()) {
    if (!it->is_string())
      fail(path + ".regularity", "expected a string");
    s.regularity = it->get<std::string>();
    if (*s.regularity != "closed_c2" && *s.regularity != "open_holder")
      fail(path + ".regularity", "expected 'closed_c2' or 'open_holder'");
  }
  return s;
}

json curve_json(const CurveSpec &c) {
  if (c.type == "circle")
    return {{"type", "circle"}, {"center", {c.center.x, c.center.y}}, {"radius", c.radius}};
  if (c.type == "segment")
    return {{"type", "segment"}, {"a", c.half_length}};
  json modes = json::array();
  for (const auto &m : c.modes)
    modes.push_back({{"k", m.wavenumber}, {"delta", m.amplitude}});
  return {{"type", "fourier"}, {"R", c.radius}, {"center", {c.center.x, c.center.y}}, {"modes", modes}};
}

json strength_json(const StrengthSpec &s) {
  json j;
  if (s.type == "constant")
    j = {{"type", "constant"}, {"gamma0", s.gamma0}};
  else if (s.type == "fourier")
    j = {{"type", "fourier"}, {"mean", s.gamma0}, {"cos", s.cos_coeffs}, {"sin", s.sin_coeffs}};
  else
    j = {{"type", "semicircle"}, {"omega", s.omega}};
  if (s.regularity)
    j["regularity"] = *s.regularity;
  return j;
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

} // namespace

br::SheetConfiguration ScenarioSpec::configuration() const {
  std::vector<br::SheetComponent> comps;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const std::string path = "sheet " + std::to_string(i);
    const CurveSpec &c = curves[i];
    const StrengthSpec &s = strengths[i];
    const bool open = c.type == "segment";
    if (s.regularity && (*s.regularity == "closed_c2") == open)
      fail(path, "strength tagged " + *s.regularity + " does not fit a " + c.type + " curve");
    if (open != (s.type == "semicircle"))
      fail(path, "strength '" + s.type + "' does not fit a " + c.type + " curve");

    geometry::ParamCurve curve = c.type == "circle"    ? geometry::make_circle(c.center, c.radius)
                                 : c.type == "segment" ? geometry::make_segment(c.half_length)
                                                       : geometry::make_fourier_curve(c.radius, c.modes, c.center);
    br::StrengthProfile gamma = s.type == "constant" ? br::constant_strength(s.gamma0)
                                : s.type == "fourier"
                                    ? br::fourier_strength(s.gamma0, s.cos_coeffs, s.sin_coeffs)
                                    : br::rotating_segment_strength(s.omega, c.half_length);
    comps.push_back({std::move(curve), std::move(gamma)});
  }
  try {
    return br::SheetConfiguration(std::move(comps), omega);
  } catch (const std::exception &e) {
    throw ScenarioError(name + ": " + e.what());
  }
}

ScenarioSpec parse_scenario(const json &j) {
  ScenarioSpec spec;
  spec.name = string_field(j, "name", "scenario");
  const std::string root = spec.name;
  const json &curves = array_field(j, "curves", root);
  const json &strengths = array_field(j, "strengths", root);
  if (curves.size() != strengths.size())
    fail(root, "curves and strengths must have equal length");
  if (curves.empty())
    fail(root + ".curves", "at least one curve is required");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    spec.curves.push_back(parse_curve(curves[i], root + ".curves[" + std::to_string(i) + "]"));
    spec.strengths.push_back(
        parse_strength(strengths[i], root + ".strengths[" + std::to_string(i) + "]"));
  }
  spec.omega = number_or(j, "omega", root, 0.0);
  if (const auto it = j.find("eps_sweep"); it != j.end())
    spec.eps_sweep = numbers(*it, root + ".eps_sweep");
  if (spec.eps_sweep.empty())
    fail(root + ".eps_sweep", "must not be empty");
  for (std::size_t i = 0; i < spec.eps_sweep.size(); ++i) {
    if (!(spec.eps_sweep[i] > 0.0))
      fail(root + ".eps_sweep", "values must be positive");
    if (i > 0 && !(spec.eps_sweep[i] < spec.eps_sweep[i - 1]))
      fail(root + ".eps_sweep", "values must be strictly decreasing");
  }
  if (const auto it = j.find("resolutions"); it != j.end()) {
    const std::string rp = root + ".resolutions";
    spec.n_alpha = integer_or(*it, "N_alpha", rp, spec.n_alpha);
    spec.n_eta = integer_or(*it, "N_eta", rp, spec.n_eta);
    spec.n_res = integer_or(*it, "N_res", rp, spec.n_res);
  }
  if (spec.n_alpha < 8 || spec.n_eta < 8 || spec.n_res < 8)
    fail(root + ".resolutions", "N_alpha, N_eta and N_res must be at least 8");
  if (const auto it = j.find("tolerances"); it != j.end()) {
    const std::string tp = root + ".tolerances";
    auto &t = spec.tolerances;
    t.stationarity = number_or(*it, "stationarity", tp, t.stationarity);
    t.floor = number_or(*it, "floor", tp, t.floor);
    t.zero = number_or(*it, "zero", tp, t.zero);
    t.min_exponent = number_or(*it, "min_exponent", tp, t.min_exponent);
  }
  spec.configuration();
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioError(path.string() + ": cannot open scenario file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const ScenarioError &e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

json to_json(const ScenarioSpec &spec) {
  json curves = json::array(), strengths = json::array();
  for (const auto &c : spec.curves)
    curves.push_back(curve_json(c));
  for (const auto &s : spec.strengths)
    strengths.push_back(strength_json(s));
  return {{"name", spec.name},
          {"curves", curves},
          {"strengths", strengths},
          {"omega", spec.omega},
          {"eps_sweep", spec.eps_sweep},
          {"resolutions", {{"N_alpha", spec.n_alpha}, {"N_eta", spec.n_eta}, {"N_res", spec.n_res}}},
          {"tolerances",
           {{"stationarity", spec.tolerances.stationarity},
            {"floor", spec.tolerances.floor},
            {"zero", spec.tolerances.zero},
            {"min_exponent", spec.tolerances.min_exponent}}}};
}

std::filesystem::path scenario_dir() {
  if (const char *env = std::getenv("VSHEET_SCENARIO_DIR"))
    return env;
  return VSHEET_SCENARIO_DIR;
}

std::filesystem::path scenario_path(const std::string &name) {
  return scenario_dir() / (name + ".json");
}

RateFit fit_rate(std::span<const double> eps, std::span<const double> values, bool log_correction) {
  if (eps.size() != values.size() || eps.size() < 3)
    throw std::invalid_argument("fit_rate: need at least three (eps, value) pairs");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (values[i] < 0.0 || !(eps[i] > 0.0))
      throw std::invalid_argument("fit_rate: values must be non-negative and eps positive");
    if (values[i] == 0.0)
      return {kInf, 0.0};
    const double v = log_correction ? values[i] / std::abs(std::log(eps[i])) : values[i];
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(v));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  RateFit r;
  r.exponent = sxy / sxx;
  r.residual = syy > 0.0 ? 1.0 - sxy * sxy / (sxx * syy) : 0.0;
  return r;
}

namespace {

LayerSummary summarize_layer(const layer::LayerGrid &grid, const elliptic::PoissonSolution &sol,
                             const layer::InjectivityCertificate &cert) {
  LayerSummary s;
  s.certificate = cert;
  s.area = layer::layer_area(grid);
  s.area_over_eps = s.area / grid.epsilon();
  const double L = grid.curve().length();
  std::vector<double> terms(grid.n_alpha());
  double gmax = 0.0, kmax = 0.0;
  for (int j = 0; j < grid.n_alpha(); ++j) {
    const double a = grid.alpha()[j];
    const double g = grid.strength().value(a);
    terms[j] = grid.alpha_weight()[j] * L * g;
    gmax = std::max(gmax, std::abs(g));
    kmax = std::max(kmax, std::abs(grid.curve().frame(a).curvature));
  }
  s.area_leading = quad::pairwise_sum(terms);
  s.area_bound = 3.0 * grid.epsilon() * L * gmax * gmax * kmax;
  s.talenti = elliptic::talenti_check(grid, sol);
  s.flux_residual = sol.flux_residual;
  s.c = sol.c;
  return s;
}

EpsPoint run_point(const ScenarioSpec &spec, const br::SheetConfiguration &config,
                   const br::BREvaluator &br, double eps) {
  EpsPoint pt;
  pt.epsilon = eps;
  std::vector<layer::InjectivityCertificate> certs;
  for (std::size_t i = 0; i < config.size(); ++i) {
    certs.push_back(layer::injectivity_certificate(config[i].curve, config[i].strength, eps));
    if (!certs.back().passed) {
      std::ostringstream msg;
      msg << "injectivity certificate failed for sheet " << i << " (ratio "
          << certs.back().worst_pair_ratio << " < c0 " << certs.back().c0 << ")";
      throw std::runtime_error(msg.str());
    }
  }
  const auto layers = layer::build_layers(
      config, eps, {spec.n_alpha, spec.n_alpha + spec.n_alpha / 2, spec.n_eta});
  pt.min_layer_distance = layers.size() > 1 ? layer::min_cross_layer_distance(layers) : kInf;
  if (!(pt.min_layer_distance > 0.0))
    throw std::runtime_error("layers of different sheets overlap");

  std::vector<elliptic::PoissonSolution> sols;
  for (const auto &l : layers)
    sols.push_back(elliptic::assemble_and_solve(l));
  const layer::LayerVelocity velocity(layers);
  std::vector<std::vector<Vec2>> v;
  for (std::size_t i = 0; i < layers.size(); ++i)
    v.push_back(velocity.on_layer(i));

  const auto values = functional::compute_I(config.omega(), layers, sols, v);
  pt.report = functional::positivity_decomposition(config, layers, sols, values);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    pt.layers.push_back(summarize_layer(layers[i], sols[i], certs[i]));
    pt.layers.back().linearity_defect = layer::linearity_defect(layers[i], v[i], br, i);
  }
  pt.ok = true;
  return pt;
}

} // namespace

RunArtifact run_scenario(const ScenarioSpec &spec, std::ostream *log) {
  using clock = std::chrono::steady_clock;
  RunArtifact art;
  art.spec = spec;
  const auto config = spec.configuration();
  const auto t0 = clock::now();
  art.residuals = br::stationarity_residual(config, {spec.n_res, 1e-3});
  const double tol = spec.tolerances.stationarity;
  art.stationary = art.residual_BR1() <= tol && art.residual_BR2() <= tol;
  if (log)
    *log << "scenario=" << spec.name << " stage=residuals BR1=" << art.residual_BR1()
         << " BR2=" << art.residual_BR2() << " seconds="
         << std::chrono::duration<double>(clock::now() - t0).count() << "\n";

  const br::BREvaluator br(config);
  for (double eps : spec.eps_sweep) {
    const auto t = clock::now();
    try {
      art.points.push_back(run_point(spec, config, br, eps));
    } catch (const std::exception &e) {
      EpsPoint pt;
      pt.epsilon = eps;
      pt.error = e.what();
      art.points.push_back(std::move(pt));
    }
    if (log) {
      const auto &pt = art.points.back();
      *log << "scenario=" << spec.name << " eps=" << eps << " status=" << (pt.ok ? "ok" : "error");
      if (pt.ok)
        *log << " I_eps=" << pt.report.values.I_eps << " I_tilde=" << pt.report.values.I_tilde;
      else
        *log << " error=\"" << pt.error << "\"";
      *log << " seconds=" << std::chrono::duration<double>(clock::now() - t).count() << "\n";
    }
  }

  std::vector<double> eps, I, It, lin;
  for (const auto &pt : art.points) {
    if (!pt.ok)
      continue;
    eps.push_back(pt.epsilon);
    I.push_back(pt.report.values.I_eps);
    It.push_back(pt.report.values.I_tilde);
    double d = 0.0;
    for (const auto &l : pt.layers)
      d = std::max(d, l.linearity_defect);
    lin.push_back(d);
  }
  if (eps.size() >= 3) {
    auto abs_all = [](std::vector<double> v) {
      for (double &x : v)
        x = std::abs(x);
      return v;
    };
    art.fit_I = fit_rate(eps, abs_all(I));
    art.fit_I_tilde = fit_rate(eps, abs_all(It));
    art.fit_linearity = fit_rate(eps, lin);

    functional::VerdictInputs in;
    in.epsilon = eps;
    in.value = I;
    in.stationary = art.stationary;
    if (!art.stationary) {
      std::ostringstream note;
      note << "BR residuals " << art.residual_BR1() << " (normal) and " << art.residual_BR2()
           << " (tangential) exceed " << tol;
      in.residual_note = note.str();
    }
    art.verdict = functional::rigidity_verdict(
        in, {spec.tolerances.floor, spec.tolerances.zero, spec.tolerances.min_exponent});
  } else {
    art.verdict.verdict = functional::Verdict::Inconclusive;
    art.verdict.reason = "only " + std::to_string(eps.size()) + " of " +
                         std::to_string(spec.eps_sweep.size()) + " sweep points succeeded";
    art.verdict.floor = kNaN;
    art.verdict.exponent = kNaN;
    art.verdict.spearman = kNaN;
  }
  if (log)
    *log << "scenario=" << spec.name << " verdict=" << functional::to_string(art.verdict.verdict)
         << " seconds=" << std::chrono::duration<double>(clock::now() - t0).count() << "\n";
  return art;
}

std::string format_number(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json fit_json(const std::optional<RateFit> &f) {
  if (!f)
    return nullptr;
  return {{"exponent", number_json(f->exponent)}, {"residual", number_json(f->residual)}};
}

json point_json(const EpsPoint &pt) {
  json j = {{"epsilon", pt.epsilon}, {"ok", pt.ok}};
  if (!pt.ok) {
    j["error"] = pt.error;
    return j;
  }
  const auto &r = pt.report;
  json nesting = json::array();
  for (const auto &row : r.nesting)
    nesting.push_back(row);
  json pairs = json::array();
  for (const auto &b : r.B)
    pairs.push_back({{"i", b.i}, {"j", b.j}, {"value", b.value}});
  auto vec = [](const std::vector<double> &v) {
    json a = json::array();
    for (double x : v)
      a.push_back(number_json(x));
    return a;
  };
  j["I_eps"] = r.values.I_eps;
  j["I_tilde"] = r.values.I_tilde;
  j["J_eps"] = r.values.J_eps;
  j["consistency"] = r.values.consistency;
  j["I1_direct"] = r.values.I1_direct;
  j["I1_area"] = r.values.I1_area;
  j["A"] = vec(r.A);
  j["B"] = pairs;
  j["nesting"] = nesting;
  j["cs_gap"] = vec(r.cs_gap);
  j["iso_gap"] = vec(r.iso_gap);
  j["surrogate"] = vec(r.surrogate);
  j["lower_bound"] = r.lower_bound;
  j["min_layer_distance"] = number_json(pt.min_layer_distance);
  json layers = json::array();
  for (const auto &l : pt.layers)
    layers.push_back({{"certificate",
                       {{"c0", l.certificate.c0},
                        {"eps0", l.certificate.eps0},
                        {"worst_pair_ratio", l.certificate.worst_pair_ratio},
                        {"passed", l.certificate.passed}}},
                      {"area", l.area},
                      {"area_over_eps", l.area_over_eps},
                      {"area_leading", l.area_leading},
                      {"area_bound", l.area_bound},
                      {"talenti_sup_gap", l.talenti.sup_gap},
                      {"talenti_int_gap", l.talenti.int_gap},
                      {"linearity_defect", l.linearity_defect},
                      {"flux_residual", l.flux_residual},
                      {"c", l.c}});
  j["layers"] = layers;
  return j;
}

} // namespace

json to_json(const RunArtifact &art) {
  json residuals = json::array();
  for (const auto &c : art.residuals.curves)
    residuals.push_back({{"closed", c.closed},
                         {"normal_max", c.normal_max},
                         {"tangential", c.tangential},
                         {"constant", c.constant},
                         {"vector_max", c.vector_max}});
  json points = json::array();
  for (const auto &pt : art.points)
    points.push_back(point_json(pt));
  return {{"scenario", to_json(art.spec)},
          {"residuals",
           {{"BR1", art.residual_BR1()},
            {"BR2", art.residual_BR2()},
            {"vector_max", art.residuals.max_vector()},
            {"stationary", art.stationary},
            {"curves", residuals}}},
          {"sweep", points},
          {"fits",
           {{"abs_I_eps", fit_json(art.fit_I)},
            {"abs_I_tilde", fit_json(art.fit_I_tilde)},
            {"linearity_defect", fit_json(art.fit_linearity)}}},
          {"verdict",
           {{"verdict", functional::to_string(art.verdict.verdict)},
            {"reason", art.verdict.reason},
            {"floor", number_json(art.verdict.floor)},
            {"exponent", number_json(art.verdict.exponent)},
            {"spearman", number_json(art.verdict.spearman)}}}};
}

void write_sweep_csv(std::ostream &out, const RunArtifact &art) {
  const std::size_t n = art.spec.curves.size();
  out << "eps,I_eps,I_tilde,J_eps";
  for (std::size_t i = 0; i < n; ++i)
    out << ",A_" << i + 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out << ",B_" << i + 1 << "_" << j + 1;
  out << ",residual_BR1,residual_BR2,defect_linearity,talenti_int_gap\n";
  for (const auto &pt : art.points) {
    std::vector<double> row;
    if (pt.ok) {
      const auto &r = pt.report;
      row = {r.values.I_eps, r.values.I_tilde, r.values.J_eps};
      row.insert(row.end(), r.A.begin(), r.A.end());
      for (const auto &b : r.B)
        row.push_back(b.value);
      row.push_back(art.residual_BR1());
      row.push_back(art.residual_BR2());
      double defect = 0.0, gap = 0.0;
      for (const auto &l : pt.layers) {
        defect = std::max(defect, l.linearity_defect);
        gap += l.talenti.int_gap;
      }
      row.push_back(defect);
      row.push_back(gap);
    } else {
      row.assign(3 + n + n * (n - 1) / 2, kNaN);
      row.push_back(art.residual_BR1());
      row.push_back(art.residual_BR2());
      row.push_back(kNaN);
      row.push_back(kNaN);
    }
    out << format_number(pt.epsilon);
    for (double v : row)
      out << ',' << format_number(v);
    out << '\n';
  }
}

EmittedPaths emit_results(const RunArtifact &art, const std::filesystem::path &out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error(out_dir.string() + ": cannot create output directory: " + ec.message());
  EmittedPaths paths{out_dir / "report.json", out_dir / "sweep.csv"};
  auto open = [](const std::filesystem::path &p) {
    std::ofstream f(p, std::ios::binary);
    if (!f)
      throw std::runtime_error(p.string() + ": cannot open for writing");
    return f;
  };
  {
    auto f = open(paths.report);
    f << to_json(art).dump(2) << '\n';
    if (!f)
      throw std::runtime_error(paths.report.string() + ": write failed");
  }
  {
    auto f = open(paths.sweep);
    write_sweep_csv(f, art);
    if (!f)
      throw std::runtime_error(paths.sweep.string() + ": write failed");
  }
  return paths;
}

} // namespace vsheet::harness
