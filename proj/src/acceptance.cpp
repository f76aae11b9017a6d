#include "vsheet/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "vsheet/harness.hpp"

namespace vsheet::acceptance {

namespace {

using harness::RunArtifact;
constexpr double kPi = std::numbers::pi;
const std::vector<double> kSweep{0.08, 0.04, 0.02, 0.01};

const std::vector<std::string> kSuite{
    "concentric_one_circle",    "concentric_two_circles", "offcenter_circle_rotating",
    "nonconcentric_nested",     "fourier_noncircle",      "nonconstant_gamma_circle",
    "rotating_segment",         "two_far_circles"};

class Suite {
public:
  Suite(std::ostream *log, std::string out_dir) : log_(log), out_dir_(std::move(out_dir)) {}

  const RunArtifact &get(const std::string &name, std::optional<double> omega = std::nullopt) {
    std::string key = name;
    if (omega)
      key += "_omega_" + harness::format_number(*omega);
    auto it = runs_.find(key);
    if (it != runs_.end())
      return it->second;
    auto spec = harness::load_scenario(harness::scenario_path(name));
    if (omega) {
      auto j = harness::to_json(spec);
      j["omega"] = *omega;
      j["name"] = key;
      spec = harness::parse_scenario(j);
    }
    auto art = harness::run_scenario(spec, log_);
    if (!out_dir_.empty())
      harness::emit_results(art, std::filesystem::path(out_dir_) / key);
    return runs_.emplace(key, std::move(art)).first->second;
  }

  std::vector<const RunArtifact *> all() {
    std::vector<const RunArtifact *> out;
    for (const auto &n : kSuite)
      out.push_back(&get(n));
    out.push_back(&get("concentric_two_circles", -1.0));
    return out;
  }

private:
  std::ostream *log_;
  std::string out_dir_;
  std::map<std::string, RunArtifact> runs_;
};

std::vector<const harness::EpsPoint *> ok_points(const RunArtifact &a, bool &complete) {
  std::vector<const harness::EpsPoint *> out;
  complete = !a.points.empty();
  for (const auto &p : a.points) {
    if (p.ok)
      out.push_back(&p);
    else
      complete = false;
  }
  return out;
}

std::string failed_points(const RunArtifact &a) {
  std::ostringstream s;
  for (const auto &p : a.points)
    if (!p.ok)
      s << " [" << a.spec.name << " eps=" << p.epsilon << ": " << p.error << "]";
  return s.str();
}

CriterionResult annulus_oracle() {
  CriterionResult r{1, "annulus Poisson oracle", true, {}};
  std::ostringstream d;
  double worst_p = 0.0, worst_c = 0.0, slowest = 0.0;
  for (double eps : kSweep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid =
        layer::build_layer(geometry::make_circle({}, 1.0), br::constant_strength(1.0), eps, 512, 16);
    const auto sol = elliptic::assemble_and_solve(grid);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double h = grid.eta_step();
    double err = 0.0;
    for (int j = 0; j < grid.n_alpha(); ++j)
      for (int k = 0; k < grid.n_eta(); ++k) {
        const double rr = norm(grid.at(j, k).position);
        err = std::max(err, std::abs(sol.p[grid.index(j, k)] -
                                     (-0.5 * rr * rr + 0.5 * (1 + eps) * (1 + eps))));
      }
    const double cerr = std::abs(sol.c - (eps + eps * eps / 2));
    const bool ok = err <= 5.0 * (h * h + 1e-10) && cerr <= 1e-8 && secs < 10.0;
    r.passed = r.passed && ok;
    worst_p = std::max(worst_p, err);
    worst_c = std::max(worst_c, cerr);
    slowest = std::max(slowest, secs);
  }
  d << "max |p - exact| " << worst_p << ", max |c - (eps + eps^2/2)| " << worst_c
    << ", slowest solve " << slowest << " s";
  r.detail = d.str();
  return r;
}

CriterionResult talenti(Suite &suite) {
  CriterionResult r{2, "Talenti equality and deficit", true, {}};
  std::ostringstream d;
  double worst = 0.0;
  for (double eps : kSweep) {
    const auto grid =
        layer::build_layer(geometry::make_circle({}, 1.0), br::constant_strength(1.0), eps, 512, 16);
    const auto gaps = elliptic::talenti_check(grid, elliptic::assemble_and_solve(grid));
    worst = std::max({worst, std::abs(gaps.int_gap), std::abs(gaps.sup_gap)});
  }
  r.passed = worst <= 1e-6;
  const auto &four = suite.get("fourier_noncircle");
  bool complete = false;
  const auto pts = ok_points(four, complete);
  std::vector<double> eps, ratio;
  for (const auto *p : pts) {
    eps.push_back(p->epsilon);
    ratio.push_back(p->layers[0].talenti.int_gap / (p->epsilon * p->epsilon));
  }
  const double lo = ratio.empty() ? 0.0 : *std::min_element(ratio.begin(), ratio.end());
  const double rho = eps.size() >= 2 ? functional::spearman(eps, ratio) : 1.0;
  r.passed = r.passed && complete && lo >= 0.01 && rho <= 0.0;
  d << "annulus max |gap| " << worst << "; fourier min int_gap/eps^2 " << lo
    << ", spearman vs eps " << rho << failed_points(four);
  r.detail = d.str();
  return r;
}

CriterionResult equilibrium_residuals(Suite &suite) {
  CriterionResult r{3, "relative-equilibrium residuals", true, {}};
  std::ostringstream d;
  const auto &seg = suite.get("rotating_segment");
  const double v = seg.residuals.max_vector();
  r.passed = v <= 1e-3;
  d << "segment |BR - Omega z^perp| " << v;
  for (std::optional<double> om : {std::optional<double>{}, std::optional<double>{-1.0}}) {
    const auto &a = suite.get("concentric_two_circles", om);
    const double worst = std::max(a.residual_BR1(), a.residual_BR2());
    r.passed = r.passed && worst <= 1e-6;
    d << "; concentric Omega=" << a.spec.omega << " BR1 " << a.residual_BR1() << " BR2 "
      << a.residual_BR2();
  }
  r.detail = d.str();
  return r;
}

CriterionResult vanishing_variation(Suite &suite) {
  CriterionResult r{4, "vanishing first variation", true, {}};
  std::ostringstream d;
  const auto &one = suite.get("concentric_one_circle");
  bool complete = false;
  double worst = 0.0;
  for (const auto *p : ok_points(one, complete))
    worst = std::max(worst, std::abs(p->report.values.I_tilde));
  r.passed = complete && worst <= 1e-5;
  const auto &seg = suite.get("rotating_segment");
  bool seg_complete = false;
  ok_points(seg, seg_complete);
  const double ex = seg.fit_I ? seg.fit_I->exponent : std::nan("");
  r.passed = r.passed && seg_complete && seg.points.size() >= 4 && ex >= 0.4;
  d << "circle max |I~| " << worst << "; segment |I| exponent " << ex
    << failed_points(one) << failed_points(seg);
  r.detail = d.str();
  return r;
}

double floor_of(const RunArtifact &a, bool tilde, bool &complete) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto *p : ok_points(a, complete))
    lo = std::min(lo, tilde ? p->report.values.I_tilde : p->report.values.I_eps);
  return lo;
}

CriterionResult obstruction_floors(Suite &suite) {
  CriterionResult r{5, "obstruction floors", true, {}};
  std::ostringstream d;
  bool c1 = false, c2 = false, c3 = false;

  const auto &four = suite.get("fourier_noncircle");
  const auto fcurve = four.spec.configuration()[0].curve;
  const double L = fcurve.length();
  const double fbound = L * L / (4 * kPi) * functional::isoperimetric_gap(fcurve);
  const double ffloor = floor_of(four, true, c1);

  const auto &gam = suite.get("nonconstant_gamma_circle");
  const auto gconf = gam.spec.configuration();
  const double Lg = gconf[0].curve.length();
  const int n = 4096;
  double ig = 0.0, iinv = 0.0;
  for (int j = 0; j < n; ++j) {
    const double g = gconf[0].strength.value((j + 0.5) / n);
    ig += g / n;
    iinv += 1.0 / (g * n);
  }
  const double cs = functional::cauchy_schwarz_gap(gconf[0].strength);
  const double gbound = Lg * Lg / (4 * kPi) * (ig / iinv) * cs;
  const double gfloor = floor_of(gam, true, c2);

  const auto &far = suite.get("two_far_circles");
  const double tfloor = floor_of(far, true, c3);

  r.passed = c1 && c2 && c3 && ffloor >= 0.5 * fbound && gfloor >= 0.5 * gbound &&
             std::abs(cs - 0.1547) <= 1e-3 && tfloor >= 0.5 * kPi;
  d << "fourier " << ffloor << " vs bound " << fbound << "; gamma " << gfloor << " vs bound "
    << gbound << " (cs_gap " << cs << "); far circles " << tfloor << " vs " << 0.5 * kPi
    << failed_points(four) << failed_points(gam) << failed_points(far);
  r.detail = d.str();
  return r;
}

CriterionResult offcenter(Suite &suite) {
  CriterionResult r{6, "rotating off-centre circle", true, {}};
  const auto &a = suite.get("offcenter_circle_rotating");
  bool complete = false;
  double worst = 0.0;
  for (const auto *p : ok_points(a, complete)) {
    const double exact = 0.5 * 0.09 * (2 * kPi + kPi * p->epsilon);
    worst = std::max(worst, std::abs(p->report.values.I_eps / exact - 1.0));
  }
  r.passed = complete && worst <= 0.02;
  std::ostringstream d;
  d << "max relative error " << worst << failed_points(a);
  r.detail = d.str();
  return r;
}

CriterionResult linearity(Suite &suite) {
  CriterionResult r{7, "layer-velocity linearity", true, {}};
  const auto &a = suite.get("concentric_one_circle");
  const double ex = a.fit_linearity ? a.fit_linearity->exponent : std::nan("");
  const auto config = a.spec.configuration();
  const br::BREvaluator br(config);
  double worst = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double alpha = (j + 0.25) / 64;
    const auto side = br::one_sided_velocities(br, 0, alpha);
    worst = std::max(worst, norm(layer::linear_profile(br, 0, alpha, 0.0) - side.plus));
    worst = std::max(worst, norm(layer::linear_profile(br, 0, alpha, -1.0) - side.minus));
  }
  r.passed = ex >= 0.8 && worst <= 1e-4;
  std::ostringstream d;
  d << "defect exponent " << ex << ", endpoint mismatch " << worst;
  r.detail = d.str();
  return r;
}

CriterionResult certificates(Suite &suite) {
  CriterionResult r{8, "injectivity certificates", true, {}};
  std::ostringstream d;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const auto *a : suite.all()) {
    for (const auto &p : a->points) {
      if (!p.ok) {
        r.passed = false;
        continue;
      }
      for (const auto &l : p.layers) {
        r.passed = r.passed && l.certificate.passed && l.certificate.worst_pair_ratio >= l.certificate.c0;
        worst_margin = std::min(worst_margin, l.certificate.worst_pair_ratio / l.certificate.c0);
      }
    }
    d << failed_points(*a);
  }
  const auto thick = layer::injectivity_certificate(geometry::make_circle({}, 1.0),
                                                    br::constant_strength(1.0), 10.0);
  r.passed = r.passed && !thick.passed;
  d << "min ratio/c0 " << worst_margin << "; eps=10 circle "
    << (thick.passed ? "passed" : "rejected") << " (ratio " << thick.worst_pair_ratio << ")";
  r.detail = d.str();
  return r;
}

CriterionResult area_formula(Suite &suite) {
  CriterionResult r{9, "area formula", true, {}};
  double worst = 0.0;
  std::ostringstream d;
  for (const auto *a : suite.all())
    for (const auto &p : a->points)
      for (const auto &l : p.layers) {
        const double gap = std::abs(l.area_over_eps - l.area_leading);
        const double allowed = l.area_bound + 1e-12 * l.area_leading;
        r.passed = r.passed && gap <= allowed;
        worst = std::max(worst, gap / allowed);
      }
  d << "max gap / bound " << worst;
  r.detail = d.str();
  return r;
}

CriterionResult decomposition(Suite &suite) {
  CriterionResult r{10, "decomposition consistency", true, {}};
  double slack = std::numeric_limits<double>::infinity(), cons = 0.0;
  std::ostringstream d;
  for (const auto *a : suite.all()) {
    for (const auto &p : a->points) {
      if (!p.ok) {
        r.passed = false;
        continue;
      }
      const auto &v = p.report.values;
      slack = std::min(slack, v.I_tilde - p.report.lower_bound);
      cons = std::max(cons, v.consistency);
      r.passed = r.passed && v.I_tilde >= p.report.lower_bound - 1e-6 && v.consistency <= 1e-8;
    }
    d << failed_points(*a);
  }
  d << "min I~ - lower bound " << slack << ", max consistency " << cons;
  r.detail = d.str();
  return r;
}

template <class F> CriterionResult guarded(int id, const std::string &name, F &&f) {
  try {
    return f();
  } catch (const std::exception &e) {
    return {id, name, false, std::string("error: ") + e.what()};
  }
}

} // namespace

std::vector<CriterionResult> run_all(std::ostream *log, const std::string &out_dir) {
  Suite suite(log, out_dir);
  std::vector<CriterionResult> out;
  out.push_back(guarded(1, "annulus Poisson oracle", [] { return annulus_oracle(); }));
  out.push_back(guarded(2, "Talenti equality and deficit", [&] { return talenti(suite); }));
  out.push_back(guarded(3, "relative-equilibrium residuals", [&] { return equilibrium_residuals(suite); }));
  out.push_back(guarded(4, "vanishing first variation", [&] { return vanishing_variation(suite); }));
  out.push_back(guarded(5, "obstruction floors", [&] { return obstruction_floors(suite); }));
  out.push_back(guarded(6, "rotating off-centre circle", [&] { return offcenter(suite); }));
  out.push_back(guarded(7, "layer-velocity linearity", [&] { return linearity(suite); }));
  out.push_back(guarded(8, "injectivity certificates", [&] { return certificates(suite); }));
  out.push_back(guarded(9, "area formula", [&] { return area_formula(suite); }));
  out.push_back(guarded(10, "decomposition consistency", [&] { return decomposition(suite); }));
  return out;
}

std::string format(const CriterionResult &r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail;
  return s.str();
}

} // namespace vsheet::acceptance
