#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vsheet/acceptance.hpp"
#include "vsheet/harness.hpp"

using namespace vsheet;

namespace {

void apply_resolution(harness::ScenarioSpec &spec, const std::string &res) {
  if (res.empty())
    return;
  int n = 0, m = 0;
  char x = 0;
  std::istringstream in(res);
  if (!(in >> n >> x >> m) || (x != 'x' && x != 'X') || n < 8 || m < 8)
    throw CLI::ValidationError("--resolution", "expected NxM with N, M >= 8, got '" + res + "'");
  spec.n_alpha = n;
  spec.n_eta = m;
}

void apply_eps(harness::ScenarioSpec &spec, const std::vector<double> &eps) {
  if (eps.empty())
    return;
  auto j = harness::to_json(spec);
  j["eps_sweep"] = eps;
  spec = harness::parse_scenario(j);
}

int run(const std::string &config, const std::string &out, const std::string &res,
        const std::vector<double> &eps) {
  auto spec = harness::load_scenario(config);
  apply_resolution(spec, res);
  apply_eps(spec, eps);
  const auto art = harness::run_scenario(spec, &std::cerr);
  const auto paths = harness::emit_results(art, out);
  std::cerr << "report=" << paths.report.string() << " sweep=" << paths.sweep.string() << "\n";
  std::cout << functional::to_string(art.verdict.verdict) << ": " << art.verdict.reason << "\n";
  return 0;
}

int sweep(const std::string &name, const std::string &param, const std::string &res,
          const std::vector<double> &eps) {
  if (param != "eps")
    throw CLI::ValidationError("--param", "only 'eps' can be swept");
  auto spec = harness::load_scenario(harness::scenario_path(name));
  apply_resolution(spec, res);
  apply_eps(spec, eps);
  const auto art = harness::run_scenario(spec, &std::cerr);
  harness::write_sweep_csv(std::cout, art);
  return 0;
}

int verify(const std::string &out) {
  const auto results = acceptance::run_all(&std::cerr, out);
  bool ok = true;
  for (const auto &r : results) {
    std::cout << acceptance::format(r) << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Vortex sheet layer sweeps and acceptance checks"};
  app.require_subcommand(1);

  std::string config, out, res, name, param = "eps", verify_out;
  std::vector<double> eps;

  auto *run_cmd = app.add_subcommand("run", "Run one scenario and write report.json and sweep.csv");
  run_cmd->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "Output directory")->required();
  run_cmd->add_option("--resolution", res, "Layer grid NxM (N_alpha x N_eta)");
  run_cmd->add_option("--eps", eps, "Comma-separated epsilon sweep")->delimiter(',');

  auto *verify_cmd = app.add_subcommand("verify", "Run the bundled suite against the acceptance thresholds");
  verify_cmd->add_option("--out", verify_out, "Write each scenario's results under this directory");

  auto *sweep_cmd = app.add_subcommand("sweep", "Print the sweep table of a bundled scenario");
  sweep_cmd->add_option("--scenario", name, "Bundled scenario name")->required();
  sweep_cmd->add_option("--param", param, "Swept parameter")->check(CLI::IsMember({"eps"}));
  sweep_cmd->add_option("--resolution", res, "Layer grid NxM (N_alpha x N_eta)");
  sweep_cmd->add_option("--eps", eps, "Comma-separated epsilon sweep")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd)
      return run(config, out, res, eps);
    if (*sweep_cmd)
      return sweep(name, param, res, eps);
    return verify(verify_out);
  } catch (const CLI::Error &e) {
    return app.exit(e);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
