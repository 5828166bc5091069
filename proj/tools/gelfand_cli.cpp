// Command-line driver for the Gel'fand blow-up laboratory: asymptotic
// predictions from Green-function data (predict), nonlinear branch
// continuation (solve), the weighted eigenproblem (spectrum), the combined
// comparison (verify) and the built-in self test.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gelfand/harness.hpp"

using namespace gelfand;

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::string domain;
  std::string lambda_csv;
  double inner_radius = -1.0;
  int m = 0;
  int jobs = 0;
};

ExperimentConfig build_config(const CliOverrides& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = ExperimentConfig::from_file(o.config_path);
  if (!o.domain.empty()) {
    if (o.domain == "disk")
      cfg.domain = DomainSpec::disk(cfg.domain.kind == DomainKind::Disk
                                        ? cfg.domain.disk_radius
                                        : 1.0);
    else if (o.domain == "annulus")
      cfg.domain = DomainSpec::annulus(
          o.inner_radius > 0 ? o.inner_radius : cfg.domain.inner_radius,
          cfg.domain.series_truncation);
    else
      throw ConfigError("unknown domain '" + o.domain + "'");
  } else if (o.inner_radius > 0) {
    if (cfg.domain.kind != DomainKind::Annulus)
      throw ConfigError("--inner-radius applies to the annulus");
    cfg.domain =
        DomainSpec::annulus(o.inner_radius, cfg.domain.series_truncation);
  }
  if (o.m > 0) cfg.m = o.m;
  if (o.jobs > 0) cfg.jobs = o.jobs;
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (!o.lambda_csv.empty()) {
    cfg.lambda_list.clear();
    std::stringstream ss(o.lambda_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.lambda_list.push_back(std::stod(item));
  }
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for blow-up solutions of -Lap u = lambda e^u "
               "and the spectrum of its linearization"};
  app.require_subcommand(1);

  CliOverrides o;
  app.add_option("--config", o.config_path, "configuration file (ini-style)");
  app.add_option("--out", o.out_dir, "output directory");
  app.add_option("--jobs", o.jobs, "worker threads for sweep analysis");
  app.add_option("--lambda", o.lambda_csv, "comma-separated lambda override");
  app.add_option("--m", o.m, "number of blow-up points");
  app.add_option("--domain", o.domain, "disk | annulus");
  app.add_option("--inner-radius", o.inner_radius, "annulus inner radius a");

  auto* predict = app.add_subcommand("predict", "spectral predictions from Green data");
  auto* solve = app.add_subcommand("solve", "continue the blow-up branch");
  auto* spectrum = app.add_subcommand("spectrum", "weighted eigenproblem per lambda");
  auto* verify = app.add_subcommand("verify", "predictions vs numerics with verdicts");
  auto* selftest = app.add_subcommand("selftest", "built-in consistency checks");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = build_config(o);
    if (predict->parsed()) return cmd_predict(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (selftest->parsed()) return cmd_selftest(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const LambdaOutOfRange& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
