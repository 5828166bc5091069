#include "gelfand/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace gelfand {

const std::map<std::string, double>& ExperimentConfig::default_tolerances() {
  static const std::map<std::string, double> defaults = {
      {"newton_grad", 1e-12},      // critical-point gradient norm
      {"pde_residual", 1e-10},     // scaled discrete residual
      {"eigen", 1e-12},            // iterative eigensolve
      {"eigen_residual", 1e-9},    // accepted eigenpair residual
      {"green_symmetry", 1e-12},   // |G(x,y) - G(y,x)| samples
      {"circulant", 1e-10},        // cyclic-structure detection
      {"eigen_group", 1e-9},       // multiplicity grouping
      {"degenerate", 1e-8},        // eigenvalue degeneracy flag
      {"concentration", 1e-3},     // relative component threshold
      {"bubble", 1e-8},            // bubble-constant quadrature check
      {"selftest_oracle", 1e-5},   // disk closed-form check in selftest
  };
  return defaults;
}

double ExperimentConfig::tol(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it != tolerances.end()) return it->second;
  auto dt = default_tolerances().find(name);
  if (dt == default_tolerances().end())
    throw ConfigError("unknown tolerance '" + name + "'");
  return dt->second;
}

void ExperimentConfig::validate() const {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (lambda_list.empty()) throw ConfigError("lambda_list is empty");
  for (double l : lambda_list)
    if (!(l > 0.0 && l < 1.0))
      throw LambdaOutOfRange("lambda " + std::to_string(l) + " outside (0,1)");
  for (size_t i = 1; i < lambda_list.size(); ++i)
    if (!(lambda_list[i] < lambda_list[i - 1]))
      throw ConfigError("lambda_list must be strictly decreasing");
  if (domain.kind == DomainKind::Disk && m != 1)
    throw ConfigError("the radial disk solver supports m = 1");
  if (grid.n_r < 64) throw ConfigError("grid.n_r must be >= 64");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "domain=" << (domain.kind == DomainKind::Disk ? "disk" : "annulus");
  if (domain.kind == DomainKind::Disk)
    os << " radius=" << domain.disk_radius;
  else
    os << " a=" << domain.inner_radius << " modes=" << domain.series_truncation;
  os << " m=" << m << " lambdas=";
  for (double l : lambda_list) os << l << ",";
  os << " n_r=" << grid.n_r << " n_theta=" << grid.n_theta
     << " core_fraction=" << grid.core_fraction << " seed=" << lambda_seed
     << " count=" << eigen_count << " tol={";
  for (const auto& [k, v] : default_tolerances()) os << k << ":" << tol(k) << ",";
  os << "}";
  return os.str();
}

uint64_t ExperimentConfig::hash() const {
  // FNV-1a over the canonical form.
  uint64_t h = 1469598103934665603ull;
  for (char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

} // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");

  ExperimentConfig cfg;
  std::string section, line;
  std::string domain_kind = "disk";
  double radius = 1.0, inner = 0.5;
  int modes = 256;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (section == "domain") {
        if (key == "kind") domain_kind = val;
        else if (key == "radius") radius = std::stod(val);
        else if (key == "inner_radius") inner = std::stod(val);
        else if (key == "series_truncation") modes = std::stoi(val);
        else throw ConfigError("unknown key '" + key + "' in [domain]");
      } else if (section == "problem") {
        if (key == "m") cfg.m = std::stoi(val);
        else if (key == "lambda_list") cfg.lambda_list = parse_list(val);
        else if (key == "lambda_seed") cfg.lambda_seed = std::stod(val);
        else if (key == "eigen_count") cfg.eigen_count = std::stoi(val);
        else throw ConfigError("unknown key '" + key + "' in [problem]");
      } else if (section == "grid") {
        if (key == "n_r") cfg.grid.n_r = std::stoi(val);
        else if (key == "n_theta") cfg.grid.n_theta = std::stoi(val);
        else if (key == "core_fraction") cfg.grid.core_fraction = std::stod(val);
        else throw ConfigError("unknown key '" + key + "' in [grid]");
      } else if (section == "tolerances") {
        cfg.tolerances[key] = std::stod(val);
      } else if (section == "output") {
        if (key == "dir") cfg.output_dir = val;
        else throw ConfigError("unknown key '" + key + "' in [output]");
      } else if (section == "run") {
        if (key == "jobs") cfg.jobs = std::stoi(val);
        else throw ConfigError("unknown key '" + key + "' in [run]");
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" +
                        val + "'");
    }
  }
  cfg.domain = domain_kind == "disk" ? DomainSpec::disk(radius)
                                     : DomainSpec::annulus(inner, modes);
  return cfg;
}

} // namespace gelfand
