#pragma once

#include <map>
#include <string>
#include <vector>

#include "gelfand/domain.hpp"

namespace gelfand {

struct GridParams {
  int n_r = 2048;
  int n_theta = 129;
  // first-interval spacing at the peak as a fraction of the bubble width
  double core_fraction = 1.0 / 48.0;
};

/// One experiment: a domain, a mode count, a descending lambda sweep and the
/// numerical knobs.  All tolerances live in a named map so reports can echo
/// the exact values used.
struct ExperimentConfig {
  DomainSpec domain = DomainSpec::disk(1.0);
  int m = 1;
  std::vector<double> lambda_list = {1e-3, 1e-4, 1e-5};
  GridParams grid;
  std::map<std::string, double> tolerances; // overrides of the defaults
  std::string output_dir = "out";
  int jobs = 1;
  double lambda_seed = 0.0; // 0 = automatic
  int eigen_count = 0;      // 0 = 3m + 2

  double tol(const std::string& name) const;
  void validate() const;
  std::string canonical() const; // deterministic echo used for hashing
  uint64_t hash() const;

  static const std::map<std::string, double>& default_tolerances();
  static ExperimentConfig from_file(const std::string& path);
};

} // namespace gelfand
