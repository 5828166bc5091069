#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gelfand/bubble.hpp"
#include "gelfand/config.hpp"
#include "gelfand/eigensolve.hpp"
#include "gelfand/peaks.hpp"
#include "gelfand/spectral.hpp"

namespace gelfand {

struct ComparisonRow {
  double lambda = 0.0;
  int k = 0;
  int band = 1;
  double mu_numeric = 0.0;
  double mu_predicted = 0.0;
  double residual = 0.0;           // mu_numeric - mu_predicted
  double residual_times_log2 = 0.0; // residual * (log lambda)^2
};

enum class Verdict { Pass, Warn, Fail };
const char* verdict_name(Verdict v);

// Trend policy for o(.) claims: improvements expected along the sweep; a
// single non-improvement is WARN, two consecutive non-improvements FAIL.
Verdict trend_verdict(const std::vector<double>& values);

// Exact solutions of the radial disk problem, u = log(8 e^2 / (lambda
// (e^2 + r^2)^2)) with 8 e^2 = lambda (1 + e^2)^2 on the unit disk; used by
// the self test as an independent reference.
namespace diskfamily {
double lambda_of_eps(double eps);
double eps_of_umax(double u_max);
// Branch root of 8 e^2 = lambda (1+e^2)^2: upper branch eps < 1.
double eps_of_lambda(double lambda, bool upper);
double value(double eps, double lambda, double r);
double mass(double eps);
} // namespace diskfamily

struct PredictorResult {
  CriticalPointReport critical;
  HMatrix h;
  SpectralPrediction pred;
  std::optional<CirculantReport> circulant;
};

PredictorResult run_predictor(const ExperimentConfig& cfg);

struct SolveResult {
  Discretization disc;
  std::vector<BranchState> states; // aligned with cfg.lambda_list
  std::optional<FoldInfo> fold;
  std::vector<std::array<double, 3>> trace; // (lambda, u_max, mass) along the branch
  bool resumed = false;
};

SolveResult run_solver(const ExperimentConfig& cfg, const PredictorResult& pr,
                       bool allow_resume = true);

struct StateAnalysis {
  double lambda = 0.0;
  std::vector<EigenPair> pairs;
  PeakData peaks;
  BandGapReport band_gap;
  std::vector<ComparisonRow> rows;
  std::vector<std::vector<double>> c_extracted; // raw v^k(x_j) for k = 1..m
  std::vector<double> c_alignment;              // |cos| vs eigen_h, simple k only
  double far_field_u = 0.0;
  double far_field_v1 = 0.0;
  double profile_err = 0.0;        // second-order model, k = 1
  double profile_err_first = 0.0;  // first-order model for comparison
};

StateAnalysis analyze_state(const ExperimentConfig& cfg, const PredictorResult& pr,
                            const Discretization& disc, const BranchState& state);

int cmd_predict(const ExperimentConfig& cfg);
int cmd_solve(const ExperimentConfig& cfg);
int cmd_spectrum(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);
int cmd_selftest(const ExperimentConfig& cfg);

} // namespace gelfand
