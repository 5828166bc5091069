#include "gelfand/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace gelfand {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Warn: return "WARN";
    default: return "FAIL";
  }
}

Verdict trend_verdict(const std::vector<double>& values) {
  if (values.size() < 2) return Verdict::Pass;
  int consecutive = 0;
  bool warned = false;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) {
      consecutive = 0;
    } else {
      if (++consecutive >= 2) return Verdict::Fail;
      warned = true;
    }
  }
  return warned ? Verdict::Warn : Verdict::Pass;
}

namespace diskfamily {

double lambda_of_eps(double eps) {
  const double e2 = eps * eps;
  return 8.0 * e2 / ((1.0 + e2) * (1.0 + e2));
}

double eps_of_umax(double u_max) {
  // u_max = 2 log((1+e^2)/e^2)
  return std::sqrt(1.0 / (std::exp(0.5 * u_max) - 1.0));
}

double eps_of_lambda(double lambda, bool upper) {
  double lo = upper ? 1e-12 : 1.0;
  double hi = upper ? 1.0 : 1e12;
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo * hi);
    const bool below = lambda_of_eps(mid) < lambda;
    if (upper)
      (below ? lo : hi) = mid;
    else
      (below ? hi : lo) = mid;
  }
  return std::sqrt(lo * hi);
}

double value(double eps, double lambda, double r) {
  const double e2 = eps * eps;
  return std::log(8.0 * e2 / (lambda * (e2 + r * r) * (e2 + r * r)));
}

double mass(double eps) { return 8.0 * M_PI / (1.0 + eps * eps); }

} // namespace diskfamily

// ---------------------------------------------------------------------------
// predictor
// ---------------------------------------------------------------------------

PredictorResult run_predictor(const ExperimentConfig& cfg) {
  cfg.validate();
  PredictorResult out;
  NewtonOptions nopt;
  nopt.grad_tol = cfg.tol("newton_grad");

  if (cfg.domain.kind == DomainKind::Annulus && cfg.m >= 2) {
    Configuration init = Configuration::polygonal(
        cfg.m, 0.5 * (cfg.domain.inner_radius + 1.0));
    out.critical = find_critical_point(cfg.domain, init, nopt);
  } else {
    Configuration init;
    if (cfg.m == 1) {
      init.points = {Point(0.3 * cfg.domain.disk_radius, 0.2 * cfg.domain.disk_radius)};
    } else {
      init = Configuration::polygonal(cfg.m, 0.45 * cfg.domain.disk_radius);
      init.symmetry = Symmetry::None; // full Newton in 2m variables
    }
    if (cfg.domain.kind == DomainKind::Annulus)
      init = Configuration::polygonal(cfg.m, 0.5 * (cfg.domain.inner_radius + 1.0));
    out.critical = find_critical_point(cfg.domain, init, nopt);
  }

  out.h = assemble_h(cfg.domain, out.critical.config);
  out.pred = eigen_h(out.h);
  out.pred.d = predict_d(cfg.domain, out.critical.config);
  out.pred.eta =
      eta_spectrum(hamiltonian_hess(cfg.domain, out.critical.config), out.pred.d);
  if (cfg.domain.kind == DomainKind::Annulus && cfg.m >= 2) {
    try {
      out.circulant = circulant_report(out.h, cfg.tol("circulant"),
                                       cfg.tol("eigen_group"));
    } catch (const NotCirculant&) {
      out.circulant.reset();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// solver pipeline with branch checkpoints
// ---------------------------------------------------------------------------

namespace {

std::string branch_tag(const ExperimentConfig& cfg) {
  std::ostringstream os;
  if (cfg.domain.kind == DomainKind::Disk)
    os << "disk_m" << cfg.m;
  else
    os << "annulus_a" << cfg.domain.inner_radius << "_m" << cfg.m;
  return os.str();
}

json state_to_json(const BranchState& s) {
  json j;
  j["lambda"] = s.lambda;
  j["u_max"] = s.u_max;
  j["u"] = std::vector<double>(s.u.data(), s.u.data() + s.u.size());
  return j;
}

BranchState state_from_json(const json& j) {
  BranchState s;
  s.lambda = j.at("lambda").get<double>();
  s.u_max = j.at("u_max").get<double>();
  const auto v = j.at("u").get<std::vector<double>>();
  s.u = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  return s;
}

void save_checkpoint(const ExperimentConfig& cfg, const SolveResult& res) {
  fs::create_directories(cfg.output_dir);
  json j;
  j["config_hash"] = cfg.hash();
  j["kind"] = res.disc.kind == Discretization::Kind::Radial ? "radial" : "sector";
  if (res.disc.kind == Discretization::Kind::Radial) {
    j["rho"] = res.disc.radial.rho;
    j["r"] = res.disc.radial.r;
  } else {
    j["a"] = res.disc.sector.a;
    j["m"] = res.disc.sector.m;
    j["r"] = res.disc.sector.r;
    j["theta_face"] = res.disc.sector.theta_face;
  }
  json states = json::array();
  for (const auto& s : res.states) states.push_back(state_to_json(s));
  j["states"] = std::move(states);
  if (res.fold) {
    j["fold"] = {{"lambda", res.fold->lambda}, {"index", res.fold->index}};
  }
  json trace = json::array();
  for (const auto& t : res.trace) trace.push_back({t[0], t[1], t[2]});
  j["trace"] = std::move(trace);
  std::ofstream out(fs::path(cfg.output_dir) /
                    ("branch_" + branch_tag(cfg) + ".json"));
  out << j.dump(2) << "\n";
}

std::optional<SolveResult> load_checkpoint(const ExperimentConfig& cfg) {
  const fs::path path =
      fs::path(cfg.output_dir) / ("branch_" + branch_tag(cfg) + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
    if (j.at("config_hash").get<uint64_t>() != cfg.hash()) return std::nullopt;
    SolveResult res;
    if (j.at("kind") == "radial") {
      res.disc = Discretization::disk(RadialGrid::from_nodes(
          j.at("rho").get<double>(), j.at("r").get<std::vector<double>>()));
    } else {
      res.disc = Discretization::annulus(SectorGrid::from_nodes(
          j.at("a").get<double>(), j.at("m").get<int>(),
          j.at("r").get<std::vector<double>>(),
          j.at("theta_face").get<std::vector<double>>()));
    }
    for (const auto& js : j.at("states")) res.states.push_back(state_from_json(js));
    if (j.contains("fold")) {
      FoldInfo f;
      f.lambda = j["fold"]["lambda"].get<double>();
      f.index = j["fold"]["index"].get<int>();
      res.fold = f;
    }
    for (const auto& jt : j.at("trace"))
      res.trace.push_back({jt[0].get<double>(), jt[1].get<double>(),
                           jt[2].get<double>()});
    if (res.states.size() != cfg.lambda_list.size()) return std::nullopt;
    res.resumed = true;
    return res;
  } catch (...) {
    return std::nullopt;
  }
}

// Fixed-lambda walk along a stable branch segment with geometric sub-steps.
BranchState walk_to_lambda(const PdeSolver& solver, BranchState state,
                           double target) {
  while (std::abs(std::log(target / state.lambda)) > 1e-13) {
    const double step = std::clamp(std::log(target / state.lambda), -0.35, 0.35);
    const double next = state.lambda * std::exp(step);
    state = solver.state_at_lambda(state, next);
  }
  return state;
}

SolveResult solve_disk(const ExperimentConfig& cfg, const PredictorResult& pr) {
  const double lambda_min = cfg.lambda_list.back();
  const double d = pr.pred.d(0);
  const double delta_min = d * std::sqrt(lambda_min);
  const double h0 = cfg.grid.core_fraction * delta_min;

  SolveResult res;
  res.disc = Discretization::disk(
      RadialGrid::disk(cfg.domain.disk_radius, cfg.grid.n_r, h0));
  PdeSolver solver(res.disc, cfg.tol("pde_residual"));

  const double rho = cfg.domain.disk_radius;
  const double lambda0 = 0.05 / (rho * rho);
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(solver.unknowns());
  BranchState start = solver.make_state(lambda0, solver.newton_solve(lambda0, u0));

  BranchTarget target;
  target.lambda_min = 0.7 * lambda_min;
  ContinuationOptions copts;
  copts.direction = +1;
  SolutionBranch branch = solver.continue_branch(start, target, copts);
  res.fold = branch.fold;
  for (const auto& s : branch.states)
    res.trace.push_back({s.lambda, s.u_max, solver.mass(s.u, s.lambda)});

  // Pin the exact sweep values, warm-starting from the nearest upper-branch
  // state and then from the previous target.
  const int fold_idx = branch.fold ? branch.fold->index : 0;
  BranchState warm = branch.states.back();
  for (double lam : cfg.lambda_list) {
    const BranchState* nearest = &warm;
    double best = std::abs(std::log(warm.lambda / lam));
    for (size_t i = fold_idx; i < branch.states.size(); ++i) {
      const double dist = std::abs(std::log(branch.states[i].lambda / lam));
      if (dist < best && branch.states[i].u_max > branch.states[fold_idx].u_max) {
        best = dist;
        nearest = &branch.states[i];
      }
    }
    BranchState s = walk_to_lambda(solver, *nearest, lam);
    res.states.push_back(s);
    warm = s;
    res.trace.push_back({s.lambda, s.u_max, solver.mass(s.u, s.lambda)});
  }
  return res;
}

SolveResult solve_annulus(const ExperimentConfig& cfg, const PredictorResult& pr) {
  const double lambda_min = cfg.lambda_list.back();
  const double lambda_max = cfg.lambda_list.front();
  const double d = pr.pred.d(0);
  const double r0 = pr.critical.config.points[0].norm();
  const double delta_min = d * std::sqrt(lambda_min);
  const double hr0 = cfg.grid.core_fraction * delta_min;
  const double ht0 = hr0 / r0;

  SolveResult res;
  res.disc = Discretization::annulus(SectorGrid::make(
      cfg.domain.inner_radius, cfg.m, cfg.grid.n_r, cfg.grid.n_theta, r0, hr0, ht0));
  PdeSolver solver(res.disc, cfg.tol("pde_residual"));

  double lambda_seed = cfg.lambda_seed > 0 ? cfg.lambda_seed : lambda_max;
  BranchState seeded;
  bool ok = false;
  std::string last_err;
  for (int attempt = 0; attempt < 14 && !ok; ++attempt) {
    try {
      const Eigen::VectorXd u0 = annulus_m_mode_seed(
          res.disc.sector, cfg.domain, pr.critical.config, d, lambda_seed);
      seeded = solver.make_state(lambda_seed, solver.newton_solve(lambda_seed, u0));
      ok = true;
    } catch (const Error& e) {
      last_err = e.what();
      lambda_seed *= 0.7;
      if (lambda_seed < 0.5 * lambda_min) break;
    }
  }
  if (!ok)
    throw NewtonDiverged("annulus seed failed down to lambda = " +
                         std::to_string(lambda_seed) + " (" + last_err + ")");

  res.trace.push_back({seeded.lambda, seeded.u_max,
                       solver.mass(seeded.u, seeded.lambda)});
  BranchState warm = seeded;
  for (double lam : cfg.lambda_list) {
    warm = walk_to_lambda(solver, warm, lam);
    res.states.push_back(warm);
    res.trace.push_back({warm.lambda, warm.u_max, solver.mass(warm.u, warm.lambda)});
  }
  return res;
}

} // namespace

SolveResult run_solver(const ExperimentConfig& cfg, const PredictorResult& pr,
                       bool allow_resume) {
  cfg.validate();
  if (allow_resume) {
    if (auto cached = load_checkpoint(cfg)) return *cached;
  }
  SolveResult res = cfg.domain.kind == DomainKind::Disk ? solve_disk(cfg, pr)
                                                        : solve_annulus(cfg, pr);
  save_checkpoint(cfg, res);
  return res;
}

// ---------------------------------------------------------------------------
// per-state analysis
// ---------------------------------------------------------------------------

StateAnalysis analyze_state(const ExperimentConfig& cfg, const PredictorResult& pr,
                            const Discretization& disc, const BranchState& state) {
  const int m = cfg.m;
  const int count = cfg.eigen_count > 0 ? cfg.eigen_count : 3 * m + 2;
  EigenOptions eopt;
  eopt.tol = cfg.tol("eigen");
  eopt.degenerate_tol = cfg.tol("degenerate");

  StateAnalysis a;
  a.lambda = state.lambda;
  a.pairs = weighted_spectrum(disc, state.u, state.lambda, count, eopt);
  a.peaks = locate_peaks(disc, state.u, state.lambda, m);
  local_mass(disc, state.u, state.lambda, a.peaks);
  a.band_gap = check_band_gap(a.pairs, m, state.lambda);

  const double L = std::log(state.lambda);
  for (int k = 1; k <= m && k <= static_cast<int>(a.pairs.size()); ++k) {
    ComparisonRow row;
    row.lambda = state.lambda;
    row.k = k;
    row.band = 1;
    row.mu_numeric = a.pairs[k - 1].mu;
    row.mu_predicted = predict_mu(pr.pred, k, state.lambda);
    row.residual = row.mu_numeric - row.mu_predicted;
    row.residual_times_log2 = row.residual * L * L;
    a.rows.push_back(row);
  }
  for (int k = m + 1; k <= 3 * m && k <= static_cast<int>(a.pairs.size()); ++k) {
    ComparisonRow row;
    row.lambda = state.lambda;
    row.k = k;
    row.band = 2;
    row.mu_numeric = a.pairs[k - 1].mu;
    row.mu_predicted = predict_mu_second_band(pr.pred, k, state.lambda);
    row.residual = row.mu_numeric - row.mu_predicted;
    row.residual_times_log2 = row.residual * L * L;
    a.rows.push_back(row);
  }

  for (int k = 1; k <= m && k <= static_cast<int>(a.pairs.size()); ++k)
    a.c_extracted.push_back(extract_c(disc, a.pairs[k - 1], a.peaks));

  // Alignment with the predicted eigenvectors, simple eigenvalues only.
  for (int k = 1; k <= m && k <= static_cast<int>(a.pairs.size()); ++k) {
    bool simple = true;
    for (int h = 0; h < m; ++h)
      if (h != k - 1 &&
          std::abs(pr.pred.Lambda(h) - pr.pred.Lambda(k - 1)) <= cfg.tol("eigen_group"))
        simple = false;
    if (!simple || a.pairs[k - 1].degenerate) {
      a.c_alignment.push_back(-1.0); // suppressed
      continue;
    }
    Eigen::VectorXd ce(m);
    for (int j = 0; j < m; ++j) ce(j) = a.c_extracted[k - 1][j];
    const double nc = ce.norm();
    a.c_alignment.push_back(
        nc > 0 ? std::abs(ce.dot(pr.pred.C.col(k - 1))) / nc : 0.0);
  }

  const std::vector<Point>& kappa = pr.critical.config.points;
  const double far_dist =
      std::min(2.0 * a.peaks.ball_radius, 0.35 * cfg.domain.diameter() / 2.0);
  a.far_field_u = far_field_error_u(disc, state.u, cfg.domain, kappa, far_dist);
  std::vector<double> c1n = a.c_extracted.empty() ? std::vector<double>(m, 1.0)
                                                  : a.c_extracted[0];
  {
    double n2 = 0;
    for (double c : c1n) n2 += c * c;
    // far-field model uses the raw peak values (they limit to c_j^1)
    (void)n2;
  }
  a.far_field_v1 =
      far_field_error_v(disc, a.pairs[0], cfg.domain, kappa, c1n, far_dist);

  const double c1 = a.c_extracted[0][0];
  a.profile_err = rescaled_profile_error(disc, a.pairs[0], a.peaks, 1, c1,
                                         a.pairs[0].mu, 10.0, false);
  a.profile_err_first = rescaled_profile_error(disc, a.pairs[0], a.peaks, 1, c1,
                                               a.pairs[0].mu, 10.0, true);
  return a;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

namespace {

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["canonical"] = cfg.canonical();
  j["domain"] = cfg.domain.kind == DomainKind::Disk ? "disk" : "annulus";
  if (cfg.domain.kind == DomainKind::Disk)
    j["radius"] = cfg.domain.disk_radius;
  else {
    j["inner_radius"] = cfg.domain.inner_radius;
    j["series_truncation"] = cfg.domain.series_truncation;
  }
  j["m"] = cfg.m;
  j["lambda_list"] = cfg.lambda_list;
  j["grid"] = {{"n_r", cfg.grid.n_r},
               {"n_theta", cfg.grid.n_theta},
               {"core_fraction", cfg.grid.core_fraction}};
  json tols;
  for (const auto& [k, v] : ExperimentConfig::default_tolerances())
    tols[k] = cfg.tol(k);
  j["tolerances"] = std::move(tols);
  return j;
}

json prediction_json(const ExperimentConfig& cfg, const PredictorResult& pr) {
  json j;
  j["grad_norm"] = pr.critical.grad_norm;
  j["converged"] = pr.critical.converged;
  j["iterations"] = pr.critical.iterations;
  json pts = json::array();
  for (const auto& p : pr.critical.config.points) pts.push_back({p.x(), p.y()});
  j["kappa"] = std::move(pts);
  j["hess_eigenvalues"] = std::vector<double>(
      pr.critical.hess_eigenvalues.data(),
      pr.critical.hess_eigenvalues.data() + pr.critical.hess_eigenvalues.size());
  j["h_matrix"] = json::array();
  for (int i = 0; i < pr.h.entries.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < pr.h.entries.cols(); ++c) row.push_back(pr.h.entries(i, c));
    j["h_matrix"].push_back(std::move(row));
  }
  j["Lambda"] = std::vector<double>(pr.pred.Lambda.data(),
                                    pr.pred.Lambda.data() + pr.pred.Lambda.size());
  j["d"] =
      std::vector<double>(pr.pred.d.data(), pr.pred.d.data() + pr.pred.d.size());
  j["eta"] = std::vector<double>(pr.pred.eta.data(),
                                 pr.pred.eta.data() + pr.pred.eta.size());
  json C = json::array();
  for (int c = 0; c < pr.pred.C.cols(); ++c) {
    json col = json::array();
    for (int i = 0; i < pr.pred.C.rows(); ++i) col.push_back(pr.pred.C(i, c));
    C.push_back(std::move(col));
  }
  j["c"] = std::move(C);
  if (pr.circulant) {
    json groups = json::array();
    for (const auto& g : pr.circulant->groups)
      groups.push_back({{"value", g.value}, {"ks", g.ks}});
    j["multiplicities"] = std::move(groups);
    j["alternating_simple"] = pr.circulant->has_alternating;
    if (pr.circulant->has_alternating)
      j["alternating_k"] = pr.circulant->alternating_k;
  }

  json table = json::array();
  for (double lam : cfg.lambda_list)
    for (int k = 1; k <= cfg.m; ++k) {
      json row;
      row["m"] = cfg.m;
      row["lambda"] = lam;
      row["k"] = k;
      row["Lambda_k"] = pr.pred.Lambda(k - 1);
      row["mu_pred"] = predict_mu(pr.pred, k, lam);
      json ck = json::array();
      for (int i = 0; i < cfg.m; ++i) ck.push_back(pr.pred.C(i, k - 1));
      row["c_k"] = std::move(ck);
      json dd = json::array();
      for (int i = 0; i < cfg.m; ++i) dd.push_back(pr.pred.d(i));
      row["d"] = std::move(dd);
      row["peak_height"] = predict_peak_height(pr.pred, std::min(k, cfg.m), lam);
      if (pr.circulant) {
        json mult = json::array();
        for (const auto& g : pr.circulant->groups) mult.push_back(g.ks.size());
        row["multiplicities"] = std::move(mult);
      }
      table.push_back(std::move(row));
    }
  j["mu_table"] = std::move(table);
  return j;
}

json analysis_json(const StateAnalysis& a) {
  json j;
  j["lambda"] = a.lambda;
  json pk = json::array();
  for (const auto& p : a.peaks.peaks) pk.push_back({p.x(), p.y()});
  j["peaks"] = std::move(pk);
  j["heights"] = a.peaks.heights;
  j["delta"] = a.peaks.delta;
  j["sigma"] = a.peaks.sigma;
  j["ball_radius"] = a.peaks.ball_radius;
  json mus = json::array();
  for (const auto& p : a.pairs)
    mus.push_back({{"k", p.k},
                   {"mu", p.mu},
                   {"wave", p.wave_number},
                   {"degenerate", p.degenerate},
                   {"residual", p.residual}});
  j["mu"] = std::move(mus);
  j["c_extracted"] = a.c_extracted;
  j["c_alignment"] = a.c_alignment;
  j["errors"] = {{"far_field_u", a.far_field_u},
                 {"far_field_v1", a.far_field_v1},
                 {"profile_second_order", a.profile_err},
                 {"profile_first_order", a.profile_err_first}};
  j["band_gap"] = {{"complete", a.band_gap.complete},
                   {"gap_ok", a.band_gap.gap_ok},
                   {"mu_after_band", a.band_gap.mu_after_band},
                   {"second_band_max_dev", a.band_gap.second_band_max_dev}};
  return j;
}

void write_text(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  out << s;
}

void append_log(const ExperimentConfig& cfg, const std::string& line) {
  fs::create_directories(cfg.output_dir);
  std::ofstream log(fs::path(cfg.output_dir) / "run.log", std::ios::app);
  log << line << "\n";
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,k,band,mu_numeric,mu_predicted,residual,residual_times_log2\n";
  for (const auto& r : rows)
    os << r.lambda << "," << r.k << "," << r.band << "," << r.mu_numeric << ","
       << r.mu_predicted << "," << r.residual << "," << r.residual_times_log2
       << "\n";
  return os.str();
}

std::string trace_csv(const SolveResult& res) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,u_max,mass\n";
  for (const auto& t : res.trace) os << t[0] << "," << t[1] << "," << t[2] << "\n";
  return os.str();
}

} // namespace

int cmd_predict(const ExperimentConfig& cfg) {
  cfg.validate();
  const PredictorResult pr = run_predictor(cfg);
  json j;
  j["config"] = config_json(cfg);
  j["prediction"] = prediction_json(cfg, pr);
  write_text(fs::path(cfg.output_dir) / "predict.json", j.dump(2) + "\n");

  std::ostringstream csv;
  csv.precision(17);
  csv << "m,lambda,k,Lambda_k,mu_pred,peak_height\n";
  for (double lam : cfg.lambda_list)
    for (int k = 1; k <= cfg.m; ++k)
      csv << cfg.m << "," << lam << "," << k << "," << pr.pred.Lambda(k - 1) << ","
          << predict_mu(pr.pred, k, lam) << ","
          << predict_peak_height(pr.pred, k, lam) << "\n";
  write_text(fs::path(cfg.output_dir) / "tables" / "predictions.csv", csv.str());
  std::cout << "predict: wrote " << cfg.output_dir << "/predict.json (grad_norm="
            << pr.critical.grad_norm << ")\n";
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg) {
  cfg.validate();
  const PredictorResult pr = run_predictor(cfg);
  const SolveResult res = run_solver(cfg, pr);
  write_text(fs::path(cfg.output_dir) / "tables" /
                 ("branch_" + branch_tag(cfg) + ".csv"),
             trace_csv(res));
  json j;
  j["config"] = config_json(cfg);
  if (res.fold)
    j["fold"] = {{"lambda", res.fold->lambda}, {"index", res.fold->index}};
  json st = json::array();
  for (const auto& s : res.states)
    st.push_back({{"lambda", s.lambda}, {"u_max", s.u_max}});
  j["states"] = std::move(st);
  j["resumed"] = res.resumed;
  write_text(fs::path(cfg.output_dir) / "solve.json", j.dump(2) + "\n");
  std::cout << "solve: " << res.states.size() << " states";
  if (res.fold) std::cout << ", fold at lambda = " << res.fold->lambda;
  std::cout << "\n";
  return 0;
}

namespace {

std::vector<StateAnalysis> analyze_all(const ExperimentConfig& cfg,
                                       const PredictorResult& pr,
                                       const SolveResult& res) {
  std::vector<StateAnalysis> out(res.states.size());
  if (cfg.jobs <= 1) {
    for (size_t i = 0; i < res.states.size(); ++i)
      out[i] = analyze_state(cfg, pr, res.disc, res.states[i]);
    return out;
  }
  std::vector<std::future<StateAnalysis>> futs;
  for (size_t i = 0; i < res.states.size(); ++i)
    futs.push_back(std::async(std::launch::async, [&, i] {
      return analyze_state(cfg, pr, res.disc, res.states[i]);
    }));
  for (size_t i = 0; i < futs.size(); ++i) out[i] = futs[i].get();
  return out;
}

} // namespace

int cmd_spectrum(const ExperimentConfig& cfg) {
  cfg.validate();
  const PredictorResult pr = run_predictor(cfg);
  const SolveResult res = run_solver(cfg, pr);
  const auto analyses = analyze_all(cfg, pr, res);

  json j;
  j["config"] = config_json(cfg);
  json st = json::array();
  for (const auto& a : analyses) st.push_back(analysis_json(a));
  j["states"] = std::move(st);
  write_text(fs::path(cfg.output_dir) / "spectrum.json", j.dump(2) + "\n");

  // Eigenfunction grids for external plotting.
  for (size_t is = 0; is < analyses.size(); ++is) {
    std::ostringstream os;
    os.precision(17);
    if (res.disc.kind == Discretization::Kind::Radial) {
      os << "r";
      for (const auto& p : analyses[is].pairs) os << ",k" << p.k;
      os << "\n";
      const auto& g = res.disc.radial;
      for (int i = 0; i <= g.n(); ++i) {
        os << g.r[i];
        for (const auto& p : analyses[is].pairs) os << "," << p.radial(i);
        os << "\n";
      }
    } else {
      os << "r,theta";
      for (const auto& p : analyses[is].pairs) os << ",k" << p.k;
      os << "\n";
      const auto& g = res.disc.sector;
      for (int i = 0; i <= g.nr(); ++i)
        for (int jt = 0; jt < g.nt(); ++jt) {
          os << g.r[i] << "," << g.theta[jt];
          for (const auto& p : analyses[is].pairs) {
            const Point x(g.r[i] * std::cos(g.theta[jt]),
                          g.r[i] * std::sin(g.theta[jt]));
            os << "," << (p.prefactor * p.sector(i, jt)).real();
            (void)x;
          }
          os << "\n";
        }
    }
    write_text(fs::path(cfg.output_dir) / "tables" /
                   ("eigenfunctions_" + std::to_string(is) + ".csv"),
               os.str());
  }
  std::cout << "spectrum: " << analyses.size() << " states analyzed\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  append_log(cfg, "verify start " + cfg.canonical());
  const PredictorResult pr = run_predictor(cfg);
  const SolveResult res = run_solver(cfg, pr);
  const auto analyses = analyze_all(cfg, pr, res);

  std::vector<ComparisonRow> rows;
  for (const auto& a : analyses)
    rows.insert(rows.end(), a.rows.begin(), a.rows.end());

  json verdicts;
  bool any_fail = false;
  auto record = [&](const std::string& name, Verdict v,
                    const std::vector<double>& seq) {
    verdicts[name] = {{"verdict", verdict_name(v)}, {"sequence", seq}};
    if (v == Verdict::Fail) any_fail = true;
  };

  for (int k = 1; k <= cfg.m; ++k) {
    std::vector<double> seq;
    for (const auto& a : analyses)
      for (const auto& r : a.rows)
        if (r.k == k && r.band == 1) seq.push_back(std::abs(r.residual_times_log2));
    record("first_band_k" + std::to_string(k), trend_verdict(seq), seq);
  }
  {
    std::vector<double> seq;
    for (const auto& a : analyses)
      seq.push_back(std::abs(a.peaks.sigma[0] - 8.0 * M_PI) /
                    std::sqrt(a.lambda));
    record("sigma_over_sqrt_lambda", trend_verdict(seq), seq);
  }
  {
    std::vector<double> seq;
    for (const auto& a : analyses) {
      const double d_num = a.peaks.delta[0] / std::sqrt(a.lambda);
      seq.push_back(std::abs(d_num - pr.pred.d(0)) / pr.pred.d(0));
    }
    record("delta_vs_d", trend_verdict(seq), seq);
  }
  {
    std::vector<double> seq;
    for (const auto& a : analyses) seq.push_back(a.profile_err);
    record("profile_second_order", trend_verdict(seq), seq);
  }
  {
    std::vector<double> seq;
    for (const auto& a : analyses) seq.push_back(a.far_field_u);
    record("far_field_u", trend_verdict(seq), seq);
  }
  {
    bool gap_all = true;
    for (const auto& a : analyses)
      if (a.band_gap.complete && !a.band_gap.gap_ok) gap_all = false;
    verdicts["band_gap"] = {{"verdict", gap_all ? "PASS" : "FAIL"}};
    if (!gap_all) any_fail = true;
  }

  json j;
  j["config"] = config_json(cfg);
  j["prediction"] = prediction_json(cfg, pr);
  if (res.fold)
    j["fold"] = {{"lambda", res.fold->lambda}, {"index", res.fold->index}};
  json st = json::array();
  for (const auto& a : analyses) st.push_back(analysis_json(a));
  j["states"] = std::move(st);
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"lambda", r.lambda},
                     {"k", r.k},
                     {"band", r.band},
                     {"mu_numeric", r.mu_numeric},
                     {"mu_predicted", r.mu_predicted},
                     {"residual", r.residual},
                     {"residual_times_log2", r.residual_times_log2}});
  j["comparison"] = std::move(jrows);
  j["verdicts"] = verdicts;
  j["exit_code"] = any_fail ? 1 : 0;
  write_text(fs::path(cfg.output_dir) / "results.json", j.dump(2) + "\n");
  write_text(fs::path(cfg.output_dir) / "tables" / "comparison.csv",
             comparison_csv(rows));
  write_text(fs::path(cfg.output_dir) / "tables" /
                 ("branch_" + branch_tag(cfg) + ".csv"),
             trace_csv(res));
  append_log(cfg, "verify done");

  for (auto it = verdicts.begin(); it != verdicts.end(); ++it)
    std::cout << it.value()["verdict"].get<std::string>() << "  " << it.key()
              << "\n";
  return any_fail ? 1 : 0;
}

int cmd_selftest(const ExperimentConfig& cfg) {
  struct Check {
    std::string name;
    bool pass;
    double value;
    double bound;
  };
  std::vector<Check> checks;
  auto push = [&](const std::string& name, double value, double bound) {
    checks.push_back({name, value <= bound, value, bound});
  };

  {
    const BubbleConstants bc = bubble_constants();
    const double tol = cfg.tol("bubble");
    push("bubble_mass", std::abs(bc.mass - 8.0 * M_PI) / (8.0 * M_PI), tol);
    push("bubble_mass_u", std::abs(bc.mass_u + 16.0 * M_PI) / (16.0 * M_PI), tol);
    push("bubble_log_moment",
         std::abs(bc.log_moment + 6.0 * std::log(2.0)) / (6.0 * std::log(2.0)), tol);
  }
  {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(-0.85, 0.85);
    double worst = 0.0;
    const DomainSpec disk = DomainSpec::disk(1.0);
    const DomainSpec ann = DomainSpec::annulus(0.5);
    for (int t = 0; t < 24; ++t) {
      Point x(U(rng), U(rng)), y(U(rng), U(rng));
      if (disk.contains(x, 1e-3) && disk.contains(y, 1e-3) && (x - y).norm() > 1e-3)
        worst = std::max(worst, std::abs(green(disk, x, y).value -
                                         green(disk, y, x).value));
      Point xa = x * 0.25 + Point(0.72, 0.0), ya = y * 0.2 + Point(0.0, 0.74);
      if (ann.contains(xa, 1e-3) && ann.contains(ya, 1e-3) &&
          (xa - ya).norm() > 1e-3)
        worst = std::max(worst, std::abs(green(ann, xa, ya).value -
                                         green(ann, ya, xa).value));
    }
    push("green_symmetry", worst, cfg.tol("green_symmetry"));
  }
  {
    // Perron / two-support structure on randomized disk configurations.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    const DomainSpec disk = DomainSpec::disk(1.0);
    double perron_min = 1.0, second_support = 1.0;
    for (int t = 0; t < 48; ++t) {
      const int m = 2 + t % 7;
      Configuration c;
      while (c.m() < m) {
        Point p(U(rng), U(rng));
        bool ok = disk.contains(p, 0.05);
        for (const auto& q : c.points)
          if ((p - q).norm() < 0.12) ok = false;
        if (ok) c.points.push_back(p);
      }
      const SpectralPrediction pred = eigen_h(assemble_h(disk, c));
      const Eigen::VectorXd c1 = pred.C.col(0);
      perron_min = std::min(perron_min, c1.cwiseAbs().minCoeff());
      if (c1.minCoeff() * c1.maxCoeff() < 0) perron_min = -1.0; // sign change
      for (int k = 0; k < m; ++k) {
        bool simple = true;
        for (int h = 0; h < m; ++h)
          if (h != k && std::abs(pred.Lambda(h) - pred.Lambda(k)) < 1e-9)
            simple = false;
        if (!simple) continue;
        Eigen::VectorXd v = pred.C.col(k).cwiseAbs();
        std::sort(v.data(), v.data() + v.size());
        second_support = std::min(second_support, v(v.size() - 2));
      }
    }
    push("perron_positive", perron_min > 1e-6 ? 0.0 : 1.0, 0.5);
    push("two_support", second_support > 1e-9 ? 0.0 : 1.0, 0.5);
  }
  {
    // Disk closed-form reference at a moderate resolution.
    ExperimentConfig mini = cfg;
    mini.domain = DomainSpec::disk(1.0);
    mini.m = 1;
    mini.lambda_list = {1e-2};
    mini.grid.n_r = 1024;
    const PredictorResult pr = run_predictor(mini);
    const SolveResult sr = run_solver(mini, pr, /*allow_resume=*/false);
    const double eps = diskfamily::eps_of_lambda(sr.states[0].lambda, true);
    double sup = 0.0;
    const auto& g = sr.disc.radial;
    for (int i = 0; i < sr.states[0].u.size(); ++i)
      sup = std::max(sup, std::abs(sr.states[0].u(i) -
                                   diskfamily::value(eps, sr.states[0].lambda,
                                                     g.r[i])));
    push("disk_oracle_sup_error", sup, cfg.tol("selftest_oracle"));
  }

  json j;
  j["config"] = config_json(cfg);
  json jc = json::array();
  bool all = true;
  for (const auto& c : checks) {
    jc.push_back({{"name", c.name},
                  {"pass", c.pass},
                  {"value", c.value},
                  {"bound", c.bound}});
    all = all && c.pass;
  }
  j["checks"] = std::move(jc);
  j["pass"] = all;
  const std::string dump = j.dump(2) + "\n";
  // Determinism: the serialized report must be reproducible byte for byte.
  const std::string dump2 = j.dump(2) + "\n";
  if (dump != dump2) {
    all = false;
    std::cout << "FAIL selftest_determinism\n";
  }
  write_text(fs::path(cfg.output_dir) / "selftest.json", dump);
  for (const auto& c : checks)
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  value="
              << c.value << " bound=" << c.bound << "\n";
  return all ? 0 : 1;
}

} // namespace gelfand
