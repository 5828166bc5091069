#include "gelfand/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace gelfand {

HMatrix assemble_h(const DomainSpec& dom, const Configuration& config) {
  config.validate(dom);
  const int m = config.m();
  const auto& p = config.points;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double g = green(dom, p[i], p[j]).value;
      h(i, j) = h(j, i) = -g;
    }
  for (int i = 0; i < m; ++i) {
    double diag = robin(dom, p[i]).value;
    for (int j = 0; j < m; ++j)
      if (j != i) diag += 2.0 * (-h(i, j));
    h(i, i) = diag;
  }
  return {h, config};
}

SpectralPrediction eigen_h(const HMatrix& h) {
  const Eigen::MatrixXd sym = 0.5 * (h.entries + h.entries.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  SpectralPrediction pred;
  pred.Lambda = es.eigenvalues();
  pred.C = es.eigenvectors();
  // Sign convention: the entry of largest magnitude is positive.
  for (int k = 0; k < pred.C.cols(); ++k) {
    int imax = 0;
    pred.C.col(k).cwiseAbs().maxCoeff(&imax);
    if (pred.C(imax, k) < 0) pred.C.col(k) = -pred.C.col(k);
  }
  pred.config = h.source_config;
  return pred;
}

Eigen::VectorXd predict_d(const DomainSpec& dom, const Configuration& config) {
  config.validate(dom);
  const int m = config.m();
  const auto& p = config.points;
  Eigen::VectorXd d(m);
  for (int j = 0; j < m; ++j) {
    double s = robin(dom, p[j]).value;
    for (int i = 0; i < m; ++i)
      if (i != j) s += green(dom, p[j], p[i]).value;
    d(j) = 0.125 * std::exp(4.0 * M_PI * s);
  }
  return d;
}

double predict_mu(const SpectralPrediction& pred, int k, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw LambdaOutOfRange("predict_mu: lambda must lie in (0,1)");
  if (k < 1 || k > pred.Lambda.size())
    throw IndexOutOfBand("predict_mu: k outside 1..m");
  const double L = std::log(lambda);
  const double c2 = 2.0 * M_PI * pred.Lambda(k - 1) - 0.5 * (3.0 * std::log(2.0) - 1.0);
  return -0.5 / L + c2 / (L * L);
}

double predict_peak_height(const SpectralPrediction& pred, int j, double lambda) {
  if (!(lambda > 0.0)) throw LambdaOutOfRange("predict_peak_height: lambda <= 0");
  if (j < 1 || j > pred.d.size())
    throw IndexOutOfBand("predict_peak_height: j outside 1..m");
  return -2.0 * std::log(lambda) - 2.0 * std::log(pred.d(j - 1));
}

Eigen::VectorXd eta_spectrum(const Eigen::MatrixXd& hess, const Eigen::VectorXd& d) {
  const int m = static_cast<int>(d.size());
  Eigen::VectorXd D(2 * m);
  for (int j = 0; j < m; ++j) D(2 * j) = D(2 * j + 1) = d(j);
  const Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
  const Eigen::MatrixXd scaled = D.asDiagonal() * sym * D.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  return es.eigenvalues();
}

double predict_mu_second_band(const SpectralPrediction& pred, int k, double lambda) {
  const int m = static_cast<int>(pred.Lambda.size());
  if (k < m + 1 || k > 3 * m)
    throw IndexOutOfBand("predict_mu_second_band: k outside m+1..3m");
  if (pred.eta.size() != 2 * m)
    throw ConfigError("predict_mu_second_band: eta spectrum not assembled");
  const int idx = 2 * m - (k - m) + 1; // 1-based into the ascending eta list
  return 1.0 - 48.0 * M_PI * pred.eta(idx - 1) * lambda;
}

std::vector<int> concentration_set(const SpectralPrediction& pred, int k, double tol) {
  if (k < 1 || k > pred.C.cols())
    throw IndexOutOfBand("concentration_set: k outside 1..m");
  const Eigen::VectorXd c = pred.C.col(k - 1).cwiseAbs();
  const double ref = c.maxCoeff();
  std::vector<int> set;
  for (int j = 0; j < c.size(); ++j)
    if (c(j) > tol * ref) set.push_back(j + 1);
  return set;
}

CirculantReport circulant_report(const HMatrix& h, double circulant_tol,
                                 double group_tol) {
  const int m = static_cast<int>(h.entries.rows());
  // Circulant check: entries depend on (j - i) mod m only.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int k = (j - i + m) % m;
      if (std::abs(h.entries(i, j) - h.entries(0, k)) > circulant_tol)
        throw NotCirculant("circulant_report: entries not cyclic to tolerance");
    }

  CirculantReport rep;
  // Real DFT symbol of the first row.
  Eigen::VectorXd symbol(m);
  for (int k = 0; k < m; ++k) {
    double s = 0;
    for (int j = 0; j < m; ++j)
      s += h.entries(0, j) * std::cos(2.0 * M_PI * j * k / m);
    symbol(k) = s;
  }
  std::sort(symbol.data(), symbol.data() + m);
  rep.dft_eigenvalues = symbol;

  const SpectralPrediction pred = eigen_h(h);
  int k = 0;
  while (k < m) {
    CirculantGroup g;
    g.value = pred.Lambda(k);
    g.ks.push_back(k + 1);
    while (k + 1 < m && std::abs(pred.Lambda(k + 1) - g.value) <= group_tol) {
      ++k;
      g.ks.push_back(k + 1);
    }
    rep.groups.push_back(g);
    ++k;
  }

  if (m % 2 == 0) {
    // Look for the simple alternating eigenvector among k >= 2.
    for (const auto& g : rep.groups) {
      if (g.ks.size() != 1 || g.ks[0] == 1) continue;
      const Eigen::VectorXd c = pred.C.col(g.ks[0] - 1);
      Eigen::VectorXd alt(m);
      for (int j = 0; j < m; ++j) alt(j) = (j % 2 == 0) ? -1.0 : 1.0;
      alt.normalize();
      if (std::abs(c.dot(alt)) > 1.0 - 1e-8) {
        rep.has_alternating = true;
        rep.alternating_k = g.ks[0];
      }
    }
  }
  return rep;
}

SpectralPrediction make_prediction(const DomainSpec& dom, const Configuration& config,
                                   bool with_hessian) {
  SpectralPrediction pred = eigen_h(assemble_h(dom, config));
  pred.d = predict_d(dom, config);
  if (with_hessian)
    pred.eta = eta_spectrum(hamiltonian_hess(dom, config), pred.d);
  return pred;
}

} // namespace gelfand
