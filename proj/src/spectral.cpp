#include "consensus_lab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

namespace {

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

MatrixSet build_matrices(const Graph& g) {
  const int n = g.num_nodes();
  const int m = g.num_edges();
  MatrixSet s;
  s.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    s.adjacency(u, v) = 1.0;
    s.adjacency(v, u) = 1.0;
  }
  Eigen::VectorXd deg(n);
  for (int i = 0; i < n; ++i) deg(i) = g.degree(i);
  s.degree = deg.asDiagonal();
  s.laplacian = s.degree - s.adjacency;
  const Eigen::VectorXd inv_sqrt = deg.array().rsqrt();
  s.normalized_laplacian = inv_sqrt.asDiagonal() * s.laplacian * inv_sqrt.asDiagonal();
  s.walk = deg.cwiseInverse().asDiagonal() * s.adjacency;
  s.selector = Eigen::MatrixXd::Zero(2 * m, n);
  for (int e = 0; e < m; ++e) {
    s.selector(extended_index(e, 0), g.edge(e).u) = 1.0;
    s.selector(extended_index(e, 1), g.edge(e).v) = 1.0;
  }
  return s;
}

bool SpectralSummary::bipartite() const {
  return !walk_spectrum.empty() && walk_spectrum.front() <= -1.0 + kEigenTolerance;
}

SpectralSummary spectral_summary(const Graph& g) {
  const int n = g.num_nodes();
  if (n < 2) throw ValidationError("spectral summary needs at least two nodes");
  const MatrixSet mats = build_matrices(g);
  const Eigen::VectorXd inv_sqrt =
      mats.degree.diagonal().array().rsqrt().matrix();
  const Eigen::MatrixXd conj = inv_sqrt.asDiagonal() * mats.adjacency * inv_sqrt.asDiagonal();

  SpectralSummary s;
  s.n = n;
  s.m = g.num_edges();
  s.walk_spectrum = symmetric_eigenvalues(conj);
  s.laplacian_spectrum = symmetric_eigenvalues(mats.laplacian);

  const auto& w = s.walk_spectrum;
  const int unit = static_cast<int>(
      std::count_if(w.begin(), w.end(), [](double x) { return x >= 1.0 - kEigenTolerance; }));
  if (unit != 1) throw ValidationError("graph is disconnected (unit eigenvalue of W is not simple)");

  s.omega_star = w[n - 2];
  for (int k = 0; k < n - 1; ++k) {
    if (w[k] > -1.0 + kEigenTolerance) {
      s.omega_bar = w[k];
      break;
    }
  }
  double best = -1.0;
  for (int k = 0; k < n - 1; ++k) {
    if (std::abs(w[k]) > best) {
      best = std::abs(w[k]);
      s.omega_hat = w[k];
    }
  }
  s.omega_hat_delta = 1.0 - s.omega_hat;
  s.lambda1_L = s.laplacian_spectrum.back();
  s.omega_L = s.laplacian_spectrum[1];
  s.lambda_penult_L = s.omega_L;
  s.omega_n = s.omega_L / s.lambda1_L;
  return s;
}

bool SpectralRelationsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const RelationCheck& c) { return c.pass; });
}

SpectralRelationsReport check_spectral_relations(const Graph& g) {
  constexpr double tol = 1e-9;
  const MatrixSet mats = build_matrices(g);
  const SpectralSummary s = spectral_summary(g);
  const std::vector<double> normalized = symmetric_eigenvalues(mats.normalized_laplacian);
  const int n = g.num_nodes();
  const double dmin = g.min_degree();
  const double dmax = g.max_degree();

  SpectralRelationsReport report;
  report.phi = conductance(g);

  // lambda(W) ascending pairs with 1 - lambda(normalized L) descending.
  double pairing = 0;
  for (int i = 0; i < n; ++i) {
    pairing = std::max(pairing, std::abs(s.walk_spectrum[i] - (1.0 - normalized[n - 1 - i])));
  }
  report.checks.push_back({"walk-normalized-pairing", pairing <= tol, tol - pairing});

  double lower = INFINITY;
  double upper = INFINITY;
  for (int i = 0; i < n; ++i) {
    lower = std::min(lower, s.laplacian_spectrum[i] - dmin * normalized[i]);
    upper = std::min(upper, dmax * normalized[i] - s.laplacian_spectrum[i]);
  }
  report.checks.push_back({"dmin-normalized-le-laplacian", lower >= -tol, lower});
  report.checks.push_back({"laplacian-le-dmax-normalized", upper >= -tol, upper});

  const double l1 = s.lambda1_L;
  report.checks.push_back({"dmax-le-lambda1", l1 - dmax >= -tol, l1 - dmax});
  report.checks.push_back({"lambda1-le-2dmax", 2 * dmax - l1 >= -tol, 2 * dmax - l1});

  const double phi = report.phi.value();
  const double cheeger_low = s.omega_star - (1.0 - 2.0 * phi);
  const double cheeger_high = (1.0 - phi * phi / 2.0) - s.omega_star;
  report.checks.push_back({"cheeger-lower", cheeger_low >= -tol, cheeger_low});
  report.checks.push_back({"cheeger-upper", cheeger_high >= -tol, cheeger_high});
  return report;
}

}  // namespace consensus_lab
