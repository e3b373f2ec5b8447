#include "consensus_lab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

namespace {

void check_admm_parameters(double rho, double gamma) {
  if (!(rho > 0)) throw ValidationError("rho must be positive");
  // gamma = 2 is admitted: the optimal tuning selects it in one regime.
  if (!(gamma > 0 && gamma <= 2)) throw ValidationError("gamma must lie in (0, 2]");
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

LinearOperator build_TG(const Graph& g, double alpha) {
  const MatrixSet mats = build_matrices(g);
  const int n = g.num_nodes();
  return {Eigen::MatrixXd::Identity(n, n) - alpha * mats.laplacian, OperatorSpace::Node,
          OperatorKind::TG};
}

AdmmBlocks admm_blocks(const Graph& g, double rho) {
  if (!(rho > 0)) throw ValidationError("rho must be positive");
  const int m = g.num_edges();
  const int dim = 2 * m;
  const MatrixSet mats = build_matrices(g);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);

  AdmmBlocks b;
  b.Q = Eigen::MatrixXd::Zero(dim, dim);
  for (int e = 0; e < m; ++e) {
    const int r = 2 * e;
    b.Q(r, r) = 1.0;
    b.Q(r + 1, r + 1) = 1.0;
    b.Q(r, r + 1) = -1.0;
    b.Q(r + 1, r) = -1.0;
  }
  b.A = I - b.Q / (rho + 2.0);
  const Eigen::VectorXd inv_deg = mats.degree.diagonal().cwiseInverse();
  b.B = mats.selector * inv_deg.asDiagonal() * mats.selector.transpose();
  b.B_tilde = 2.0 * b.B - I;
  b.R = I - b.Q;
  b.Omega = b.B_tilde * b.R;
  b.U = b.Omega + (rho / 2.0) * b.B_tilde;
  return b;
}

LinearOperator build_TA(const Graph& g, double rho, double gamma) {
  check_admm_parameters(rho, gamma);
  const AdmmBlocks b = admm_blocks(g, rho);
  const int dim = static_cast<int>(b.A.rows());
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(dim, dim) - gamma * (b.A + b.B - 2.0 * b.B * b.A);
  return {std::move(t), OperatorSpace::ExtendedEdge, OperatorKind::TA};
}

ComplexSpectrum predicted_TA_spectrum(const SpectralSummary& s, double rho, double gamma) {
  check_admm_parameters(rho, gamma);
  const double base = 1.0 - gamma / 2.0;
  const double scale = gamma / (2.0 + rho);
  const double companion = gamma * (2.0 - rho) / (2.0 * (2.0 + rho));
  const bool bipartite = s.bipartite();

  ComplexSpectrum out;
  out.reserve(2 * s.m);
  out.emplace_back(1.0, 0.0);
  for (int k = 0; k < s.m - s.n + 1; ++k) out.emplace_back(base + companion, 0.0);
  if (bipartite) out.emplace_back(base - companion, 0.0);
  for (int k = 0; k < s.m - s.n + (bipartite ? 1 : 0); ++k) out.emplace_back(1.0 - gamma, 0.0);

  for (double w : s.walk_spectrum) {
    if (w >= 1.0 - kEigenTolerance || w <= -1.0 + kEigenTolerance) continue;
    double radicand = 1.0 - rho * rho / 4.0 - w * w;
    // A radicand within rounding of zero is a double root; taking sqrt of the
    // rounding residue would split it by ~1e-8. Tuned parameters land here.
    if (std::abs(radicand) <= 64 * std::numeric_limits<double>::epsilon()) radicand = 0.0;
    if (radicand >= 0) {
      const double im = scale * std::sqrt(radicand);
      out.emplace_back(base + scale * w, im);
      out.emplace_back(base + scale * w, -im);
    } else {
      const double r = std::sqrt(-radicand);
      out.emplace_back(base + scale * (w + r), 0.0);
      out.emplace_back(base + scale * (w - r), 0.0);
    }
  }
  return out;
}

ComplexSpectrum dense_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw ValidationError("eigenvalue iteration did not converge");
  const Eigen::VectorXcd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectrum_distance(const ComplexSpectrum& a, const ComplexSpectrum& b) {
  if (a.size() != b.size()) throw ValidationError("spectra have different sizes");
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  // Shortest augmenting path form, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = std::abs(a[i0 - 1] - b[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double worst = 0.0;
  for (int j = 1; j <= n; ++j) worst = std::max(worst, std::abs(a[match[j] - 1] - b[j - 1]));
  return worst;
}

double second_largest_modulus(ComplexSpectrum spectrum) {
  if (spectrum.size() < 2) return 0.0;
  auto unit = std::min_element(spectrum.begin(), spectrum.end(),
                               [](auto x, auto y) { return std::abs(x - 1.0) < std::abs(y - 1.0); });
  spectrum.erase(unit);
  double best = 0.0;
  for (auto z : spectrum) best = std::max(best, std::abs(z));
  return best;
}

CircleReport circle_decomposition_check(const Graph& g, double rho, double gamma) {
  check_admm_parameters(rho, gamma);
  const AdmmBlocks b = admm_blocks(g, rho);
  const int dim = static_cast<int>(b.A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd ta = build_TA(g, rho, gamma).matrix;

  CircleReport r;
  r.omega_orthogonality = max_abs(b.Omega.transpose() * b.Omega - I);
  r.btilde_involution = max_abs(b.B_tilde * b.B_tilde - I);
  r.r_involution = max_abs(b.R * b.R - I);
  r.ta_from_u = max_abs(ta - ((1.0 - gamma / 2.0) * I + gamma / (rho + 2.0) * b.U));
  r.center = 1.0 - gamma / 2.0;
  r.radius = rho <= 2.0 ? (gamma / 2.0) * std::sqrt((2.0 - rho) / (2.0 + rho)) : 0.0;

  for (auto z : dense_eigenvalues(ta)) {
    const double dist = std::abs(z - r.center);
    if (std::abs(z.imag()) > 1e-9) {
      ++r.complex_count;
      r.max_circle_deviation = std::max(r.max_circle_deviation, std::abs(dist - r.radius));
    } else if (std::abs(z.real() - 1.0) > 1e-6 && std::abs(z.real() - (1.0 - gamma)) > 1e-6 &&
               std::abs(dist - r.radius) > 1e-6) {
      ++r.off_circle_real;
    }
  }
  constexpr double tol = 1e-10;
  r.pass = r.omega_orthogonality <= tol && r.btilde_involution <= tol && r.r_involution <= tol &&
           r.ta_from_u <= tol && r.max_circle_deviation <= 1e-6;
  return r;
}

LiftingPair build_lifting(const Graph& g, double rho, double gamma, double beta,
                          LiftingRelation relation) {
  check_admm_parameters(rho, gamma);
  if (!(beta > 0)) throw ValidationError("beta must be positive");
  const int n = g.num_nodes();
  const int dim = 2 * g.num_edges();
  const bool stated = relation == LiftingRelation::Stated;

  LiftingPair p;
  p.rho = rho;
  p.gamma = gamma;
  p.beta = beta;
  p.alpha = stated ? gamma * rho / (rho + 2.0) : gamma / (rho + 2.0);
  const double scale = stated ? rho * beta : beta;
  p.D_G.resize(n);
  for (int i = 0; i < n; ++i) p.D_G(i) = 1.0 - scale * g.degree(i);
  p.D_A = Eigen::VectorXd::Constant(dim, 1.0 - beta);

  const Eigen::VectorXd gap_G = Eigen::VectorXd::Ones(n) - p.D_G;
  const Eigen::VectorXd gap_A = Eigen::VectorXd::Ones(dim) - p.D_A;
  const Eigen::MatrixXd tg = build_TG(g, p.alpha).matrix;
  const Eigen::MatrixXd ta = build_TA(g, rho, gamma).matrix;
  Eigen::MatrixXd mg = tg;
  mg.diagonal() -= p.D_G;
  Eigen::MatrixXd ma = ta;
  ma.diagonal() -= p.D_A;
  p.M_G = gap_G.cwiseInverse().asDiagonal() * mg;
  p.M_A = gap_A.cwiseInverse().asDiagonal() * ma;
  p.v_G = gap_G;
  p.v_A = gap_A;
  return p;
}

LiftingResiduals verify_lifting(const LiftingPair& pair, const Graph& g) {
  const Eigen::MatrixXd S = build_matrices(g).selector;
  LiftingResiduals r;
  r.projection = (pair.v_G - S.transpose() * pair.v_A).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd lhs = pair.v_G.asDiagonal() * pair.M_G;
  const Eigen::MatrixXd rhs = S.transpose() * pair.v_A.asDiagonal() * pair.M_A * S;
  r.flow = max_abs(lhs - rhs);
  r.stationarity_G =
      (pair.v_G.transpose() * pair.M_G - pair.v_G.transpose()).cwiseAbs().maxCoeff();
  r.stationarity_A =
      (pair.v_A.transpose() * pair.M_A - pair.v_A.transpose()).cwiseAbs().maxCoeff();
  const double rows = (pair.M_G.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (pair.M_G.colwise().sum().array() - 1.0).abs().maxCoeff();
  r.doubly_stochastic_G = std::max(rows, cols);
  r.min_entry_A = pair.M_A.minCoeff();
  return r;
}

}  // namespace consensus_lab
