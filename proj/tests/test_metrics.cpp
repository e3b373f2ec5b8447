#include <gtest/gtest.h>

#include <cmath>

#include "consensus_lab/algorithms.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/metrics.hpp"
#include "consensus_lab/rng.hpp"
#include "consensus_lab/spectral.hpp"
#include "oracles/dense.hpp"

using namespace consensus_lab;

namespace {

std::vector<TraceRow> geometric(double rate, int rounds, double scale = 1.0) {
  std::vector<TraceRow> rows;
  for (int t = 0; t <= rounds; ++t) rows.push_back({t, scale * std::pow(rate, t), 0.0});
  return rows;
}

std::vector<double> random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST(Rate, Geometric) {
  const RateEstimate r = estimate_rate(geometric(0.5, 30));
  EXPECT_NEAR(r.tau_hat, 0.5, 1e-6);
  EXPECT_TRUE(r.reliable);
  EXPECT_EQ(r.window_end, 30);
  EXPECT_EQ(r.window_start, 15);
}

TEST(Rate, ScaleInvariant) {
  const double a = estimate_rate(geometric(0.8, 60, 1.0)).tau_hat;
  const double b = estimate_rate(geometric(0.8, 60, 1e3)).tau_hat;
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(Rate, ExcludesFloor) {
  // 0.1^t hits 1e-12 at t = 12: too few rounds remain.
  EXPECT_THROW(estimate_rate(geometric(0.1, 40)), ValidationError);
  auto rows = geometric(0.7, 120);  // dips below the floor near t = 78
  const RateEstimate r = estimate_rate(rows);
  EXPECT_LT(r.window_end, 78);
  EXPECT_NEAR(r.tau_hat, 0.7, 1e-9);
}

TEST(Rate, FlagsOscillation) {
  std::vector<TraceRow> rows;
  for (int t = 0; t <= 60; ++t) rows.push_back({t, std::pow(0.9, t) * (t % 2 ? 1.0 : 1e-2), 0.0});
  EXPECT_FALSE(estimate_rate(rows).reliable);
}

TEST(Rate, SquareGradientDescent) {
  const Graph g = gen_ring(4);
  const CanonicalProblem prob(g, 0.0);
  auto prog = make_gd(prob, 0.25, random_vector(4, 1));
  const Trace tr = run_sync(*prog, g, {35, 0.0});
  EXPECT_NEAR(estimate_rate(tr).tau_hat, 0.5, 0.005);
}

// Linear iterations: the fitted rate approaches |lambda_2| of T_G as the
// window grows. The floor is absolute, so a larger zero-mean start buys a
// longer window.
TEST(Rate, ApproachesEigenvalueAsWindowGrows) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    Graph g;
    try {
      g = gen_er(n, 0.5, seed);
    } catch (const ValidationError&) {
      continue;
    }
    const SpectralSummary s = spectral_summary(g);
    const double alpha = 1.0 / (s.lambda1_L + 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::laplacian(g));
    double lam2 = 0;
    for (int i = 1; i < n; ++i) lam2 = std::max(lam2, std::abs(1 - alpha * es.eigenvalues()(i)));
    if (lam2 < 0.3) continue;
    const CanonicalProblem prob(g, 0.0);
    auto z0 = random_vector(n, seed + 100);
    const double mean = Eigen::Map<Eigen::VectorXd>(z0.data(), n).mean();
    for (auto& v : z0) v -= mean;
    double prev_gap = 1e300;
    for (double scale : {1.0, 1e6, 1e12}) {
      std::vector<double> start = z0;
      for (auto& v : start) v *= scale;
      auto prog = make_gd(prob, alpha, start);
      const Trace tr = run_sync(*prog, g, {2000, 0.0});
      const double gap = std::abs(estimate_rate(tr).tau_hat - lam2);
      EXPECT_LE(gap, prev_gap + 1e-9) << "seed " << seed << " scale " << scale;
      prev_gap = gap;
    }
    EXPECT_LE(prev_gap, 0.01 * lam2) << "seed " << seed;
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

TEST(ConvergenceTime, Examples) {
  const auto rows = geometric(0.5, 30);
  EXPECT_EQ(convergence_time(rows, std::pow(2.0, -10)), 10);
  std::vector<TraceRow> flat;
  for (int t = 0; t < 20; ++t) flat.push_back({t, 1.0, 0.0});
  EXPECT_FALSE(convergence_time(flat, 0.5).has_value());
  EXPECT_THROW(convergence_time(rows, 0.0), ValidationError);
}

TEST(ConvergenceTime, NearPredictionForGeometricTraces) {
  for (double rate : {0.5, 0.8, 0.95}) {
    const auto rows = geometric(rate, 2000, 3.0);
    const double tau = estimate_rate(rows).tau_hat;
    for (double eps : {1e-3, 1e-6}) {
      const int t = *convergence_time(rows, eps);
      const double predicted = std::log(1 / eps) / std::log(1 / tau);
      EXPECT_LE(t, 2 * predicted);
      EXPECT_GE(t, predicted / 2);
    }
  }
}

TEST(ConvergenceTime, HalvingToleranceNeverHelps) {
  const Graph g = gen_ring(6);
  const CanonicalProblem prob(g, 1e-2, Eigen::VectorXd::LinSpaced(6, 0, 1));
  const auto z0 = random_vector(6, 3);
  std::vector<std::unique_ptr<AgentProgram>> progs;
  progs.push_back(make_gd(prob, 0.2, z0));
  progs.push_back(make_admm_edge(prob, 1.0, 1.5, z0));
  progs.push_back(make_admm_consensus(prob, 1.0, 1.0, z0));
  progs.push_back(make_pdmm(prob, 1.0, 0.5, z0));
  progs.push_back(make_msda(prob, 2, 0.5, 0.3, MsdaOutput::Last));
  for (const auto& p : progs) {
    const Trace tr = run_sync(*p, g, {800, 0.0});
    std::optional<int> prev;
    bool absent = false;
    for (double eps = 1e-1; eps > 1e-10; eps /= 2) {
      const auto t = convergence_time(tr, eps);
      if (absent) EXPECT_FALSE(t.has_value()) << p->name();
      if (t && prev) EXPECT_GE(*t, *prev) << p->name();
      absent = !t.has_value();
      prev = t;
    }
  }
}

TEST(FitLine, ExactAndDegenerate) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const LineFit f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2, 1e-14);
  EXPECT_NEAR(f.intercept, 1, 1e-14);
  EXPECT_NEAR(f.residual, 0, 1e-14);
  const std::vector<double> same{1, 1};
  EXPECT_THROW(fit_line(same, same), ValidationError);
}
