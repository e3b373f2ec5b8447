#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "consensus_lab/error.hpp"
#include "consensus_lab/problems.hpp"
#include "consensus_lab/rng.hpp"
#include "oracles/grid_search.hpp"

using namespace consensus_lab;

TEST(Canonical, Values) {
  const CanonicalProblem plain(gen_ring(4), 0.0);
  const std::vector<double> flat(4, 2.5);
  EXPECT_EQ(plain.objective(flat), 0.0);
  const std::vector<double> hot{1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(plain.objective(hot), 1.0);
  EXPECT_THROW(plain.objective(std::vector<double>(3, 0.0)), ValidationError);

  Eigen::VectorXd c(4);
  c << 1, -2, 0.5, 3;
  const CanonicalProblem reg(gen_ring(4), 1e-3, c);
  const std::vector<double> at_c(c.data(), c.data() + 4);
  EXPECT_DOUBLE_EQ(reg.objective(at_c), plain.objective(at_c));
}

TEST(Canonical, EdgeTermsSumToObjectiveGradient) {
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(7, -1, 2);
  const CanonicalProblem prob(gen_khop(7, 2), 0.3, c);
  Rng rng(5);
  std::vector<double> z(7);
  for (auto& v : z) v = rng.normal();
  const Eigen::VectorXd g = prob.gradient(z);
  for (int i = 0; i < 7; ++i) {
    std::vector<double> a = z, b = z;
    a[i] += 1e-6;
    b[i] -= 1e-6;
    EXPECT_NEAR(g(i), (prob.objective(a) - prob.objective(b)) / 2e-6, 1e-6);
  }
}

TEST(Canonical, ShardsSumToObjective) {
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(6, 0, 1);
  const CanonicalProblem prob(gen_er(6, 0.6, 2), 0.1, c);
  const auto shards = *prob.node_shards();
  Rng rng(1);
  Eigen::VectorXd z(6);
  for (auto& v : z) v = rng.normal();
  double total = 0;
  for (const auto& s : shards) total += 0.5 * z.dot(s.H * z) - s.b.dot(z);
  const double constant = 0.5 * prob.kappa() * c.squaredNorm();
  EXPECT_NEAR(total + constant, prob.objective(std::vector<double>(z.data(), z.data() + 6)), 1e-12);
}

TEST(Canonical, EdgeProxIsStationary) {
  const CanonicalProblem prob(gen_ring(5), 0.2, Eigen::VectorXd::LinSpaced(5, 0, 4));
  const double rho = 0.7;
  const std::vector<double> ni{0.3}, nj{-1.1};
  std::vector<double> xi(1), xj(1), gi(1), gj(1);
  prob.edge_prox(1, ni, nj, rho, xi, xj);
  prob.edge_gradient(1, xi, xj, gi, gj);
  EXPECT_NEAR(gi[0] + rho * (xi[0] - ni[0]), 0.0, 1e-12);
  EXPECT_NEAR(gj[0] + rho * (xj[0] - nj[0]), 0.0, 1e-12);
}

TEST(Canonical, SolutionSolvesRegularizedSystem) {
  const Graph g = gen_ring(6);
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(6, -1, 1);
  const CanonicalProblem prob(g, 1e-3, c);
  ASSERT_TRUE(prob.solution().has_value());
  const Eigen::VectorXd z = *prob.solution();
  EXPECT_LT(prob.gradient(std::vector<double>(z.data(), z.data() + 6)).norm(), 1e-12);
  EXPECT_FALSE(CanonicalProblem(g, 0.0).solution().has_value());
}

TEST(Prox1d, KnownCases) {
  EXPECT_DOUBLE_EQ(prox1d(2, 2, 1.0, 1.0, 0.3), 1.0);
  for (int p : {1, 2}) {
    for (int q : {1, 2}) {
      for (double d : {0.0, 0.5, 2.0}) EXPECT_NEAR(prox1d(p, q, d, 0.3, 1e9), 0.3, 1e-6);
    }
  }
  const double x = prox1d(2, 2, 1.0, 0.0, 0.1);
  EXPECT_NEAR(x, 0.987421, 1e-6);
  EXPECT_NEAR(x * x, 1.0 - 0.1 / 4.0, 1e-12);
}

TEST(Prox1d, BeatsFineGrid) {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int p = 1 + rng.uniform_int(0, 1);
    const int q = 1 + rng.uniform_int(0, 1);
    const double d = rng.uniform(0.0, 3.0);
    const double n = rng.uniform(-3.0, 3.0);
    const double rho = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
    const double x = prox1d(p, q, d, n, rho);
    auto f = [&](double t) { return prox1d_objective(p, q, d, n, rho, t); };
    const double reach = std::pow(d, 1.0 / p);
    const oracle::GridMin g = oracle::grid_minimize(f, n - 5 - reach, n + 5 + reach, 1000001);
    EXPECT_LE(f(x), g.value + 1e-9) << p << q << " d=" << d << " n=" << n << " rho=" << rho;
  }
}

TEST(Prox1d, Errors) {
  EXPECT_THROW(prox1d(3, 1, 1, 0, 1), ValidationError);
  EXPECT_THROW(prox1d(1, 1, -1, 0, 1), ValidationError);
  EXPECT_THROW(prox1d(1, 1, 1, 0, 0), ValidationError);
}

TEST(Cubic, Roots) {
  auto near = [](std::vector<double> got, std::vector<double> want) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  };
  near(real_cubic_roots(1, -6, 11, -6), {1, 2, 3});
  near(real_cubic_roots(1, 0, 1, -2), {1});
  near(real_cubic_roots(2, -4, 2, 0), {0, 1});
  near(real_cubic_roots(1, -3, 3, -1), {1});
}

TEST(EdgeProx, AlreadySatisfiedDistanceIsFixed) {
  const Graph g = gen_path(2);
  const LocalizationProblem prob(g, 2, 2, 2, {1.0}, 0.0, {0, 0, 0, 0});
  const std::vector<double> ni{0.2, 0.1}, nj{0.2 + 0.6, 0.1 + 0.8};
  std::vector<double> xi(2), xj(2);
  prob.edge_prox(0, ni, nj, 3.0, xi, xj);
  for (int c = 0; c < 2; ++c) {
    EXPECT_NEAR(xi[c], ni[c], 1e-12);
    EXPECT_NEAR(xj[c], nj[c], 1e-12);
  }
}

TEST(EdgeProx, CoincidentReferencesUseFirstAxis) {
  const LocalizationProblem prob(gen_path(2), 2, 2, 2, {1.0}, 0.0, {0, 0, 0, 0});
  const std::vector<double> ni{0.5, -0.5};
  std::vector<double> xi(2), xj(2);
  prob.edge_prox(0, ni, ni, 1.0, xi, xj);
  EXPECT_GT(xi[0] - xj[0], 0.0);
  EXPECT_NEAR(xi[1] - xj[1], 0.0, 1e-15);
  EXPECT_NEAR(0.5 * (xi[0] + xj[0]), 0.5, 1e-12);
}

TEST(EdgeProx, MatchesNumericalMinimization) {
  Rng rng(23);
  const Graph g = gen_ring(4);
  for (int trial = 0; trial < 24; ++trial) {
    const int p = 1 + trial % 2;
    const int q = 1 + (trial / 2) % 2;
    const double delta = (trial % 3 == 0) ? 0.0 : 0.8;
    std::vector<double> dist(4), anchors(8);
    for (auto& d : dist) d = rng.uniform(0.3, 2.0);
    for (auto& t : anchors) t = rng.normal();
    const LocalizationProblem prob(g, 2, p, q, dist, delta, anchors);
    const int e = trial % 4;
    const double rho = rng.uniform(0.3, 4.0);
    const std::vector<double> ni{rng.normal(), rng.normal()}, nj{rng.normal(), rng.normal()};
    std::vector<double> xi(2), xj(2);
    prob.edge_prox(e, ni, nj, rho, xi, xj);

    const Edge ed = g.edge(e);
    const double kap = delta * 4.0 / 4.0 / 2.0;  // delta n/(m d_i), ring n = m, degree 2
    auto local = [&](const std::vector<double>& v) {
      const double r = std::hypot(v[0] - v[2], v[1] - v[3]);
      double f = std::pow(std::abs(std::pow(r, p) - std::pow(dist[e], p)), q);
      for (int c = 0; c < 2; ++c) {
        f += 0.5 * kap * (std::pow(v[c] - anchors[ed.u * 2 + c], 2) +
                          std::pow(v[2 + c] - anchors[ed.v * 2 + c], 2));
        f += 0.5 * rho * (std::pow(v[c] - ni[c], 2) + std::pow(v[2 + c] - nj[c], 2));
      }
      return f;
    };
    const std::vector<double> ours{xi[0], xi[1], xj[0], xj[1]};
    const double best = oracle::multistart_minimize(local, ours, 1.0, 12, 100 + trial);
    EXPECT_LE(local(ours), best + 1e-6) << "p=" << p << " q=" << q;
  }
}

TEST(Localization, ZeroWhenDistancesSatisfied) {
  const Graph g = gen_ring(4);
  const LocalizationProblem prob(g, 2, 2, 1, std::vector<double>(4, 1.0), 0.0, std::vector<double>(8, 0.0));
  const std::vector<double> square{0, 0, 1, 0, 1, 1, 0, 1};
  EXPECT_NEAR(prob.objective(square), 0.0, 1e-15);
}

TEST(Localization, TranslationAndRotationInvariance) {
  const Graph g = gen_khop(6, 2);
  Rng rng(9);
  std::vector<double> z(12);
  for (auto& v : z) v = rng.normal();
  const LocalizationProblem free_prob(g, 2, 2, 2, std::vector<double>(12, 1.0), 0.0,
                                      std::vector<double>(12, 0.5));
  std::vector<double> shifted = z;
  for (int i = 0; i < 6; ++i) {
    shifted[2 * i] += 3.0;
    shifted[2 * i + 1] -= 1.5;
  }
  EXPECT_NEAR(free_prob.objective(z), free_prob.objective(shifted), 1e-9);

  const LocalizationProblem anchored(g, 2, 1, 2, std::vector<double>(12, 1.0), 0.7,
                                     std::vector<double>(12, 0.0));
  const double th = 0.83;
  std::vector<double> rotated(12);
  for (int i = 0; i < 6; ++i) {
    rotated[2 * i] = std::cos(th) * z[2 * i] - std::sin(th) * z[2 * i + 1];
    rotated[2 * i + 1] = std::sin(th) * z[2 * i] + std::cos(th) * z[2 * i + 1];
  }
  EXPECT_NEAR(anchored.objective(z), anchored.objective(rotated), 1e-9);
}

TEST(Localization, ReducesToCanonicalForUnitExponentProduct) {
  // With d = 0 and delta = 0, (p, q) = (2, 1) or (1, 2) gives |z_i - z_j|^2 per
  // edge, twice the canonical edge term.
  const Graph g = gen_ring(5);
  Rng rng(4);
  std::vector<double> z(5);
  for (auto& v : z) v = rng.normal();
  const CanonicalProblem canon(g, 0.0);
  for (auto [p, q] : {std::pair{2, 1}, std::pair{1, 2}}) {
    const LocalizationProblem loc(g, 1, p, q, std::vector<double>(5, 0.0), 0.0, std::vector<double>(5, 0.0));
    EXPECT_NEAR(loc.objective(z), 2.0 * canon.objective(z), 1e-12);
  }
}

TEST(Localization, GradientMatchesFiniteDifferences) {
  const LocalizationProblem prob = LocalizationProblem::with_defaults(gen_ring(6), 2, 2, 1.0);
  Rng rng(2);
  std::vector<double> z(12);
  for (auto& v : z) v = rng.normal();
  const Eigen::VectorXd g = prob.gradient(z);
  for (int c = 0; c < 12; ++c) {
    std::vector<double> a = z, b = z;
    a[c] += 1e-6;
    b[c] -= 1e-6;
    EXPECT_NEAR(g(c), (prob.objective(a) - prob.objective(b)) / 2e-6, 1e-5);
  }
  const LocalizationProblem nonsmooth = LocalizationProblem::with_defaults(gen_ring(6), 1, 1, 1.0);
  EXPECT_THROW(nonsmooth.gradient(z), ValidationError);
}

TEST(Localization, FileRoundTrip) {
  std::vector<double> dist{1.0, 0.5, 2.0, 1.5};
  std::vector<double> anchors{0, 1, 2, 3, 4, 5, 6, 7};
  const LocalizationProblem prob(gen_ring(4), 2, 1, 2, dist, 0.25, anchors);
  std::stringstream ss;
  write_localization(ss, prob);
  const LocalizationProblem back = read_localization(ss);
  EXPECT_EQ(back.graph(), prob.graph());
  EXPECT_EQ(back.distances(), dist);
  EXPECT_EQ(back.anchors(), anchors);
  EXPECT_EQ(back.p(), 1);
  EXPECT_EQ(back.q(), 2);
  std::istringstream bad("3 2 2 2 2 1\n0 1 1\n");
  EXPECT_THROW(read_localization(bad), ValidationError);
  EXPECT_THROW(read_localization_file("/nonexistent.txt"), IoError);
}
