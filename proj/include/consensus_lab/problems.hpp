#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "consensus_lab/graph.hpp"

namespace consensus_lab {

/// f_i(x) = 1/2 x^T H x - b^T x on a full copy x of all node values.
struct QuadraticShard {
  Eigen::MatrixXd H;
  Eigen::VectorXd b;
};

/// Objective that splits into one term per edge. Node values are k-vectors
/// stored contiguously (z[i * k + c]); every edge term carries its share of
/// the node regularizer so that the edge terms add up to the full objective.
class Problem {
 public:
  explicit Problem(Graph g, int k) : graph_(std::move(g)), k_(k) {}
  virtual ~Problem() = default;

  const Graph& graph() const { return graph_; }
  int dim() const { return k_; }
  int size() const { return graph_.num_nodes() * k_; }

  virtual std::string name() const = 0;
  virtual double objective(std::span<const double> z) const = 0;

  /// Gradient of edge term e with respect to both endpoint values.
  virtual void edge_gradient(int e, std::span<const double> zi, std::span<const double> zj,
                             std::span<double> gi, std::span<double> gj) const = 0;

  /// argmin f_e(x_i, x_j) + rho/2 (|x_i - n_i|^2 + |x_j - n_j|^2).
  virtual void edge_prox(int e, std::span<const double> ni, std::span<const double> nj, double rho,
                         std::span<double> xi, std::span<double> xj) const = 0;

  /// Per-node shards for full-copy algorithms. Edge terms belong to their
  /// lower-index endpoint. Empty when the objective is not quadratic.
  virtual std::optional<std::vector<QuadraticShard>> node_shards() const { return std::nullopt; }

  /// Convergence measure reported in traces.
  virtual double error(std::span<const double> z) const = 0;

  /// Error of full copies x_i (each of length size()).
  virtual double copies_error(std::span<const Eigen::VectorXd> copies) const;

  /// Full gradient, summed from the edge terms.
  Eigen::VectorXd gradient(std::span<const double> z) const;

 private:
  Graph graph_;
  int k_;
};

/// (1/2) sum_e (z_i - z_j)^2 + (delta/2)(n/m) |z - c|^2 on scalars.
class CanonicalProblem : public Problem {
 public:
  /// Throws ValidationError for delta < 0 or an anchor of the wrong length.
  CanonicalProblem(Graph g, double delta, Eigen::VectorXd anchor);
  CanonicalProblem(Graph g, double delta);  // anchor = 1

  std::string name() const override { return "canonical"; }
  double delta() const { return delta_; }
  const Eigen::VectorXd& anchor() const { return anchor_; }
  /// delta (n/m), the regularizer curvature per node.
  double kappa() const { return kappa_; }

  double objective(std::span<const double> z) const override;
  void edge_gradient(int e, std::span<const double> zi, std::span<const double> zj,
                     std::span<double> gi, std::span<double> gj) const override;
  void edge_prox(int e, std::span<const double> ni, std::span<const double> nj, double rho,
                 std::span<double> xi, std::span<double> xj) const override;
  std::optional<std::vector<QuadraticShard>> node_shards() const override;

  /// Unique minimizer for delta > 0 (dense solve); none for delta = 0.
  const std::optional<Eigen::VectorXd>& solution() const { return solution_; }

  /// |z - z*| when delta > 0, otherwise the disagreement |z - mean(z) 1|.
  double error(std::span<const double> z) const override;
  double copies_error(std::span<const Eigen::VectorXd> copies) const override;

 private:
  double delta_;
  double kappa_;
  Eigen::VectorXd anchor_;
  std::optional<Eigen::VectorXd> solution_;
};

/// sum_e | |z_i - z_j|^p - d_e^p |^q + (delta/2)(n/m) sum_i |z_i - t_i|^2.
class LocalizationProblem : public Problem {
 public:
  /// anchors has n * k entries. Throws ValidationError on bad exponents,
  /// negative distances or sizes that do not match the graph.
  LocalizationProblem(Graph g, int k, int p, int q, std::vector<double> distances, double delta,
                      std::vector<double> anchors);

  /// Experiment defaults: k = 2, d = 1, t = 1.
  static LocalizationProblem with_defaults(Graph g, int p, int q, double delta);

  std::string name() const override { return "localization"; }
  int p() const { return p_; }
  int q() const { return q_; }
  double delta() const { return delta_; }
  const std::vector<double>& distances() const { return distances_; }
  const std::vector<double>& anchors() const { return anchors_; }

  double objective(std::span<const double> z) const override;
  /// Only p = q = 2 is differentiable everywhere; other exponents throw.
  void edge_gradient(int e, std::span<const double> zi, std::span<const double> zj,
                     std::span<double> gi, std::span<double> gj) const override;
  void edge_prox(int e, std::span<const double> ni, std::span<const double> nj, double rho,
                 std::span<double> xi, std::span<double> xj) const override;
  /// Norm of the full gradient (p = q = 2), a stationarity measure.
  double error(std::span<const double> z) const override;

 private:
  double edge_value(int e, std::span<const double> zi, std::span<const double> zj) const;
  int p_;
  int q_;
  double delta_;
  std::vector<double> distances_;
  std::vector<double> anchors_;
};

/// Real roots of a x^3 + b x^2 + c x + d (a != 0), ascending, each polished
/// by one Newton step.
std::vector<double> real_cubic_roots(double a, double b, double c, double d);

/// Global minimizer of | |x|^p - d |^q + (rho/2)(x - n)^2 for p, q in {1, 2},
/// d >= 0, rho > 0. Ties go to the candidate closest to n, then to the
/// nonnegative one.
double prox1d(int p, int q, double d, double n, double rho);

/// The one-dimensional objective minimized by prox1d.
double prox1d_objective(int p, int q, double d, double n, double rho, double x);

/// argmin g(|x_i - x_j|) + a_i/2 |x_i - p_i|^2 + a_j/2 |x_j - p_j|^2 where
/// g(s) = | s^p - dp |^q. When p_i = p_j the difference points along the
/// first basis vector.
void weighted_pair_prox(int p, int q, double dp, std::span<const double> pi, double ai,
                        std::span<const double> pj, double aj, std::span<double> xi,
                        std::span<double> xj);

/// Instance file: "n m k p q delta", then m lines "i j d_ij", then n anchor
/// rows of k numbers.
LocalizationProblem read_localization(std::istream& in);
LocalizationProblem read_localization_file(const std::string& path);
void write_localization(std::ostream& out, const LocalizationProblem& prob);

}  // namespace consensus_lab
