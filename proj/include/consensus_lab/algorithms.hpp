#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "consensus_lab/engine.hpp"
#include "consensus_lab/problems.hpp"

namespace consensus_lab {

// Every program keeps a reference to its problem; the problem must outlive
// the program. Initial values z0 hold problem.size() entries (node-major).

/// Gradient descent with gradients computed on edges.
/// Node state: z_i. Phases: edge (gradient), node (step and broadcast).
std::unique_ptr<AgentProgram> make_gd(const Problem& problem, double alpha,
                                      std::span<const double> z0);

/// Relaxed ADMM with x and u on edges, z on nodes. gamma in (0, 2].
/// Node state: [z_i^t, z_i^{t-1}]. Edge state: [x_{e,0}, x_{e,1}, u_{e,0}, u_{e,1}]
/// where x is x^t and u is u^{t-1} at the start of round t. The first round
/// takes x^1 as copies of the received z^1 = z^0 and u^0 = 0.
std::unique_ptr<AgentProgram> make_admm_edge(const Problem& problem, double rho, double gamma,
                                             std::span<const double> z0);

/// Two-block consensus ADMM on full copies, one consensus variable per edge
/// kept (identically) by both endpoints. Needs node shards.
/// Node state: x_i, then per neighbor (ascending) [z_e, u_{e,i}, xhat_{e,i}].
std::unique_ptr<AgentProgram> make_admm_consensus(const Problem& problem, double rho, double gamma,
                                                  std::span<const double> z0);

/// Primal-dual method of multipliers on full copies. alpha in (0, 1].
/// Node state: x_i, then one dual u_{i,j} per neighbor (ascending).
std::unique_ptr<AgentProgram> make_pdmm(const Problem& problem, double rho, double alpha,
                                        std::span<const double> z0);

/// Degree-K polynomial P_K with P_K(0) = 0 that minimizes max |1 - P(lambda)|
/// over [lo, hi]: 1 - P_K(lambda) = T_K((hi + lo - 2 lambda)/(hi - lo)) / T_K((hi + lo)/(hi - lo)).
class ChebyshevGossip {
 public:
  /// Throws ValidationError for K < 1 or an interval outside (0, inf).
  ChebyshevGossip(int K, double lo, double hi);

  int degree() const { return K_; }
  double value(double lambda) const;
  /// P_K(W) X through the three-term recurrence (K products with W).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X) const;

  /// Step k = 0..K-1 of the recurrence on a single row:
  ///   b_{k+1} = a_k (c0 b_k - s W b_k) - r_k b_{k-1}
  /// with P_K(W) x = x - b_K and b_0 = x. Returns (a_k, r_k); s and c0 are
  /// shift() and center().
  std::pair<double, double> step(int k) const { return {a_[k], r_[k]}; }
  double center() const { return c0_; }
  double shift() const { return s_; }
  bool degenerate() const { return degenerate_; }

 private:
  int K_;
  double lo_, hi_, c0_ = 0, s_ = 0;
  bool degenerate_ = false;  // lo == hi: P(lambda) = lambda / hi
  std::vector<double> a_, r_;
};

/// chebyshev_gossip(W, K, states) with the interval [omega_L, lambda_1] of
/// the graph Laplacian. Rows of `states` are per-node vectors.
Eigen::MatrixXd chebyshev_gossip(const Eigen::MatrixXd& W, int K, double lo, double hi,
                                 const Eigen::MatrixXd& states);

enum class MsdaOutput { Average, Last };

/// Multi-step dual accelerated method with exact prox on node shards and the
/// Laplacian as gossip matrix. Average reads the running mean of all theta
/// iterates over nodes and rounds; Last reads every node's latest theta.
/// Node state: [theta, theta_prev, y, v, b_prev, b_cur, acc].
std::unique_ptr<AgentProgram> make_msda(const Problem& problem, int K, double eta, double sigma,
                                        MsdaOutput output = MsdaOutput::Average);

}  // namespace consensus_lab
