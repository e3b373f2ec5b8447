#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "consensus_lab/graph.hpp"

namespace consensus_lab {

/// Dense matrices attached to a graph. The selector S has one row per
/// extended edge (ordered as Graph::extended_edges) and a single 1 per row.
struct MatrixSet {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd degree;
  Eigen::MatrixXd laplacian;
  Eigen::MatrixXd normalized_laplacian;
  Eigen::MatrixXd walk;
  Eigen::MatrixXd selector;
};

MatrixSet build_matrices(const Graph& g);

/// Named eigenvalue statistics of the random-walk matrix W = D^-1 A and of the
/// Laplacian L.
struct SpectralSummary {
  int n = 0;
  int m = 0;
  double omega_star = 0;              // 2nd largest eigenvalue of W (by value)
  std::optional<double> omega_bar;    // smallest eigenvalue of W other than -1 and the unit one
  double omega_hat = 0;               // largest magnitude eigenvalue of W other than 1
  double omega_hat_delta = 0;         // 1 - omega_hat
  double omega_n = 0;                 // lambda_{n-1}(L) / lambda_1(L)
  double omega_L = 0;                 // second smallest Laplacian eigenvalue
  double lambda1_L = 0;               // largest Laplacian eigenvalue
  double lambda_penult_L = 0;         // same value as omega_L, kept under the Laplacian name
  std::vector<double> walk_spectrum;       // ascending
  std::vector<double> laplacian_spectrum;  // ascending

  bool bipartite() const;
};

inline constexpr double kEigenTolerance = 1e-9;

/// Eigenvalues of W through the symmetric conjugate D^-1/2 A D^-1/2.
/// Throws ValidationError if the unit eigenvalue is not simple.
SpectralSummary spectral_summary(const Graph& g);

struct RelationCheck {
  std::string name;
  bool pass = false;
  double slack = 0;  // smallest margin; negative means violated
};

struct SpectralRelationsReport {
  std::vector<RelationCheck> checks;
  Rational phi;
  bool all_pass() const;
};

/// Walk/normalized-Laplacian pairing, degree sandwich, lambda_1(L) bounds and
/// the Cheeger bounds on omega*. Uses brute-force conductance (n <= 20).
SpectralRelationsReport check_spectral_relations(const Graph& g);

}  // namespace consensus_lab
