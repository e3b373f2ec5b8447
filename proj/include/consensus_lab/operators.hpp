#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "consensus_lab/graph.hpp"
#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

enum class OperatorSpace { Node, ExtendedEdge };
enum class OperatorKind { TG, TA, MG, MA };

struct LinearOperator {
  Eigen::MatrixXd matrix;
  OperatorSpace space = OperatorSpace::Node;
  OperatorKind kind = OperatorKind::TG;
  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// T_G = I - alpha L.
LinearOperator build_TG(const Graph& g, double alpha);

/// Building blocks of the relaxed ADMM operator on the extended-edge space.
struct AdmmBlocks {
  Eigen::MatrixXd Q;        // block diagonal, Q_e = [[1,-1],[-1,1]]
  Eigen::MatrixXd A;        // (I + Q/rho)^-1 = I - Q/(rho+2)
  Eigen::MatrixXd B;        // S D^-1 S^T
  Eigen::MatrixXd B_tilde;  // 2B - I
  Eigen::MatrixXd R;        // I - Q
  Eigen::MatrixXd Omega;    // B_tilde R
  Eigen::MatrixXd U;        // Omega + (rho/2) B_tilde
};

/// Throws ValidationError unless rho > 0.
AdmmBlocks admm_blocks(const Graph& g, double rho);

/// T_A = I - gamma (A + B - 2BA). Requires rho > 0 and 0 < gamma <= 2.
LinearOperator build_TA(const Graph& g, double rho, double gamma);

using ComplexSpectrum = std::vector<std::complex<double>>;

/// Closed-form eigenvalues of T_A (2m values, counted with multiplicity).
///
/// Each walk eigenvalue omega in (-1, 1) gives the pair
///   (1 - gamma/2) + gamma/(2+rho) (omega +- i sqrt(1 - rho^2/4 - omega^2)),
/// switching to the real branch when the radicand is negative. The unit walk
/// eigenvalue gives 1, plus m - n copies of its companion
/// 1 - gamma/2 + gamma(2-rho)/(2(2+rho)) beyond the first; a bipartite graph
/// adds the companion of omega = -1. The remaining m - n + [bipartite]
/// eigenvalues equal 1 - gamma.
ComplexSpectrum predicted_TA_spectrum(const SpectralSummary& s, double rho, double gamma);

/// Eigenvalues of an assembled dense operator (nonsymmetric solver).
ComplexSpectrum dense_eigenvalues(const Eigen::MatrixXd& m);

/// Minimum-cost perfect matching between two equally sized multisets of
/// complex numbers (Hungarian algorithm on |a - b|). Returns the largest
/// matched distance. Throws ValidationError on a size mismatch.
double spectrum_distance(const ComplexSpectrum& a, const ComplexSpectrum& b);

/// Second largest eigenvalue modulus, the unit eigenvalue removed once.
double second_largest_modulus(ComplexSpectrum spectrum);

struct CircleReport {
  double omega_orthogonality = 0;  // max |Omega^T Omega - I|
  double btilde_involution = 0;    // max |B_tilde^2 - I|
  double r_involution = 0;         // max |R^2 - I|
  double ta_from_u = 0;            // max |T_A - ((1 - gamma/2) I + gamma/(rho+2) U)|
  double center = 0;
  double radius = 0;               // meaningful when rho <= 2
  int complex_count = 0;           // eigenvalues with |Im| > 1e-9
  double max_circle_deviation = 0; // over the complex ones
  int off_circle_real = 0;         // real eigenvalues other than 1 and 1 - gamma off the circle
  bool pass = false;
};

CircleReport circle_decomposition_check(const Graph& g, double rho, double gamma);

/// Which pair of relations ties D_G and alpha to (rho, beta, gamma).
///   Stated:     D_G = I - rho beta D,  alpha = gamma rho / (rho + 2)
///   Consistent: D_G = I - beta D,      alpha = gamma / (rho + 2)
/// Both coincide at rho = 1. Only the consistent pair makes the lifting
/// identity exact for every rho.
enum class LiftingRelation { Stated, Consistent };

struct LiftingPair {
  Eigen::MatrixXd M_G;
  Eigen::VectorXd v_G;
  Eigen::MatrixXd M_A;
  Eigen::VectorXd v_A;
  Eigen::VectorXd D_G;  // diagonals
  Eigen::VectorXd D_A;
  double rho = 0;
  double gamma = 0;
  double alpha = 0;
  double beta = 0;
};

/// D_A = (1 - beta) I, M = (I - D)^-1 (T - D), v = (I - D) 1.
/// Throws ValidationError unless beta > 0 and every (D_G)_ii != 1.
LiftingPair build_lifting(const Graph& g, double rho, double gamma, double beta,
                          LiftingRelation relation = LiftingRelation::Stated);

struct LiftingResiduals {
  double projection = 0;           // max |v_G - S^T v_A|
  double flow = 0;                 // max |D_vG M_G - S^T D_vA M_A S|
  double stationarity_G = 0;       // max |v_G^T M_G - v_G^T|
  double stationarity_A = 0;       // max |v_A^T M_A - v_A^T|
  double doubly_stochastic_G = 0;  // max row or column sum deviation of M_G
  double min_entry_A = 0;
};

LiftingResiduals verify_lifting(const LiftingPair& pair, const Graph& g);

}  // namespace consensus_lab
