#pragma once

#include <optional>
#include <string>

#include "consensus_lab/graph.hpp"
#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

/// Closed-form tuning cases. The letter is the cycle regime (A: even cycles,
/// B: odd cycles only, C: acyclic), the digit the column of the rule.
enum class TuningCase { A1, A2, B1, B2, B3, C1, C2, C3 };

std::string to_string(TuningCase c);

struct TuningResult {
  double rho_star = 0;
  double gamma_star = 0;
  double tau_star = 0;
  TuningCase case_id = TuningCase::A1;
};

struct GdTuning {
  double alpha_star = 0;
  double tau_G_star = 0;
};

/// Optimal relaxed-ADMM parameters from omega* and omega_bar.
///
/// Regime A:  omega* >= 0: rho = 2 sqrt(1 - omega*^2),
///                          gamma = 4 / (3 - sqrt((2 - rho)/(2 + rho))), tau = gamma - 1
///            omega* <  0: rho = 2, gamma = 4/3, tau = 1/3
/// Regimes B and C use omega_bar as well (columns: 0 <= omega* <= |omega_bar|,
/// 0 <= |omega_bar| < omega*, omega* < 0). Column conditions are evaluated
/// with a 1e-12 tolerance and ties go to the leftmost column.
///
/// Throws ValidationError when omega* is outside (-1, 1), or when omega_bar
/// is missing or outside (-1, 1) for regimes B and C.
TuningResult tune_admm(double omega_star, std::optional<double> omega_bar, CycleClass cls);

GdTuning tune_gd(const SpectralSummary& s);

/// Regime used to tune a concrete graph. Any graph whose relaxed ADMM
/// operator carries the eigenvalue 1 - gamma (m - n + [bipartite] > 0) is
/// tuned as HasEvenCycle; otherwise classify_cycles decides.
CycleClass tuning_class(const Graph& g);

TuningResult tune_graph(const Graph& g, const SpectralSummary& s);

enum class Regime { Inside, Outside, Unknown };

std::string to_string(Regime r);

struct SpeedupReport {
  double tau_A_star = 0;
  double tau_G_star = 0;
  double ratio = 0;  // (1 - tau_A)^2 / (1 - tau_G)
  double delta = 0;  // d_max / d_min
  Regime regime = Regime::Unknown;  // even cycle and conductance <= 1/2
};

/// Conductance is only evaluated for n <= 20; larger graphs report Unknown.
SpeedupReport speedup_report(const Graph& g);

}  // namespace consensus_lab
