#include "consensus_lab/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

namespace {

constexpr double kTie = 1e-12;

double rho_from(double omega) { return 2.0 * std::sqrt(std::max(0.0, 1.0 - omega * omega)); }

// Shared by the first column of regimes B and C.
TuningResult balanced_column(double ws, double wb, TuningCase id) {
  const double rho = rho_from(ws);
  const double root = std::sqrt(std::max(0.0, wb * wb - ws * ws));
  // Equals 2 exactly when omega_bar = -omega* (bipartite trees); clamp the
  // rounding excess.
  const double gamma = std::min(2.0, 2.0 * (2.0 + rho) / (2.0 + rho - wb - ws + root));
  return {rho, gamma, 1.0 - gamma * (0.5 - ws / (2.0 + rho)), id};
}

TuningResult saturated_column(double ws, TuningCase id) {
  const double rho = rho_from(ws);
  return {rho, 2.0, 2.0 * ws / (2.0 + rho), id};
}

}  // namespace

std::string to_string(TuningCase c) {
  switch (c) {
    case TuningCase::A1: return "A1";
    case TuningCase::A2: return "A2";
    case TuningCase::B1: return "B1";
    case TuningCase::B2: return "B2";
    case TuningCase::B3: return "B3";
    case TuningCase::C1: return "C1";
    case TuningCase::C2: return "C2";
    case TuningCase::C3: return "C3";
  }
  return "?";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Inside: return "inside";
    case Regime::Outside: return "outside";
    case Regime::Unknown: return "unknown";
  }
  return "?";
}

TuningResult tune_admm(double ws, std::optional<double> wb, CycleClass cls) {
  if (!std::isfinite(ws) || ws <= -1.0 || ws >= 1.0) {
    throw ValidationError("omega_star must lie in (-1, 1)");
  }
  const bool nonnegative = ws >= -kTie;
  if (cls == CycleClass::HasEvenCycle) {
    if (nonnegative) {
      const double rho = rho_from(ws);
      const double gamma = 4.0 / (3.0 - std::sqrt((2.0 - rho) / (2.0 + rho)));
      return {rho, gamma, gamma - 1.0, TuningCase::A1};
    }
    return {2.0, 4.0 / 3.0, 1.0 / 3.0, TuningCase::A2};
  }

  if (!wb) throw ValidationError("omega_bar is required for graphs without even cycles");
  if (!std::isfinite(*wb) || *wb <= -1.0 || *wb >= 1.0) {
    throw ValidationError("omega_bar must lie in (-1, 1)");
  }
  const double b = *wb;
  const bool odd = cls == CycleClass::OddCyclesOnly;
  if (nonnegative && ws <= std::abs(b) + kTie) {
    return balanced_column(ws, b, odd ? TuningCase::B1 : TuningCase::C1);
  }
  if (nonnegative) return saturated_column(ws, odd ? TuningCase::B2 : TuningCase::C2);
  if (odd) {
    const double rho = 2.0;
    const double gamma = 4.0 / (2.0 - b);
    return {rho, gamma, 1.0 - gamma * (0.5 - ws / (2.0 + rho)), TuningCase::B3};
  }
  const double rho = 2.0 * std::sqrt(1.0 - b * ws);
  const double gamma = (2.0 + rho) / (1.0 - b + rho / 2.0);
  const double tau = std::sqrt(std::max(0.0, b * (b - ws))) / (1.0 - b + std::sqrt(1.0 - b * ws));
  return {rho, gamma, tau, TuningCase::C3};
}

GdTuning tune_gd(const SpectralSummary& s) {
  const double l1 = s.lambda1_L;
  const double l2 = s.lambda_penult_L;
  return {2.0 / (l1 + l2), (l1 - l2) / (l1 + l2)};
}

CycleClass tuning_class(const Graph& g) {
  if (unsigned_cycle_rank(g) > 0) return CycleClass::HasEvenCycle;
  return classify_cycles(g);
}

TuningResult tune_graph(const Graph& g, const SpectralSummary& s) {
  return tune_admm(s.omega_star, s.omega_bar, tuning_class(g));
}

SpeedupReport speedup_report(const Graph& g) {
  const SpectralSummary s = spectral_summary(g);
  SpeedupReport r;
  r.tau_A_star = tune_graph(g, s).tau_star;
  r.tau_G_star = tune_gd(s).tau_G_star;
  r.ratio = (1.0 - r.tau_A_star) * (1.0 - r.tau_A_star) / (1.0 - r.tau_G_star);
  r.delta = static_cast<double>(g.max_degree()) / g.min_degree();
  if (classify_cycles(g) != CycleClass::HasEvenCycle) {
    r.regime = Regime::Outside;
  } else if (g.num_nodes() <= 20) {
    r.regime = conductance(g).value() <= 0.5 ? Regime::Inside : Regime::Outside;
  }
  return r;
}

}  // namespace consensus_lab
