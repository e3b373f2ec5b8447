#pragma once

#include <optional>
#include <span>
#include <vector>

#include "consensus_lab/engine.hpp"

namespace consensus_lab {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // root mean square of the fit residuals
};

/// Ordinary least squares y ~ slope x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct RateEstimate {
  double tau_hat = 0;
  int window_start = 0;  // rounds, inclusive
  int window_end = 0;
  double residual = 0;  // RMS residual of the log-error fit
  bool reliable = true;  // residual below kRateResidualThreshold
};

inline constexpr double kRateFloor = 1e-12;
inline constexpr double kRateResidualThreshold = 0.1;
inline constexpr int kRateMinRounds = 20;

/// Fits log(error) against t over the last half of the rounds before the
/// error first reaches the floor. Throws ValidationError with fewer than
/// kRateMinRounds such rounds.
RateEstimate estimate_rate(std::span<const TraceRow> rows);
inline RateEstimate estimate_rate(const Trace& trace) { return estimate_rate(trace.rows); }

/// First round with error <= eps, or nothing.
std::optional<int> convergence_time(std::span<const TraceRow> rows, double eps);
inline std::optional<int> convergence_time(const Trace& trace, double eps) {
  return convergence_time(trace.rows, eps);
}

}  // namespace consensus_lab
