#include "consensus_lab/metrics.hpp"

#include <cmath>
#include <string>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("fit_line: size mismatch");
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw ValidationError("fit_line: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw ValidationError("fit_line: all x values coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

RateEstimate estimate_rate(std::span<const TraceRow> rows) {
  std::size_t usable = 0;
  while (usable < rows.size() && rows[usable].error > kRateFloor) ++usable;
  if (usable < static_cast<std::size_t>(kRateMinRounds)) {
    throw ValidationError("trace has " + std::to_string(usable) + " rounds above the error floor, need " +
                          std::to_string(kRateMinRounds));
  }
  const std::size_t first = usable / 2;
  std::vector<double> t, le;
  for (std::size_t i = first; i < usable; ++i) {
    t.push_back(rows[i].t);
    le.push_back(std::log(rows[i].error));
  }
  const LineFit f = fit_line(t, le);
  RateEstimate r;
  r.tau_hat = std::exp(f.slope);
  r.window_start = rows[first].t;
  r.window_end = rows[usable - 1].t;
  r.residual = f.residual;
  r.reliable = f.residual <= kRateResidualThreshold;
  return r;
}

std::optional<int> convergence_time(std::span<const TraceRow> rows, double eps) {
  if (!(eps > 0)) throw ValidationError("tolerance must be positive");
  for (const TraceRow& r : rows) {
    if (r.error <= eps) return r.t;
  }
  return std::nullopt;
}

}  // namespace consensus_lab
