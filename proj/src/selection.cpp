#include "bzscr/selection.hpp"

#include <algorithm>
#include <cmath>

namespace bzscr {

void PaceParams::validate() const {
  if (lambda <= 0.0 || zeta <= 0.0)
    throw std::invalid_argument("pace: lambda and zeta must be positive");
  if (mu <= 1.0) throw std::invalid_argument("pace: mu must exceed 1");
  if (p0 <= 0.0 || p0 > 1.0) throw std::invalid_argument("pace: p0 must lie in (0,1]");
  if (p_step < 0.0) throw std::invalid_argument("pace: p_step must be non-negative");
  if (lambda_max <= 0.0) throw std::invalid_argument("pace: lambda_max must be positive");
}

double g_value(double s, const PaceParams& pace) {
  return -pace.zeta * std::log(s + pace.zeta / pace.lambda);
}

double optimal_s(double l, const PaceParams& pace) {
  if (l < 0.0) throw std::invalid_argument("optimal_s: cost must be non-negative");
  const double easy = pace.zeta * pace.lambda / (pace.zeta + pace.lambda);
  if (l <= easy) return 1.0;
  if (l >= pace.lambda) return 0.0;
  return std::clamp(pace.zeta / l - pace.zeta / pace.lambda, 0.0, 1.0);
}

Vector update_all_s(const Vector& costs, const PaceParams& pace) {
  Vector s(costs.size());
  for (int i = 0; i < costs.size(); ++i) s(i) = optimal_s(costs(i), pace);
  return s;
}

PaceParams anneal(const PaceParams& pace, const Vector& costs, int iteration) {
  PaceParams next = pace;
  if (pace.mode == PaceMode::geometric) {
    if (pace.lambda < pace.lambda_max) {
      next.lambda = pace.lambda * pace.mu;
      next.zeta = pace.zeta * pace.mu;
    }
    return next;
  }

  // Quantile mode.
  const double p = std::min(1.0, pace.p0 + iteration * pace.p_step);
  if (p >= 1.0 && pace.lambda >= pace.lambda_max) return next;  // frozen

  if (costs.size() == 0) return next;
  if (p >= 1.0) {
    // With zeta = lambda/10 the full-selection threshold is lambda/11, so a
    // factor of 12 over max(l) guarantees s = 1 for every sample.
    const double max_l = costs.maxCoeff();
    next.lambda = std::max(pace.lambda_max, 12.0 * std::max(max_l, 1e-300));
  } else {
    std::vector<double> sorted(costs.begin(), costs.end());
    std::sort(sorted.begin(), sorted.end());
    const int n = static_cast<int>(sorted.size());
    const int idx = std::clamp(static_cast<int>(std::ceil(p * n)) - 1, 0, n - 1);
    next.lambda = std::max(sorted[idx], 1e-300);
  }
  next.zeta = next.lambda / 10.0;
  return next;
}

}  // namespace bzscr
