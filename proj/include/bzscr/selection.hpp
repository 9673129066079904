#pragma once

#include "bzscr/types.hpp"

namespace bzscr {

enum class PaceMode { geometric, quantile };

struct PaceParams {
  double lambda = 1.0;      // tolerance, > 0
  double zeta = 0.1;        // softness, > 0
  double lambda_max = 1e8;
  double mu = 1.5;          // geometric growth, > 1
  PaceMode mode = PaceMode::quantile;
  double p0 = 0.5;          // initial selected proportion (quantile mode)
  double p_step = 0.1;

  void validate() const;
};

// Mixture-weighting regularizer g(s) = -zeta * ln(s + zeta/lambda).
double g_value(double s, const PaceParams& pace);

// Closed-form minimizer of s*l + g(s) over s in [0,1].
double optimal_s(double l, const PaceParams& pace);

Vector update_all_s(const Vector& costs, const PaceParams& pace);

// Geometric mode multiplies (lambda, zeta) by mu until lambda_max.
// Quantile mode tracks the p_t-quantile of the sorted costs, with
// zeta = lambda/10; at p_t = 1 lambda is pushed far enough above max(l)
// that the next s update selects every sample fully.
PaceParams anneal(const PaceParams& pace, const Vector& costs, int iteration);

}  // namespace bzscr
