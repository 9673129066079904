#pragma once

#include "bzscr/scoring.hpp"
#include "bzscr/selection.hpp"
#include "bzscr/types.hpp"

namespace bzscr {

struct Hyperparams {
  double nu = 0.0;    // L1 strength, absolute (already scaled by N)
  double beta = 0.0;  // SCR strength, absolute

  void validate() const;
};

struct SampleCosts {
  Vector l;    // composite cost per sample
  Vector cov;  // cov_i per sample
  Vector scr;  // softplus(cov_i) per sample
};

double softplus(double x);
double sigmoid(double x);

inline double logistic_loss(double rho) { return softplus(rho); }
inline double logistic_loss_deriv(double rho) { return sigmoid(rho); }

// Population covariance E[a.*b] - E[a]E[b]; needs at least 2 entries.
double covariance_term(const Vector& a, const Vector& b);

inline double scr_penalty(double cov) { return softplus(cov); }

// l_i = sum_{r in seen} L(rho_ir) + beta * softplus(cov_i), where cov_i is
// recovered from margins via cov(Delta, rho) - Var(Delta) over the unseen set.
SampleCosts sample_costs(const MarginMatrix& margins, const DivergenceMatrix& delta,
                         const std::vector<int>& labels, const ClassSplit& split,
                         const Hyperparams& hp);

// Full objective: sum_i [s_i*l_i + g(s_i)] + nu * sum_j w_j.
double total_objective(const SampleCosts& costs, const Vector& s, const PaceParams& pace,
                       const Vector& w, const Hyperparams& hp);

// Gradient of the w-subproblem objective: nu - sum_{ir} Q_ir (h_j(x_i,y_i) - h_j(x_i,r)).
Vector objective_gradient_w(const ScoreTable& table, const std::vector<int>& labels,
                            const Matrix& q, const Hyperparams& hp);

}  // namespace bzscr
