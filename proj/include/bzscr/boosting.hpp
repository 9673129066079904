#pragma once

#include <optional>

#include "bzscr/objective.hpp"
#include "bzscr/scoring.hpp"
#include "bzscr/types.hpp"

namespace bzscr {

struct SolverSettings {
  int max_iters = 500;
  double grad_tol = 1e-6;
  double step_shrink = 0.5;
  double step_grow = 2.0;
  double epsilon = 1e-6;    // column-generation tolerance
  double power_tol = 1e-12;
  int power_max_iters = 100000;

  void validate() const;
};

// Dual matrix of the margin constraints (N x C). Seen columns carry
// s_i * sigmoid(rho_ir); unseen columns carry the mean-centered Delta factor
// times beta * s_i * sigmoid(cov_i), so each unseen row block sums to 0.
Matrix compute_q(const MarginMatrix& margins, const SampleCosts& costs, const Vector& s,
                 const DivergenceMatrix& delta, const std::vector<int>& labels,
                 const ClassSplit& split, const Hyperparams& hp);

// Top singular pair of M = sum_{ir} Q_ir x_i (phi(y_i) - phi(r))', by power
// iteration on M'M with a deterministic seeded start. Returns nullopt when M
// is exactly zero.
std::optional<WeakModel> learn_weak_model(const Matrix& q, const Dataset& data,
                                          const LabelEmbeddings& embeddings,
                                          const SolverSettings& settings);

// sum_{ir} Q_ir (h(x_i,y_i) - h(x_i,r)); equals u'Mv for the SVD model.
double violation_score(const WeakModel& h, const Matrix& q, const Dataset& data,
                       const LabelEmbeddings& embeddings);

struct SolveResult {
  Vector w;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
};

// Projected gradient with backtracking on
//   sum_i s_i l_i(rho(w)) + nu ||w||_1,  w >= 0,
// warm-started from warm_start. Never increases the objective.
SolveResult solve_w(const Ensemble& ens, const Dataset& data, const LabelEmbeddings& embeddings,
                    const DivergenceMatrix& delta, const ClassSplit& split, const Vector& s,
                    const Hyperparams& hp, const SolverSettings& settings,
                    const Vector& warm_start);

struct KktResidual {
  double max_constraint_violation = 0.0;  // max_j (violation_j - nu)
  double max_complementarity = 0.0;       // max_j |w_j (nu - violation_j)|
};

KktResidual kkt_residual(const Vector& w, const Matrix& q_at_w, const Ensemble& ens,
                         const Dataset& data, const LabelEmbeddings& embeddings,
                         const Hyperparams& hp);

}  // namespace bzscr
