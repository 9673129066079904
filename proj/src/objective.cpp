#include "bzscr/objective.hpp"

#include <cmath>

namespace bzscr {

void Hyperparams::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu) || !(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("hyperparams: nu and beta must be finite and non-negative");
}

double softplus(double x) {
  // max(x,0) + ln(1+e^{-|x|}): margins grow with the ensemble and the naive
  // form overflows.
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double covariance_term(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("covariance_term: length mismatch");
  if (a.size() < 2)
    throw std::invalid_argument("covariance_term: degenerate target set, need |Y_T| >= 2");
  const double n = static_cast<double>(a.size());
  return a.dot(b) / n - (a.sum() / n) * (b.sum() / n);
}

SampleCosts sample_costs(const MarginMatrix& margins, const DivergenceMatrix& delta,
                         const std::vector<int>& labels, const ClassSplit& split,
                         const Hyperparams& hp) {
  if (split.unseen.size() < 2)
    throw std::invalid_argument("sample_costs: degenerate target set, need |Y_T| >= 2");
  const int n = static_cast<int>(margins.rho.rows());
  const int t = static_cast<int>(split.unseen.size());

  SampleCosts out;
  out.l.resize(n);
  out.cov.resize(n);
  out.scr.resize(n);

  Vector delta_t(t), rho_t(t);
  for (int i = 0; i < n; ++i) {
    const int yi = labels[i];
    double fit = 0.0;
    for (int r : split.seen) fit += logistic_loss(margins.rho(i, r - 1));
    for (int k = 0; k < t; ++k) {
      delta_t(k) = delta.at(yi, split.unseen[k]);
      rho_t(k) = margins.rho(i, split.unseen[k] - 1);
    }
    // cov[Delta, F] via the shift identity cov[Delta, rho] - Var[Delta].
    out.cov(i) = covariance_term(delta_t, rho_t) - covariance_term(delta_t, delta_t);
    out.scr(i) = scr_penalty(out.cov(i));
    out.l(i) = fit + hp.beta * out.scr(i);
  }
  return out;
}

double total_objective(const SampleCosts& costs, const Vector& s, const PaceParams& pace,
                       const Vector& w, const Hyperparams& hp) {
  double obj = hp.nu * w.sum();
  for (int i = 0; i < costs.l.size(); ++i) obj += s(i) * costs.l(i) + g_value(s(i), pace);
  return obj;
}

Vector objective_gradient_w(const ScoreTable& table, const std::vector<int>& labels,
                            const Matrix& q, const Hyperparams& hp) {
  const int n = static_cast<int>(table.sample_scores.rows());
  const int k = static_cast<int>(table.sample_scores.cols());
  // violation_j = sum_i a_ij [ qrow_i * b(y_i, j) - (Q B)_ij ]
  const Matrix qb = q * table.class_scores;  // N x K
  const Vector qrow = q.rowwise().sum();     // N
  Vector grad = Vector::Constant(k, hp.nu);
  for (int i = 0; i < n; ++i) {
    const int yi = labels[i];
    for (int j = 0; j < k; ++j)
      grad(j) -= table.sample_scores(i, j) * (qrow(i) * table.class_scores(yi - 1, j) - qb(i, j));
  }
  return grad;
}

}  // namespace bzscr
