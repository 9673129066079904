#include "bzscr/boosting.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace bzscr {

void SolverSettings::validate() const {
  if (max_iters < 1 || grad_tol <= 0.0 || epsilon <= 0.0 || power_tol <= 0.0)
    throw std::invalid_argument("solver settings: tolerances and iteration caps must be positive");
  if (step_shrink <= 0.0 || step_shrink >= 1.0 || step_grow <= 1.0)
    throw std::invalid_argument("solver settings: need 0 < shrink < 1 < grow");
}

Matrix compute_q(const MarginMatrix& margins, const SampleCosts& costs, const Vector& s,
                 const DivergenceMatrix& delta, const std::vector<int>& labels,
                 const ClassSplit& split, const Hyperparams& hp) {
  const int n = static_cast<int>(margins.rho.rows());
  const int c = static_cast<int>(margins.rho.cols());
  const int t = static_cast<int>(split.unseen.size());
  if (t < 2)
    throw std::invalid_argument("compute_q: degenerate target set, need |Y_T| >= 2");

  Matrix q = Matrix::Zero(n, c);
  for (int i = 0; i < n; ++i) {
    const int yi = labels[i];
    for (int r : split.seen) q(i, r - 1) = s(i) * sigmoid(margins.rho(i, r - 1));
    double mean_delta = 0.0;
    for (int r : split.unseen) mean_delta += delta.at(yi, r);
    mean_delta /= t;
    const double factor = hp.beta * s(i) * sigmoid(costs.cov(i)) / t;
    for (int r : split.unseen) q(i, r - 1) = (delta.at(yi, r) - mean_delta) * factor;
  }
  return q;
}

namespace {

// M = X' * ((rowsum(Q) .* phi(y_i)) - Q * Phi), the m x d accumulation of
// Q_ir x_i (phi(y_i) - phi(r))'.
Matrix weak_model_matrix(const Matrix& q, const Dataset& data, const LabelEmbeddings& embeddings) {
  const int n = data.n_samples();
  const Vector qrow = q.rowwise().sum();
  Matrix target = q * embeddings.phi;  // N x d
  for (int i = 0; i < n; ++i)
    target.row(i) = qrow(i) * embeddings.phi.row(data.labels[i] - 1) - target.row(i);
  return data.features.transpose() * target;
}

}  // namespace

std::optional<WeakModel> learn_weak_model(const Matrix& q, const Dataset& data,
                                          const LabelEmbeddings& embeddings,
                                          const SolverSettings& settings) {
  if (!q.allFinite()) throw std::invalid_argument("learn_weak_model: non-finite dual matrix");
  const Matrix m = weak_model_matrix(q, data, embeddings);
  if ((m.array() == 0.0).all()) return std::nullopt;

  const Matrix gram = m.transpose() * m;  // d x d
  const int d = static_cast<int>(gram.rows());

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  for (int k = 0; k < d; ++k) v(k) = gauss(rng);
  v.normalize();

  for (int it = 0; it < settings.power_max_iters; ++it) {
    Vector next = gram * v;
    const double norm = next.norm();
    if (norm == 0.0) {
      // started in the null space; re-seed deterministically
      for (int k = 0; k < d; ++k) next(k) = gauss(rng);
      next.normalize();
      v = next;
      continue;
    }
    next /= norm;
    if (next.dot(v) < 0.0) next = -next;
    const double change = (next - v).lpNorm<Eigen::Infinity>();
    v = next;
    if (change < settings.power_tol) break;
  }

  WeakModel h;
  Vector mv = m * v;
  const double sigma = mv.norm();
  if (sigma == 0.0) return std::nullopt;
  h.u = mv / sigma;  // makes u'Mv = sigma >= 0
  h.v = v;
  return h;
}

double violation_score(const WeakModel& h, const Matrix& q, const Dataset& data,
                       const LabelEmbeddings& embeddings) {
  const Vector a = data.features * h.u;     // N
  const Vector b = embeddings.phi * h.v;    // C
  const Vector qb = q * b;                  // N
  const Vector qrow = q.rowwise().sum();    // N
  double score = 0.0;
  for (int i = 0; i < data.n_samples(); ++i)
    score += a(i) * (qrow(i) * b(data.labels[i] - 1) - qb(i));
  return score;
}

namespace {

struct WProblem {
  const ScoreTable& table;
  const std::vector<int>& labels;
  const DivergenceMatrix& delta;
  const ClassSplit& split;
  const Vector& s;
  const Hyperparams& hp;

  double value(const Vector& w, MarginMatrix* margins_out = nullptr,
               SampleCosts* costs_out = nullptr) const {
    MarginMatrix margins = margins_from_scores(raw_scores(table, w), labels, delta);
    SampleCosts costs = sample_costs(margins, delta, labels, split, hp);
    double f = hp.nu * w.sum() + s.dot(costs.l);
    if (margins_out) *margins_out = std::move(margins);
    if (costs_out) *costs_out = std::move(costs);
    return f;
  }

  Vector gradient(const MarginMatrix& margins, const SampleCosts& costs) const {
    const Matrix q = compute_q(margins, costs, s, delta, labels, split, hp);
    return objective_gradient_w(table, labels, q, hp);
  }
};

}  // namespace

SolveResult solve_w(const Ensemble& ens, const Dataset& data, const LabelEmbeddings& embeddings,
                    const DivergenceMatrix& delta, const ClassSplit& split, const Vector& s,
                    const Hyperparams& hp, const SolverSettings& settings,
                    const Vector& warm_start) {
  settings.validate();
  if (ens.size() < 1) throw std::invalid_argument("solve_w: need at least one weak model");
  if (warm_start.size() != ens.size())
    throw std::invalid_argument("solve_w: warm start length does not match ensemble");

  const ScoreTable table = make_score_table(ens, data, embeddings);
  const WProblem prob{table, data.labels, delta, split, s, hp};

  SolveResult res;
  res.w = warm_start.cwiseMax(0.0);

  MarginMatrix margins;
  SampleCosts costs;
  double f = prob.value(res.w, &margins, &costs);
  Vector grad = prob.gradient(margins, costs);
  double step = 1.0;
  double lipschitz = 0.0;  // local curvature estimate from gradient differences
  double f_best = f;
  int stall = 0;          // line-search iterations without measurable f progress
  bool polishing = false;  // fixed-step phase once f can no longer be resolved

  auto pg_inf_norm = [&]() {
    double pg_norm = 0.0;
    for (int j = 0; j < res.w.size(); ++j) {
      // free coordinates use the raw gradient; active bounds only count
      // descent directions
      const double pg = res.w(j) > 0.0 ? grad(j) : std::min(grad(j), 0.0);
      pg_norm = std::max(pg_norm, std::abs(pg));
    }
    return pg_norm;
  };

  for (res.iterations = 0; res.iterations < settings.max_iters; ++res.iterations) {
    if (pg_inf_norm() <= settings.grad_tol) {
      res.converged = true;
      break;
    }

    const Vector w_prev = res.w;
    const Vector grad_prev = grad;
    bool accepted = false;
    if (!polishing) {
      step *= settings.step_grow;
      for (int bt = 0; bt < 80; ++bt) {
        const Vector w_new = (w_prev - step * grad).cwiseMax(0.0);
        const Vector dw = w_new - w_prev;
        if (dw.lpNorm<Eigen::Infinity>() == 0.0) break;
        const double f_new = prob.value(w_new);
        // prox-style sufficient decrease; the bound is non-positive at the
        // projection point, so accepted steps never increase f
        if (f_new <= f + grad.dot(dw) + dw.squaredNorm() / (2.0 * step) + 1e-14 * std::abs(f)) {
          res.w = w_new;
          accepted = true;
          break;
        }
        step *= settings.step_shrink;
      }
      // once f stops moving by more than rounding noise the line search can
      // only limit-cycle; switch to gradient-driven steps
      if (accepted && f - prob.value(res.w) > 1e-13 * (1.0 + std::abs(f)))
        stall = 0;
      else
        ++stall;
      if ((!accepted || stall >= 20) && lipschitz > 0.0) polishing = true;
      if (!accepted && !polishing) break;  // no curvature estimate yet
    }
    if (polishing) {
      res.w = (w_prev - grad / (2.0 * lipschitz)).cwiseMax(0.0);
      if ((res.w - w_prev).lpNorm<Eigen::Infinity>() == 0.0) break;
    }

    f = prob.value(res.w, &margins, &costs);
    grad = prob.gradient(margins, costs);
    const double dw_norm = (res.w - w_prev).norm();
    if (dw_norm > 0.0) {
      const double l_est = (grad - grad_prev).norm() / dw_norm;
      if (std::isfinite(l_est) && l_est > 0.0) lipschitz = std::max(lipschitz, l_est);
    }
    f_best = std::min(f_best, f);
  }

  res.objective = std::min(f, f_best);
  return res;
}

KktResidual kkt_residual(const Vector& w, const Matrix& q_at_w, const Ensemble& ens,
                         const Dataset& data, const LabelEmbeddings& embeddings,
                         const Hyperparams& hp) {
  KktResidual res;
  if (ens.size() == 0) return res;
  res.max_constraint_violation = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < ens.size(); ++j) {
    const double viol = violation_score(ens.models[j], q_at_w, data, embeddings);
    res.max_constraint_violation = std::max(res.max_constraint_violation, viol - hp.nu);
    res.max_complementarity = std::max(res.max_complementarity, std::abs(w(j) * (hp.nu - viol)));
  }
  return res;
}

}  // namespace bzscr
