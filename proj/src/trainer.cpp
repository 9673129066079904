#include "bzscr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

namespace bzscr {

void TrainConfig::validate() const {
  if (nu_over_n < 0.0 || beta_over_n < 0.0)
    throw std::invalid_argument("train config: nu_over_n and beta_over_n must be non-negative");
  pace.validate();
  settings.validate();
  if (t_es < 1) throw std::invalid_argument("train config: t_es must be >= 1");
  if (max_iters_outer < 1) throw std::invalid_argument("train config: max_iters_outer must be >= 1");
  if (val_fraction <= 0.0 || val_fraction >= 1.0)
    throw std::invalid_argument("train config: val_fraction must lie in (0,1)");
}

namespace {

struct Partition {
  std::vector<int> train_idx;
  std::vector<int> val_idx;
  std::vector<int> seen_eff;        // classes trained on
  std::vector<int> val_candidates;  // prediction candidates for validation
};

Partition make_partition(const Dataset& data, const ClassSplit& split, const TrainConfig& cfg) {
  Partition part;
  std::mt19937_64 rng(cfg.seed);

  std::map<int, std::vector<int>> by_class;
  for (int i = 0; i < data.n_samples(); ++i) {
    if (!std::binary_search(split.seen.begin(), split.seen.end(), data.labels[i]))
      throw std::invalid_argument("train: sample " + std::to_string(i) +
                                  " has a non-seen label " + std::to_string(data.labels[i]));
    by_class[data.labels[i]].push_back(i);
  }

  if (cfg.val_mode == ValMode::samples) {
    part.seen_eff = split.seen;
    part.val_candidates = split.seen;
    for (auto& [cls, idx] : by_class) {
      std::shuffle(idx.begin(), idx.end(), rng);
      int n_val = static_cast<int>(std::llround(cfg.val_fraction * idx.size()));
      n_val = std::clamp(n_val, idx.size() >= 2 ? 1 : 0, static_cast<int>(idx.size()) - 1);
      for (size_t k = 0; k < idx.size(); ++k)
        (static_cast<int>(k) < n_val ? part.val_idx : part.train_idx).push_back(idx[k]);
    }
  } else {
    std::vector<int> classes = split.seen;
    std::shuffle(classes.begin(), classes.end(), rng);
    const int cs = static_cast<int>(classes.size());
    int n_val = static_cast<int>(std::llround(cfg.val_fraction * cs));
    n_val = std::clamp(n_val, 1, cs - 2);
    if (cs < 3)
      throw std::invalid_argument("train: class-level holdout needs at least 3 seen classes");
    part.val_candidates.assign(classes.begin(), classes.begin() + n_val);
    part.seen_eff.assign(classes.begin() + n_val, classes.end());
    std::sort(part.val_candidates.begin(), part.val_candidates.end());
    std::sort(part.seen_eff.begin(), part.seen_eff.end());
    for (int i = 0; i < data.n_samples(); ++i) {
      const bool held = std::binary_search(part.val_candidates.begin(),
                                           part.val_candidates.end(), data.labels[i]);
      (held ? part.val_idx : part.train_idx).push_back(i);
    }
  }
  std::sort(part.train_idx.begin(), part.train_idx.end());
  std::sort(part.val_idx.begin(), part.val_idx.end());
  if (part.val_idx.empty() || part.train_idx.empty())
    throw std::invalid_argument("train: empty train or validation partition");
  return part;
}

// Argmax over candidates with ties to the smallest class; candidates ascending.
int argmax_class(const Matrix& scores, int row, const std::vector<int>& candidates) {
  int best = candidates.front();
  double best_score = scores(row, best - 1);
  for (size_t k = 1; k < candidates.size(); ++k) {
    const int r = candidates[k];
    if (scores(row, r - 1) > best_score) {
      best = r;
      best_score = scores(row, r - 1);
    }
  }
  return best;
}

double error_rate(const Ensemble& ens, const Dataset& data, const LabelEmbeddings& embeddings,
                  const std::vector<int>& candidates) {
  Matrix scores;
  if (ens.size() == 0)
    scores = Matrix::Zero(data.n_samples(), embeddings.class_count());
  else
    scores = raw_scores(make_score_table(ens, data, embeddings), ens.weights);
  int wrong = 0;
  for (int i = 0; i < data.n_samples(); ++i)
    if (argmax_class(scores, i, candidates) != data.labels[i]) ++wrong;
  return static_cast<double>(wrong) / data.n_samples();
}

std::pair<Ensemble, TrainTrace> train_impl(const Dataset& data, const LabelEmbeddings& embeddings,
                                           const ClassSplit& split, const DivergenceMatrix& delta,
                                           const TrainConfig& config, bool self_paced) {
  config.validate();
  embeddings.validate();
  split.validate(embeddings.class_count());
  delta.validate();
  data.validate(embeddings.class_count());
  if (split.unseen.size() < 2)
    throw std::invalid_argument("train: degenerate target set, need |Y_T| >= 2");

  const Partition part = make_partition(data, split, config);
  const Dataset train_set = data.subset(part.train_idx);
  const Dataset val_set = data.subset(part.val_idx);
  const int n = train_set.n_samples();

  ClassSplit eff;
  eff.seen = part.seen_eff;
  eff.unseen = split.unseen;

  Hyperparams hp{config.nu_over_n * n, config.beta_over_n * n};
  hp.validate();

  Ensemble ens;
  ens.weights.resize(0);
  Vector s = Vector::Ones(n);
  Matrix q = Matrix::Ones(n, embeddings.class_count());  // Q <- s^(0) 1_C'

  MarginMatrix margins = compute_margins(ens, train_set, embeddings, delta);
  SampleCosts costs = sample_costs(margins, delta, train_set.labels, eff, hp);

  PaceParams pace = config.pace;
  if (self_paced && pace.mode == PaceMode::quantile) pace = anneal(pace, costs.l, 0);

  TrainTrace trace;
  std::vector<Vector> weight_history;
  double best_val = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= config.max_iters_outer; ++t) {
    auto h = learn_weak_model(q, train_set, embeddings, config.settings);
    if (!h) {
      if (t == 1)
        throw std::runtime_error("train: trivial problem, the initial weak-model matrix is zero");
      break;
    }
    const double violation = violation_score(*h, q, train_set, embeddings);
    if (violation < hp.nu + config.settings.epsilon) break;

    ens.models.push_back(*h);
    Vector warm(ens.size());
    warm.head(ens.size() - 1) = ens.weights;
    warm(ens.size() - 1) = 0.0;

    IterRecord rec;
    rec.iter = t;
    rec.violation = violation;
    rec.lambda = pace.lambda;
    rec.obj_before_w = total_objective(costs, s, pace, warm, hp);

    const SolveResult solved =
        solve_w(ens, train_set, embeddings, delta, eff, s, hp, config.settings, warm);
    ens.weights = solved.w;

    margins = compute_margins(ens, train_set, embeddings, delta);
    costs = sample_costs(margins, delta, train_set.labels, eff, hp);
    rec.obj_after_w = total_objective(costs, s, pace, ens.weights, hp);

    // Q from (w^(t), s^(t-1)), then the s update; the next weak learner sees
    // Q one s-step stale, matching the stated line order.
    q = compute_q(margins, costs, s, delta, train_set.labels, eff, hp);
    if (self_paced) s = update_all_s(costs.l, pace);
    rec.obj_after_s = total_objective(costs, s, pace, ens.weights, hp);

    rec.objective = rec.obj_after_s;
    rec.mean_cov = costs.cov.mean();
    rec.selected = static_cast<int>((s.array() > 0.0).count());
    rec.train_er = error_rate(ens, train_set, embeddings, eff.seen);
    rec.val_er = error_rate(ens, val_set, embeddings, part.val_candidates);
    trace.records.push_back(rec);
    weight_history.push_back(ens.weights);

    if (self_paced) pace = anneal(pace, costs.l, t);

    const bool worse_than_best = rec.val_er > best_val;
    best_val = std::min(best_val, rec.val_er);
    if (t >= config.t_es && worse_than_best) break;
  }

  // Keep the prefix with the minimal validation error; ties go to the
  // longest prefix so a saturated validation set does not truncate the
  // ensemble to a barely-trained stub.
  if (!trace.records.empty()) {
    int best = 0;
    for (size_t k = 1; k < trace.records.size(); ++k)
      if (trace.records[k].val_er <= trace.records[best].val_er) best = static_cast<int>(k);
    trace.best_iter = best + 1;
    ens.models.resize(trace.best_iter);
    ens.weights = weight_history[best];
  }
  return {std::move(ens), std::move(trace)};
}

}  // namespace

std::pair<Ensemble, TrainTrace> train(const Dataset& data, const LabelEmbeddings& embeddings,
                                      const ClassSplit& split, const DivergenceMatrix& delta,
                                      const TrainConfig& config) {
  return train_impl(data, embeddings, split, delta, config, true);
}

std::pair<Ensemble, TrainTrace> train_boosting_only(const Dataset& data,
                                                    const LabelEmbeddings& embeddings,
                                                    const ClassSplit& split,
                                                    const DivergenceMatrix& delta,
                                                    const TrainConfig& config) {
  return train_impl(data, embeddings, split, delta, config, false);
}

EvalReport evaluate(const Ensemble& ens, const Dataset& test, const LabelEmbeddings& embeddings,
                    const DivergenceMatrix& delta, const std::vector<int>& candidates) {
  if (test.n_samples() == 0) throw std::invalid_argument("evaluate: empty test set");
  if (candidates.empty()) throw std::invalid_argument("evaluate: empty candidate set");
  std::vector<int> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());

  Matrix scores;
  if (ens.size() == 0)
    scores = Matrix::Zero(test.n_samples(), embeddings.class_count());
  else
    scores = raw_scores(make_score_table(ens, test, embeddings), ens.weights);

  EvalReport report;
  std::map<int, std::pair<int, int>> tallies;  // class -> (correct, total)
  double delta_sum = 0.0;
  int wrong = 0;
  for (int i = 0; i < test.n_samples(); ++i) {
    const int pred = argmax_class(scores, i, sorted);
    const int truth = test.labels[i];
    auto& [correct, total] = tallies[truth];
    ++total;
    if (pred == truth) ++correct; else ++wrong;
    delta_sum += delta.at(truth, pred);
  }
  report.error_rate = static_cast<double>(wrong) / test.n_samples();
  report.mean_delta = delta_sum / test.n_samples();
  for (const auto& [cls, tally] : tallies)
    report.per_class[cls] = static_cast<double>(tally.first) / tally.second;
  return report;
}

std::vector<SweepRow> sweep_beta(const Dataset& train_data, const Dataset& test_data,
                                 const LabelEmbeddings& embeddings, const ClassSplit& split,
                                 const DivergenceMatrix& delta, const TrainConfig& base,
                                 const std::vector<double>& beta_grid) {
  if (beta_grid.empty()) throw std::invalid_argument("sweep_beta: empty grid");
  std::vector<SweepRow> rows;
  for (double beta : beta_grid) {
    TrainConfig cfg = base;
    cfg.beta_over_n = beta;
    auto [ens, trace] = train(train_data, embeddings, split, delta, cfg);
    const EvalReport report = evaluate(ens, test_data, embeddings, delta, split.unseen);
    rows.push_back({beta, report.error_rate, report.mean_delta});
  }
  return rows;
}

void write_trace_csv(const TrainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "iter,objective,train_er,val_er,mean_cov,selected,violation,lambda\n";
  char buf[512];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n", r.iter,
                  r.objective, r.train_er, r.val_er, r.mean_cov, r.selected, r.violation, r.lambda);
    out << buf;
  }
}

void write_report_json(const EvalReport& report, const std::string& path) {
  nlohmann::json doc;
  doc["error_rate"] = report.error_rate;
  doc["mean_delta"] = report.mean_delta;
  doc["per_class"] = nlohmann::json::object();
  for (const auto& [cls, acc] : report.per_class) doc["per_class"][std::to_string(cls)] = acc;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_json: cannot open " + path);
  out << doc.dump(2) << "\n";
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out << "beta_over_n,test_er,mean_delta\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.beta_over_n, r.test_er, r.mean_delta);
    out << buf;
  }
}

}  // namespace bzscr
