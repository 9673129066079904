#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "bzscr/boosting.hpp"
#include "bzscr/objective.hpp"
#include "bzscr/selection.hpp"
#include "bzscr/types.hpp"

namespace bzscr {

enum class ValMode { samples, classes };

struct TrainConfig {
  double nu_over_n = 1e-4;   // rescaled by the training-partition size
  double beta_over_n = 0.2;
  PaceParams pace;
  SolverSettings settings;
  int t_es = 10;             // early-stop patience
  int max_iters_outer = 500;
  uint64_t seed = 0;
  double val_fraction = 0.2;
  ValMode val_mode = ValMode::samples;

  void validate() const;
};

struct IterRecord {
  int iter = 0;
  double objective = 0.0;  // full objective at the end of the iteration
  double train_er = 0.0;
  double val_er = 0.0;
  double mean_cov = 0.0;
  int selected = 0;        // count of s_i > 0
  double violation = 0.0;
  double lambda = 0.0;
  // sub-step objectives at this iteration's fixed (lambda, zeta); not
  // serialized, used by the monotonicity checks
  double obj_before_w = 0.0;
  double obj_after_w = 0.0;
  double obj_after_s = 0.0;
};

struct TrainTrace {
  std::vector<IterRecord> records;
  int best_iter = 0;  // 1-based index of the minimal validation error
};

struct EvalReport {
  double error_rate = 0.0;
  double mean_delta = 0.0;
  std::map<int, double> per_class;  // class -> accuracy
};

std::pair<Ensemble, TrainTrace> train(const Dataset& data, const LabelEmbeddings& embeddings,
                                      const ClassSplit& split, const DivergenceMatrix& delta,
                                      const TrainConfig& config);

// Same loop with s pinned to 1_N and annealing disabled.
std::pair<Ensemble, TrainTrace> train_boosting_only(const Dataset& data,
                                                    const LabelEmbeddings& embeddings,
                                                    const ClassSplit& split,
                                                    const DivergenceMatrix& delta,
                                                    const TrainConfig& config);

EvalReport evaluate(const Ensemble& ens, const Dataset& test, const LabelEmbeddings& embeddings,
                    const DivergenceMatrix& delta, const std::vector<int>& candidates);

struct SweepRow {
  double beta_over_n = 0.0;
  double test_er = 0.0;
  double mean_delta = 0.0;
};

// One full train+evaluate per grid point; all runs share the seed.
std::vector<SweepRow> sweep_beta(const Dataset& train_data, const Dataset& test_data,
                                 const LabelEmbeddings& embeddings, const ClassSplit& split,
                                 const DivergenceMatrix& delta, const TrainConfig& base,
                                 const std::vector<double>& beta_grid);

void write_trace_csv(const TrainTrace& trace, const std::string& path);
void write_report_json(const EvalReport& report, const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace bzscr
