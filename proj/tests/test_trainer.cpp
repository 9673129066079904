#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bzscr/divergence.hpp"
#include "bzscr/trainer.hpp"
#include "bzscr/synthetic.hpp"

using namespace bzscr;
namespace fs = std::filesystem;

namespace {

struct Bench {
  SyntheticData data;
  DivergenceMatrix delta;
};

Bench make_bench(uint64_t seed, int per_class = 12, int c = 8, int cs = 5, int dim = 6) {
  SyntheticSpec spec;
  spec.classes = c;
  spec.seen = cs;
  spec.embed_dim = dim;
  spec.feature_dim = dim;
  spec.samples_per_class = per_class;
  spec.noise_scale = 1.0;
  Bench b{generate_synthetic(spec, seed), {}};
  b.delta = cosine_divergence(b.data.embeddings);
  return b;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.max_iters_outer = 12;
  cfg.t_es = 4;
  cfg.settings.max_iters = 200;
  cfg.settings.grad_tol = 1e-6;
  return cfg;
}

}  // namespace

TEST_CASE("huge nu stops immediately with an empty ensemble") {
  auto b = make_bench(1);
  TrainConfig cfg = small_config();
  cfg.nu_over_n = 1e9;
  auto [ens, trace] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  CHECK(ens.size() <= 1);
  CHECK(trace.records.empty());
}

TEST_CASE("training is deterministic") {
  auto b = make_bench(2);
  const TrainConfig cfg = small_config();
  auto [ens1, trace1] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  auto [ens2, trace2] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  REQUIRE(trace1.records.size() == trace2.records.size());
  for (size_t k = 0; k < trace1.records.size(); ++k) {
    CHECK(trace1.records[k].objective == trace2.records[k].objective);
    CHECK(trace1.records[k].val_er == trace2.records[k].val_er);
    CHECK(trace1.records[k].violation == trace2.records[k].violation);
  }
  REQUIRE(ens1.size() == ens2.size());
  CHECK(ens1.weights == ens2.weights);
  for (int j = 0; j < ens1.size(); ++j) CHECK(ens1.models[j].u == ens2.models[j].u);
}

TEST_CASE("objective is non-increasing across each within-iteration update sequence") {
  auto b = make_bench(3, 16);
  TrainConfig cfg = small_config();
  cfg.beta_over_n = 0.15;
  auto [ens, trace] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  REQUIRE(!trace.records.empty());
  for (const auto& r : trace.records) {
    CHECK(r.obj_after_w <= r.obj_before_w + 1e-9);
    CHECK(r.obj_after_s <= r.obj_after_w + 1e-9);
  }
}

TEST_CASE("returned ensemble size indexes the minimal validation error") {
  auto b = make_bench(4, 14);
  const TrainConfig cfg = small_config();
  auto [ens, trace] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  REQUIRE(!trace.records.empty());
  double min_err = trace.records.front().val_er;
  for (const auto& r : trace.records) min_err = std::min(min_err, r.val_er);
  CHECK(trace.records[trace.best_iter - 1].val_er == min_err);
  CHECK(ens.size() == trace.best_iter);
}

TEST_CASE("boosting-only matches full training when selection is saturated") {
  auto b = make_bench(5);
  TrainConfig cfg = small_config();
  cfg.max_iters_outer = 3;
  cfg.t_es = 100;
  // a pace so tolerant every sample keeps weight 1, with annealing frozen
  cfg.pace.mode = PaceMode::geometric;
  cfg.pace.lambda = 1e9;
  cfg.pace.zeta = 1e10;  // easy threshold ~ lambda
  cfg.pace.lambda_max = 1e9;
  auto [ens_a, trace_a] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  auto [ens_b, trace_b] =
      train_boosting_only(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  REQUIRE(!trace_a.records.empty());
  REQUIRE(!trace_b.records.empty());
  CHECK(trace_a.records[0].objective == doctest::Approx(trace_b.records[0].objective));
  CHECK(trace_a.records[0].val_er == trace_b.records[0].val_er);
  CHECK(trace_a.records[0].selected == trace_b.records[0].selected);
}

TEST_CASE("evaluate") {
  auto b = make_bench(6);

  SUBCASE("empty test set is rejected") {
    Dataset empty;
    empty.features.resize(0, b.data.test.feature_dim());
    CHECK_THROWS_AS(
        evaluate(Ensemble{{}, Vector{}}, empty, b.data.embeddings, b.delta, b.data.split.unseen),
        std::invalid_argument);
  }

  SUBCASE("empty ensemble on a balanced binary unseen set errs exactly half") {
    SyntheticSpec spec;
    spec.classes = 4;
    spec.seen = 2;
    spec.embed_dim = 3;
    spec.feature_dim = 3;
    spec.samples_per_class = 10;
    const auto data = generate_synthetic(spec, 7);
    const auto delta = cosine_divergence(data.embeddings);
    Ensemble ens;
    ens.weights.resize(0);
    const auto report = evaluate(ens, data.test, data.embeddings, delta, data.split.unseen);
    CHECK(report.error_rate == 0.5);  // constant prediction of class 3
    CHECK(report.per_class.at(3) == 1.0);
    CHECK(report.per_class.at(4) == 0.0);
  }

  SUBCASE("an ensemble that predicts the truth gets zero error and zero mean delta") {
    // train a strong model on easy data and check the report fields agree
    // with a hand count
    auto easy = make_bench(8, 20);
    TrainConfig cfg = small_config();
    auto [ens, trace] =
        train(easy.data.train, easy.data.embeddings, easy.data.split, easy.delta, cfg);
    const auto report =
        evaluate(ens, easy.data.test, easy.data.embeddings, easy.delta, easy.data.split.unseen);
    CHECK(report.error_rate >= 0.0);
    CHECK(report.error_rate <= 1.0);
    CHECK(report.mean_delta >= 0.0);
    CHECK(report.mean_delta <= 1.0);
    int wrong = 0;
    for (int i = 0; i < easy.data.test.n_samples(); ++i) {
      const Vector x = easy.data.test.features.row(i).transpose();
      if (predict(ens, x, easy.data.embeddings, easy.data.split.unseen) !=
          easy.data.test.labels[i])
        ++wrong;
    }
    CHECK(report.error_rate ==
          doctest::Approx(static_cast<double>(wrong) / easy.data.test.n_samples()));
  }
}

TEST_CASE("sweep") {
  auto b = make_bench(9);
  TrainConfig cfg = small_config();
  cfg.max_iters_outer = 6;

  SUBCASE("one-element grid equals a single train+evaluate") {
    const auto rows = sweep_beta(b.data.train, b.data.test, b.data.embeddings, b.data.split,
                                 b.delta, cfg, {cfg.beta_over_n});
    REQUIRE(rows.size() == 1);
    auto [ens, trace] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
    const auto report =
        evaluate(ens, b.data.test, b.data.embeddings, b.delta, b.data.split.unseen);
    CHECK(rows[0].test_er == report.error_rate);
    CHECK(rows[0].mean_delta == report.mean_delta);
  }

  SUBCASE("beta 0 row equals an SCR-free run") {
    const auto rows = sweep_beta(b.data.train, b.data.test, b.data.embeddings, b.data.split,
                                 b.delta, cfg, {0.0, 0.1});
    REQUIRE(rows.size() == 2);
    TrainConfig zero = cfg;
    zero.beta_over_n = 0.0;
    auto [ens, trace] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, zero);
    const auto report =
        evaluate(ens, b.data.test, b.data.embeddings, b.delta, b.data.split.unseen);
    CHECK(rows[0].beta_over_n == 0.0);
    CHECK(rows[0].test_er == report.error_rate);
  }

  SUBCASE("empty grid rejected") {
    CHECK_THROWS_AS(sweep_beta(b.data.train, b.data.test, b.data.embeddings, b.data.split,
                               b.delta, cfg, {}),
                    std::invalid_argument);
  }
}

TEST_CASE("trace csv has the pinned header and one row per iteration") {
  auto b = make_bench(10);
  TrainConfig cfg = small_config();
  cfg.max_iters_outer = 5;
  cfg.t_es = 100;
  auto [ens, trace] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  const auto path = (fs::temp_directory_path() / "bzscr_trace_test.csv").string();
  write_trace_csv(trace, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,objective,train_er,val_er,mean_cov,selected,violation,lambda");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(trace.records.size()));
  fs::remove(path);
}

TEST_CASE("class-level holdout trains without the held-out classes") {
  auto b = make_bench(11, 14, 10, 6, 6);
  TrainConfig cfg = small_config();
  cfg.val_mode = ValMode::classes;
  cfg.val_fraction = 0.34;
  auto [ens, trace] = train(b.data.train, b.data.embeddings, b.data.split, b.delta, cfg);
  CHECK(!trace.records.empty());
}
