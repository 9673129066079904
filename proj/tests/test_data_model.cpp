#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "bzscr/divergence.hpp"
#include "bzscr/io.hpp"
#include "bzscr/synthetic.hpp"

using namespace bzscr;
namespace fs = std::filesystem;

namespace {

LabelEmbeddings random_embeddings(int c, int d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  LabelEmbeddings e;
  e.phi.resize(c, d);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < d; ++j) e.phi(i, j) = gauss(rng);
  return e;
}

// Entrywise re-computation of the normalized cosine divergence.
Matrix brute_force_cosine(const Matrix& phi) {
  const int c = static_cast<int>(phi.rows());
  double min_cos = 1.0;
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) {
      if (i == j) continue;
      min_cos = std::min(min_cos, phi.row(i).dot(phi.row(j)) / (phi.row(i).norm() * phi.row(j).norm()));
    }
  Matrix out(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) {
      const double cs = phi.row(i).dot(phi.row(j)) / (phi.row(i).norm() * phi.row(j).norm());
      out(i, j) = (1.0 - cs) / (1.0 - min_cos);
    }
  return out;
}

// Nearest unseen embedding after mapping features back through the pseudo-
// inverse of the generator's linear map (recovered by least squares on the
// noiseless class means).
double nearest_embedding_test_error(const SyntheticData& data) {
  // recover A from train samples: A ~ argmin ||X - Phi_y A'||; then classify
  // test x by the unseen class whose A*phi is closest.
  const int n = data.train.n_samples();
  Matrix phi_rows(n, data.embeddings.embed_dim());
  for (int i = 0; i < n; ++i) phi_rows.row(i) = data.embeddings.row(data.train.labels[i]);
  const Matrix map = (phi_rows.transpose() * phi_rows)
                         .ldlt()
                         .solve(phi_rows.transpose() * data.train.features)
                         .transpose();
  int wrong = 0;
  for (int i = 0; i < data.test.n_samples(); ++i) {
    int best = -1;
    double best_dist = 0.0;
    for (int y : data.split.unseen) {
      const double dist =
          (data.test.features.row(i).transpose() - map * data.embeddings.row(y).transpose())
              .norm();
      if (best < 0 || dist < best_dist) {
        best = y;
        best_dist = dist;
      }
    }
    if (best != data.test.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / data.test.n_samples();
}

}  // namespace

TEST_CASE("cosine divergence: hand-worked three-class example") {
  LabelEmbeddings e;
  e.phi.resize(3, 2);
  e.phi << 1, 0, 0, 1, -1, 0;
  const auto d = cosine_divergence(e);
  CHECK(d.at(1, 1) == 0.0);
  CHECK(d.at(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.at(1, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.at(2, 3) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cosine divergence: identical embeddings give zero entry") {
  LabelEmbeddings e;
  e.phi.resize(3, 2);
  e.phi << 2, 1, 2, 1, -1, 3;  // classes 1 and 2 coincide in direction
  const auto d = cosine_divergence(e);
  CHECK(d.at(1, 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cosine divergence matches brute-force oracle on random embeddings") {
  const auto e = random_embeddings(10, 6, 42);
  const auto d = cosine_divergence(e);
  const Matrix oracle = brute_force_cosine(e.phi);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      CHECK(d.delta(i, j) == doctest::Approx(oracle(i, j)).epsilon(1e-12));
}

TEST_CASE("cosine divergence structural invariants") {
  const auto e = random_embeddings(8, 5, 7);
  const auto d = cosine_divergence(e);
  CHECK_NOTHROW(d.validate());
  CHECK(d.delta.maxCoeff() == 1.0);

  // invariant under uniform positive scaling of the rows
  LabelEmbeddings scaled = e;
  scaled.phi *= 3.7;
  const auto d2 = cosine_divergence(scaled);
  CHECK((d.delta - d2.delta).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("cosine divergence rejects pairwise-identical embeddings") {
  LabelEmbeddings e;
  e.phi.resize(3, 2);
  e.phi << 1, 1, 2, 2, 3, 3;
  CHECK_THROWS_AS(cosine_divergence(e), std::invalid_argument);
}

TEST_CASE("path divergence: fixed points and validation") {
  IntMatrix p(3, 3);
  p << 0, 1, 9, 1, 0, 3, 9, 3, 0;
  const auto d = path_divergence(p);
  CHECK(d.at(1, 1) == 0.0);
  CHECK(d.at(1, 2) == doctest::Approx(0.5));
  CHECK(d.at(1, 3) == doctest::Approx(0.9));
  CHECK(d.at(2, 3) == doctest::Approx(0.75));
  CHECK_NOTHROW(d.validate());

  IntMatrix neg = p;
  neg(0, 1) = neg(1, 0) = -1;
  CHECK_THROWS_AS(path_divergence(neg), std::invalid_argument);
  IntMatrix asym = p;
  asym(0, 1) = 5;
  CHECK_THROWS_AS(path_divergence(asym), std::invalid_argument);
}

TEST_CASE("path divergence is monotone in path length and below 1") {
  double prev = -1.0;
  for (int len = 0; len < 50; ++len) {
    IntMatrix p(2, 2);
    p << 0, len, len, 0;
    const double v = path_divergence(p).at(1, 2);
    CHECK(v > prev);
    CHECK(v < 1.0);
    prev = v;
  }
}

TEST_CASE("synthetic generator is deterministic") {
  SyntheticSpec spec;
  spec.classes = 8;
  spec.seen = 5;
  spec.embed_dim = 4;
  spec.feature_dim = 6;
  spec.samples_per_class = 10;
  const auto a = generate_synthetic(spec, 99);
  const auto b = generate_synthetic(spec, 99);
  CHECK(a.train.features == b.train.features);
  CHECK(a.test.features == b.test.features);
  CHECK(a.embeddings.phi == b.embeddings.phi);
  CHECK(a.train.labels == b.train.labels);
}

TEST_CASE("synthetic generator: noiseless data is separable by nearest embedding") {
  SyntheticSpec spec;
  spec.classes = 10;
  spec.seen = 6;
  spec.embed_dim = 4;  // seen embeddings must span the embedding space
  spec.feature_dim = 8;
  spec.samples_per_class = 20;
  spec.noise_scale = 0.0;
  const auto data = generate_synthetic(spec, 3);
  CHECK(nearest_embedding_test_error(data) == 0.0);
}

TEST_CASE("synthetic generator: more noise, more error") {
  SyntheticSpec spec;
  spec.classes = 6;
  spec.seen = 3;
  spec.embed_dim = 2;
  spec.feature_dim = 2;
  spec.samples_per_class = 40;
  spec.noise_scale = 0.1;
  const double low = nearest_embedding_test_error(generate_synthetic(spec, 11));
  spec.noise_scale = 10.0;
  const double high = nearest_embedding_test_error(generate_synthetic(spec, 11));
  CHECK(high > low);
}

TEST_CASE("synthetic generator rejects bad specs") {
  SyntheticSpec spec;
  spec.classes = 5;
  spec.seen = 5;
  CHECK_THROWS_AS(generate_synthetic(spec, 0), std::invalid_argument);
  spec.seen = 1;
  CHECK_THROWS_AS(generate_synthetic(spec, 0), std::invalid_argument);
}

TEST_CASE("dataset save/load round-trip") {
  SyntheticSpec spec;
  spec.classes = 6;
  spec.seen = 4;
  spec.embed_dim = 3;
  spec.feature_dim = 5;
  spec.samples_per_class = 7;
  const auto data = generate_synthetic(spec, 17);

  const auto dir = fs::temp_directory_path() / "bzscr_io_test";
  fs::remove_all(dir);
  ProblemData problem;
  problem.train = data.train;
  problem.test = data.test;
  problem.embeddings = data.embeddings;
  problem.split.split = data.split;
  problem.delta = cosine_divergence(data.embeddings);
  save_problem(problem, dir.string());

  const auto loaded = load_problem(dir.string());
  CHECK(loaded.train.features == data.train.features);
  CHECK(loaded.train.labels == data.train.labels);
  REQUIRE(loaded.test.has_value());
  CHECK(loaded.test->features == data.test.features);
  CHECK(loaded.embeddings.phi == data.embeddings.phi);
  CHECK(loaded.split.split.seen == data.split.seen);
  CHECK(loaded.split.split.unseen == data.split.unseen);
  REQUIRE(loaded.delta.has_value());
  CHECK(loaded.delta->delta == problem.delta->delta);
  fs::remove_all(dir);
}

TEST_CASE("loaders reject malformed inputs with file and row context") {
  const auto dir = fs::temp_directory_path() / "bzscr_io_bad";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::ofstream f(dir / "embeddings.csv");
    f << "1.0,2.0\n3.0\n";  // ragged row
  }
  try {
    load_matrix_csv((dir / "embeddings.csv").string());
    FAIL("expected dimension mismatch");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }

  {
    std::ofstream f(dir / "delta.csv");
    f << "0,0.5\n0.5,1.5\n";  // entry out of range (and nonzero diagonal)
  }
  DivergenceMatrix d;
  d.delta = load_matrix_csv((dir / "delta.csv").string());
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);

  {
    std::ofstream f(dir / "labels.csv");
    f << "0\n7\n";
  }
  CHECK_THROWS_AS(load_labels_csv((dir / "labels.csv").string(), 5), std::runtime_error);

  CHECK_THROWS_AS(load_matrix_csv((dir / "missing.csv").string()), std::runtime_error);
  fs::remove_all(dir);
}
