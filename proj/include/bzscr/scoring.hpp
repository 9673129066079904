#pragma once

#include "bzscr/types.hpp"

namespace bzscr {

// Rank-one bilinear weak model h(x, y) = (x'u)(v'phi(y)) with unit u, v.
struct WeakModel {
  Vector u;  // length m
  Vector v;  // length d

  void validate() const;  // norms within 1e-10 of 1
};

struct Ensemble {
  std::vector<WeakModel> models;
  Vector weights;  // length K, elementwise >= 0

  int size() const { return static_cast<int>(models.size()); }
  void validate() const;
};

// Per-model score factors, reused across margin/objective/gradient paths.
// raw score of model j on (i, r) is sample_scores(i, j) * class_scores(r-1, j).
struct ScoreTable {
  Matrix sample_scores;  // N x K: x_i' u_j
  Matrix class_scores;   // C x K: v_j' phi(r)
};

struct MarginMatrix {
  Matrix rho;     // N x C: F(x_i,r) - F(x_i,y_i) + Delta(y_i,r)
  Matrix scores;  // N x C: raw F(x_i, r), cached for SCR and Q
};

double weak_score(const WeakModel& h, const Vector& x, int r, const LabelEmbeddings& embeddings);

double ensemble_score(const Ensemble& ens, const Vector& x, int r,
                      const LabelEmbeddings& embeddings);

ScoreTable make_score_table(const Ensemble& ens, const Dataset& data,
                            const LabelEmbeddings& embeddings);

// N x C matrix of raw scores F(x_i, r) under weights w.
Matrix raw_scores(const ScoreTable& table, const Vector& w);

MarginMatrix compute_margins(const Ensemble& ens, const Dataset& data,
                             const LabelEmbeddings& embeddings, const DivergenceMatrix& delta);

MarginMatrix margins_from_scores(const Matrix& scores, const std::vector<int>& labels,
                                 const DivergenceMatrix& delta);

// Argmax of F(x, r) over candidates; ties go to the smallest class index.
int predict(const Ensemble& ens, const Vector& x, const LabelEmbeddings& embeddings,
            const std::vector<int>& candidates);

void save_model(const Ensemble& ens, int feature_dim, int embed_dim, const std::string& path);
Ensemble load_model(const std::string& path, int* feature_dim = nullptr, int* embed_dim = nullptr);

}  // namespace bzscr
