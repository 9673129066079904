#include "bzscr/scoring.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace bzscr {

void WeakModel::validate() const {
  if (std::abs(u.norm() - 1.0) > 1e-10 || std::abs(v.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("weak model: u and v must be unit vectors");
}

void Ensemble::validate() const {
  if (weights.size() != size())
    throw std::invalid_argument("ensemble: weight count does not match model count");
  for (int j = 0; j < size(); ++j) {
    models[j].validate();
    if (weights(j) < 0.0)
      throw std::invalid_argument("ensemble: negative weight at index " + std::to_string(j));
  }
}

double weak_score(const WeakModel& h, const Vector& x, int r, const LabelEmbeddings& embeddings) {
  return x.dot(h.u) * embeddings.row(r).dot(h.v.transpose());
}

double ensemble_score(const Ensemble& ens, const Vector& x, int r,
                      const LabelEmbeddings& embeddings) {
  double f = 0.0;
  for (int j = 0; j < ens.size(); ++j) f += ens.weights(j) * weak_score(ens.models[j], x, r, embeddings);
  return f;
}

ScoreTable make_score_table(const Ensemble& ens, const Dataset& data,
                            const LabelEmbeddings& embeddings) {
  ScoreTable t;
  const int k = ens.size();
  t.sample_scores.resize(data.n_samples(), k);
  t.class_scores.resize(embeddings.class_count(), k);
  for (int j = 0; j < k; ++j) {
    t.sample_scores.col(j) = data.features * ens.models[j].u;
    t.class_scores.col(j) = embeddings.phi * ens.models[j].v;
  }
  return t;
}

Matrix raw_scores(const ScoreTable& table, const Vector& w) {
  if (w.size() != table.sample_scores.cols())
    throw std::invalid_argument("raw_scores: weight length does not match table");
  return table.sample_scores * w.asDiagonal() * table.class_scores.transpose();
}

MarginMatrix margins_from_scores(const Matrix& scores, const std::vector<int>& labels,
                                 const DivergenceMatrix& delta) {
  MarginMatrix m;
  m.scores = scores;
  m.rho.resize(scores.rows(), scores.cols());
  for (int i = 0; i < scores.rows(); ++i) {
    const int yi = labels[i];
    const double own = scores(i, yi - 1);
    for (int r = 1; r <= scores.cols(); ++r)
      m.rho(i, r - 1) = scores(i, r - 1) - own + delta.at(yi, r);
  }
  return m;
}

MarginMatrix compute_margins(const Ensemble& ens, const Dataset& data,
                             const LabelEmbeddings& embeddings, const DivergenceMatrix& delta) {
  Matrix scores;
  if (ens.size() == 0) {
    scores = Matrix::Zero(data.n_samples(), embeddings.class_count());
  } else {
    scores = raw_scores(make_score_table(ens, data, embeddings), ens.weights);
  }
  return margins_from_scores(scores, data.labels, delta);
}

int predict(const Ensemble& ens, const Vector& x, const LabelEmbeddings& embeddings,
            const std::vector<int>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("predict: candidate set is empty");
  int best = 0;
  double best_score = 0.0;
  for (int r : candidates) {
    const double f = ensemble_score(ens, x, r, embeddings);
    if (best == 0 || f > best_score || (f == best_score && r < best)) {
      best = r;
      best_score = f;
    }
  }
  return best;
}

void save_model(const Ensemble& ens, int feature_dim, int embed_dim, const std::string& path) {
  nlohmann::json doc;
  doc["feature_dim"] = feature_dim;
  doc["embed_dim"] = embed_dim;
  doc["weights"] = std::vector<double>(ens.weights.begin(), ens.weights.end());
  doc["models"] = nlohmann::json::array();
  for (const auto& h : ens.models) {
    doc["models"].push_back({{"u", std::vector<double>(h.u.begin(), h.u.end())},
                             {"v", std::vector<double>(h.v.begin(), h.v.end())}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << doc.dump(2) << "\n";
}

Ensemble load_model(const std::string& path, int* feature_dim, int* embed_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  nlohmann::json doc;
  in >> doc;

  Ensemble ens;
  const auto& weights = doc.at("weights");
  ens.weights.resize(weights.size());
  for (size_t j = 0; j < weights.size(); ++j) ens.weights(j) = weights[j].get<double>();
  for (const auto& item : doc.at("models")) {
    WeakModel h;
    const auto u = item.at("u").get<std::vector<double>>();
    const auto v = item.at("v").get<std::vector<double>>();
    h.u = Eigen::Map<const Vector>(u.data(), u.size());
    h.v = Eigen::Map<const Vector>(v.data(), v.size());
    ens.models.push_back(std::move(h));
  }
  if (feature_dim) *feature_dim = doc.at("feature_dim").get<int>();
  if (embed_dim) *embed_dim = doc.at("embed_dim").get<int>();
  ens.validate();
  return ens;
}

}  // namespace bzscr
