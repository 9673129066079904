#include "bzscr/types.hpp"

#include <algorithm>
#include <cmath>

namespace bzscr {

void Dataset::validate(int class_count) const {
  if (n_samples() < 1 || feature_dim() < 1)
    throw std::invalid_argument("dataset: need N >= 1 and m >= 1");
  if (static_cast<int>(labels.size()) != n_samples())
    throw std::invalid_argument("dataset: label count " + std::to_string(labels.size()) +
                                " does not match sample count " + std::to_string(n_samples()));
  for (int i = 0; i < n_samples(); ++i) {
    if (labels[i] < 1 || labels[i] > class_count)
      throw std::invalid_argument("dataset: label out of range 1.." +
                                  std::to_string(class_count) + " at row " + std::to_string(i));
  }
  if (!features.allFinite())
    throw std::invalid_argument("dataset: non-finite feature value");
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Dataset out;
  out.features.resize(rows.size(), features.cols());
  out.labels.reserve(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    out.features.row(k) = features.row(rows[k]);
    out.labels.push_back(labels[rows[k]]);
  }
  return out;
}

void LabelEmbeddings::validate() const {
  if (class_count() < 2)
    throw std::invalid_argument("embeddings: need at least 2 classes");
  if (!phi.allFinite())
    throw std::invalid_argument("embeddings: non-finite value");
  for (int c = 0; c < class_count(); ++c) {
    if (phi.row(c).norm() == 0.0)
      throw std::invalid_argument("embeddings: all-zero row " + std::to_string(c));
  }
}

void ClassSplit::validate(int class_count) const {
  if (seen.empty() || unseen.empty())
    throw std::invalid_argument("split: seen and unseen must both be nonempty");
  std::vector<bool> hit(class_count + 1, false);
  auto mark = [&](const std::vector<int>& v, const char* name) {
    for (int c : v) {
      if (c < 1 || c > class_count)
        throw std::invalid_argument(std::string("split: ") + name + " class out of range: " +
                                    std::to_string(c));
      if (hit[c])
        throw std::invalid_argument("split: class listed twice: " + std::to_string(c));
      hit[c] = true;
    }
  };
  mark(seen, "seen");
  mark(unseen, "unseen");
  for (int c = 1; c <= class_count; ++c)
    if (!hit[c])
      throw std::invalid_argument("split: class missing from seen/unseen: " + std::to_string(c));
}

void DivergenceMatrix::validate() const {
  if (delta.rows() != delta.cols())
    throw std::invalid_argument("divergence: matrix must be square");
  for (int i = 0; i < delta.rows(); ++i) {
    for (int j = 0; j < delta.cols(); ++j) {
      double v = delta(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("divergence: entry out of [0,1] at row " + std::to_string(i) +
                                    " col " + std::to_string(j));
      if (std::abs(v - delta(j, i)) > 1e-12)
        throw std::invalid_argument("divergence: asymmetric at row " + std::to_string(i) + " col " +
                                    std::to_string(j));
    }
    if (delta(i, i) != 0.0)
      throw std::invalid_argument("divergence: nonzero diagonal at row " + std::to_string(i));
  }
}

}  // namespace bzscr
