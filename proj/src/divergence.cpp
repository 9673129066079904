#include "bzscr/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace bzscr {

DivergenceMatrix cosine_divergence(const LabelEmbeddings& embeddings) {
  embeddings.validate();
  const int c = embeddings.class_count();

  Matrix cosines(c, c);
  double min_cos = 1.0;
  for (int i = 0; i < c; ++i) {
    cosines(i, i) = 1.0;
    for (int j = i + 1; j < c; ++j) {
      double cs = embeddings.phi.row(i).dot(embeddings.phi.row(j)) /
                  (embeddings.phi.row(i).norm() * embeddings.phi.row(j).norm());
      cs = std::clamp(cs, -1.0, 1.0);
      cosines(i, j) = cosines(j, i) = cs;
      min_cos = std::min(min_cos, cs);
    }
  }
  const double denom = 1.0 - min_cos;
  if (denom < 1e-12)
    throw std::invalid_argument(
        "cosine_divergence: all embeddings pairwise identical, normalizer is 0");

  DivergenceMatrix out;
  out.delta.resize(c, c);
  for (int i = 0; i < c; ++i) {
    out.delta(i, i) = 0.0;
    for (int j = i + 1; j < c; ++j) {
      double v = std::clamp((1.0 - cosines(i, j)) / denom, 0.0, 1.0);
      out.delta(i, j) = out.delta(j, i) = v;
    }
  }
  return out;
}

DivergenceMatrix path_divergence(const IntMatrix& path_lengths) {
  const int c = static_cast<int>(path_lengths.rows());
  if (path_lengths.cols() != c)
    throw std::invalid_argument("path_divergence: matrix must be square");
  for (int i = 0; i < c; ++i) {
    if (path_lengths(i, i) != 0)
      throw std::invalid_argument("path_divergence: nonzero diagonal at row " + std::to_string(i));
    for (int j = 0; j < c; ++j) {
      if (path_lengths(i, j) < 0)
        throw std::invalid_argument("path_divergence: negative entry at row " + std::to_string(i) +
                                    " col " + std::to_string(j));
      if (path_lengths(i, j) != path_lengths(j, i))
        throw std::invalid_argument("path_divergence: asymmetric at row " + std::to_string(i) +
                                    " col " + std::to_string(j));
    }
  }

  DivergenceMatrix out;
  out.delta.resize(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      out.delta(i, j) = 1.0 - 1.0 / (path_lengths(i, j) + 1.0);
  return out;
}

}  // namespace bzscr
