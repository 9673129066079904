#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace bzscr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;

// Class indices are 1..C throughout the API; files on disk are 0-based and
// the I/O layer converts.

struct Dataset {
  Matrix features;          // N x m
  std::vector<int> labels;  // length N, values in 1..C

  int n_samples() const { return static_cast<int>(features.rows()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }

  // Throws if any label falls outside 1..class_count, any feature is
  // non-finite, or the dataset is empty.
  void validate(int class_count) const;

  Dataset subset(const std::vector<int>& rows) const;
};

struct LabelEmbeddings {
  Matrix phi;  // C x d

  int class_count() const { return static_cast<int>(phi.rows()); }
  int embed_dim() const { return static_cast<int>(phi.cols()); }
  auto row(int y) const { return phi.row(y - 1); }

  void validate() const;  // C >= 2, finite, no all-zero row
};

struct ClassSplit {
  std::vector<int> seen;    // Y_S, ascending
  std::vector<int> unseen;  // Y_T, ascending

  void validate(int class_count) const;
};

struct DivergenceMatrix {
  Matrix delta;  // C x C, symmetric, zero diagonal, entries in [0,1]

  int class_count() const { return static_cast<int>(delta.rows()); }
  double at(int y1, int y2) const { return delta(y1 - 1, y2 - 1); }

  void validate() const;
};

}  // namespace bzscr
