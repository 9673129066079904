#pragma once

#include <optional>
#include <string>

#include "bzscr/types.hpp"

namespace bzscr {

// On-disk layout under a dataset root:
//   train/features.csv  train/labels.csv
//   test/features.csv   test/labels.csv    (optional)
//   embeddings.csv  split.json  delta.csv (optional)  spath.csv (optional)
// Labels and split entries are 0-based on disk; the in-memory API is 1-based.

struct SplitFile {
  ClassSplit split;
  double val_fraction = 0.2;
  std::string val_mode = "samples";
};

struct ProblemData {
  Dataset train;
  std::optional<Dataset> test;
  LabelEmbeddings embeddings;
  SplitFile split;
  std::optional<DivergenceMatrix> delta;
  std::optional<IntMatrix> path_lengths;
};

Matrix load_matrix_csv(const std::string& path);
void save_matrix_csv(const Matrix& mat, const std::string& path);

std::vector<int> load_labels_csv(const std::string& path, int class_count);
void save_labels_csv(const std::vector<int>& labels, const std::string& path);

SplitFile load_split_json(const std::string& path, int class_count);
void save_split_json(const SplitFile& split, const std::string& path);

Dataset load_dataset(const std::string& dir, int class_count);
void save_dataset(const Dataset& data, const std::string& dir);

ProblemData load_problem(const std::string& root);
void save_problem(const ProblemData& data, const std::string& root);

}  // namespace bzscr
