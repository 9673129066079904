#include "bzscr/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace bzscr {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load: missing or unreadable file " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save: cannot open " + path);
  return out;
}

std::vector<double> parse_row(const std::string& line, const std::string& path, int row) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(cell, &pos));
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::runtime_error("load: bad numeric value '" + cell + "' in " + path + " row " +
                               std::to_string(row));
    }
  }
  return values;
}

}  // namespace

Matrix load_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line, path, row));
    if (rows.back().size() != rows.front().size())
      throw std::runtime_error("load: dimension mismatch in " + path + " row " +
                               std::to_string(row) + ": expected " +
                               std::to_string(rows.front().size()) + " columns, got " +
                               std::to_string(rows.back().size()));
    ++row;
  }
  if (rows.empty()) throw std::runtime_error("load: empty matrix file " + path);
  Matrix mat(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) {
      if (!std::isfinite(rows[i][j]))
        throw std::runtime_error("load: non-finite value in " + path + " row " +
                                 std::to_string(i));
      mat(i, j) = rows[i][j];
    }
  return mat;
}

void save_matrix_csv(const Matrix& mat, const std::string& path) {
  auto out = open_out(path);
  char buf[64];
  for (int i = 0; i < mat.rows(); ++i) {
    for (int j = 0; j < mat.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", mat(i, j));
      out << buf << (j + 1 < mat.cols() ? "," : "");
    }
    out << "\n";
  }
}

std::vector<int> load_labels_csv(const std::string& path, int class_count) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int value = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw std::runtime_error("load: bad label '" + line + "' in " + path + " row " +
                               std::to_string(row));
    if (value < 0 || value >= class_count)
      throw std::runtime_error("load: label out of range 0.." + std::to_string(class_count - 1) +
                               " in " + path + " row " + std::to_string(row));
    labels.push_back(value + 1);  // 0-based on disk, 1-based in memory
    ++row;
  }
  if (labels.empty()) throw std::runtime_error("load: empty label file " + path);
  return labels;
}

void save_labels_csv(const std::vector<int>& labels, const std::string& path) {
  auto out = open_out(path);
  for (int y : labels) out << (y - 1) << "\n";
}

SplitFile load_split_json(const std::string& path, int class_count) {
  auto in = open_in(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error("load: bad JSON in " + path + ": " + e.what());
  }
  SplitFile out;
  for (int c : doc.at("seen").get<std::vector<int>>()) out.split.seen.push_back(c + 1);
  for (int c : doc.at("unseen").get<std::vector<int>>()) out.split.unseen.push_back(c + 1);
  std::sort(out.split.seen.begin(), out.split.seen.end());
  std::sort(out.split.unseen.begin(), out.split.unseen.end());
  if (doc.contains("val_fraction")) out.val_fraction = doc["val_fraction"].get<double>();
  if (doc.contains("val_mode")) out.val_mode = doc["val_mode"].get<std::string>();
  if (out.val_mode != "samples" && out.val_mode != "classes")
    throw std::runtime_error("load: val_mode in " + path + " must be 'samples' or 'classes'");
  out.split.validate(class_count);
  return out;
}

void save_split_json(const SplitFile& split, const std::string& path) {
  nlohmann::json doc;
  std::vector<int> seen, unseen;
  for (int c : split.split.seen) seen.push_back(c - 1);
  for (int c : split.split.unseen) unseen.push_back(c - 1);
  doc["seen"] = seen;
  doc["unseen"] = unseen;
  doc["val_fraction"] = split.val_fraction;
  doc["val_mode"] = split.val_mode;
  open_out(path) << doc.dump(2) << "\n";
}

Dataset load_dataset(const std::string& dir, int class_count) {
  Dataset data;
  data.features = load_matrix_csv(dir + "/features.csv");
  data.labels = load_labels_csv(dir + "/labels.csv", class_count);
  data.validate(class_count);
  return data;
}

void save_dataset(const Dataset& data, const std::string& dir) {
  fs::create_directories(dir);
  save_matrix_csv(data.features, dir + "/features.csv");
  save_labels_csv(data.labels, dir + "/labels.csv");
}

ProblemData load_problem(const std::string& root) {
  ProblemData out;
  out.embeddings.phi = load_matrix_csv(root + "/embeddings.csv");
  out.embeddings.validate();
  const int c = out.embeddings.class_count();
  out.split = load_split_json(root + "/split.json", c);
  out.train = load_dataset(root + "/train", c);
  if (fs::exists(root + "/test/features.csv")) out.test = load_dataset(root + "/test", c);
  if (fs::exists(root + "/delta.csv")) {
    DivergenceMatrix d;
    d.delta = load_matrix_csv(root + "/delta.csv");
    if (d.class_count() != c)
      throw std::runtime_error("load: delta.csv dimension " + std::to_string(d.class_count()) +
                               " does not match " + std::to_string(c) + " classes");
    try {
      d.validate();
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("load: delta.csv: ") + e.what());
    }
    out.delta = std::move(d);
  }
  if (fs::exists(root + "/spath.csv")) {
    const Matrix raw = load_matrix_csv(root + "/spath.csv");
    IntMatrix p(raw.rows(), raw.cols());
    for (int i = 0; i < raw.rows(); ++i)
      for (int j = 0; j < raw.cols(); ++j) {
        if (raw(i, j) != std::floor(raw(i, j)))
          throw std::runtime_error("load: spath.csv has a non-integer entry at row " +
                                   std::to_string(i));
        p(i, j) = static_cast<int>(raw(i, j));
      }
    out.path_lengths = std::move(p);
  }
  return out;
}

void save_problem(const ProblemData& data, const std::string& root) {
  fs::create_directories(root);
  save_matrix_csv(data.embeddings.phi, root + "/embeddings.csv");
  save_split_json(data.split, root + "/split.json");
  save_dataset(data.train, root + "/train");
  if (data.test) save_dataset(*data.test, root + "/test");
  if (data.delta) save_matrix_csv(data.delta->delta, root + "/delta.csv");
  if (data.path_lengths) {
    auto out = open_out(root + "/spath.csv");
    for (int i = 0; i < data.path_lengths->rows(); ++i) {
      for (int j = 0; j < data.path_lengths->cols(); ++j)
        out << (*data.path_lengths)(i, j) << (j + 1 < data.path_lengths->cols() ? "," : "");
      out << "\n";
    }
  }
}

}  // namespace bzscr
