#include "coauthornet/embedding_io.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coauthornet/errors.hpp"

namespace coauthornet {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> labels, Matrix values)
    : dim_(values.cols()) {
  if (labels.size() != values.rows()) {
    throw DimensionError("embedding labels (" + std::to_string(labels.size()) +
                         ") do not match rows (" + std::to_string(values.rows()) + ")");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!add(labels[i], values.row(i))) {
      throw ConsistencyError("duplicate embedding label '" + labels[i] + "'");
    }
  }
}

bool EmbeddingMatrix::add(const std::string& token, std::span<const double> values) {
  if (values.size() != dim_) {
    throw DimensionError("embedding row of size " + std::to_string(values.size()) +
                         " in table of dimension " + std::to_string(dim_));
  }
  auto [it, inserted] = index_.try_emplace(token, labels_.size());
  if (!inserted) return false;
  labels_.push_back(token);
  data_.insert(data_.end(), values.begin(), values.end());
  return true;
}

std::optional<std::size_t> EmbeddingMatrix::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Matrix EmbeddingMatrix::to_matrix() const { return Matrix(size(), dim_, data_); }

void write_embeddings(std::ostream& out, const EmbeddingMatrix& e) {
  out << e.size() << ' ' << e.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < e.size(); ++i) {
    out << e.label(i);
    for (double v : e.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

void write_embeddings_file(const std::string& path, const EmbeddingMatrix& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embeddings to " + path);
  write_embeddings(out, e);
}

EmbeddingMatrix read_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError("embedding file is empty (line 1)");
  std::istringstream header(line);
  std::size_t n = 0, dim = 0;
  if (!(header >> n >> dim)) throw FormatError("line 1: expected header `N D`");

  EmbeddingMatrix table(dim);
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    values.clear();
    std::string item;
    while (fields >> item) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": bad number '" + item + "'");
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " values, found " +
                        std::to_string(values.size()));
    }
    ++rows;
    if (!table.add(token, values)) {
      spdlog::warn("embedding table: duplicate token '{}' at line {} ignored", token, line_no);
    }
  }
  if (rows != n) {
    throw FormatError("header declares " + std::to_string(n) + " rows but file has " +
                      std::to_string(rows));
  }
  return table;
}

EmbeddingMatrix read_embeddings_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings " + path);
  return read_embeddings(in);
}

EmbeddingMatrix load_pretrained_vectors(const std::string& table_path) {
  std::ifstream in(table_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read pretrained vector table " + table_path);
  return read_embeddings(in);
}

}  // namespace coauthornet
