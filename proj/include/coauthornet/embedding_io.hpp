#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coauthornet/matrix.hpp"

namespace coauthornet {

// Token-keyed dense vectors of a fixed dimension. Used for paper embeddings,
// author features, and pretrained token tables alike.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(std::size_t dim) : dim_(dim) {}
  // Throws DimensionError if labels.size() != values.rows().
  EmbeddingMatrix(std::vector<std::string> labels, Matrix values);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }

  // Returns false (and keeps the existing row) when the token is already present.
  bool add(const std::string& token, std::span<const double> values);

  std::optional<std::size_t> find(const std::string& token) const;
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  Matrix to_matrix() const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.dim_ == b.dim_ && a.labels_ == b.labels_ && a.data_ == b.data_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> labels_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Text format: header `N D`, then N lines `token v_1 ... v_D`. Values are
// written with 17 significant digits so a save/load cycle is exact.
void write_embeddings(std::ostream& out, const EmbeddingMatrix& e);
void write_embeddings_file(const std::string& path, const EmbeddingMatrix& e);

// Duplicate tokens keep their first row (warning logged). A row whose value
// count differs from D raises FormatError naming the line.
EmbeddingMatrix read_embeddings(std::istream& in);
EmbeddingMatrix read_embeddings_file(const std::string& path);

// Pretrained token table; unreadable files raise ConfigError.
EmbeddingMatrix load_pretrained_vectors(const std::string& table_path);

}  // namespace coauthornet
