#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "coauthornet/embedding_io.hpp"
#include "coauthornet/matrix.hpp"

namespace coauthornet {

enum class VectorizerMode { kHashedNgrams, kPretrainedTable };

struct VectorizerConfig {
  VectorizerMode mode = VectorizerMode::kHashedNgrams;
  std::size_t dim = 100;
  std::size_t ngram_min = 3;
  std::size_t ngram_max = 5;
  std::string table_path;  // pretrained mode only
};

// Hashing scheme for character n-grams: h = FNV-1a-64 over the n-gram's UTF-8
// bytes; slot = (h >> 1) mod dim; sign = -1 if (h & 1) else +1.
struct NgramSlot {
  std::size_t slot;
  double sign;
};
NgramSlot hash_ngram(std::string_view ngram, std::size_t dim);

// Abstract -> unit-length vector (or the zero vector).
//
// Hashed mode lowercases ASCII letters, enumerates every run of ngram_min..
// ngram_max consecutive code points, accumulates sign-hashed counts, then
// L2-normalizes. Pretrained mode averages the table vectors of the lowercased
// whitespace tokens present in the table, then L2-normalizes.
class Vectorizer {
 public:
  // Throws ConfigError on invalid config or an unreadable table.
  explicit Vectorizer(VectorizerConfig config);

  const VectorizerConfig& config() const { return config_; }
  std::size_t dim() const { return config_.dim; }
  Vector vectorize(std::string_view text) const;

 private:
  VectorizerConfig config_;
  std::shared_ptr<const EmbeddingMatrix> table_;
};

Vector vectorize_abstract(std::string_view text, const VectorizerConfig& config);

// Code-point boundaries of a UTF-8 string (invalid bytes count as one point).
std::vector<std::size_t> utf8_boundaries(std::string_view s);

std::string ascii_lower(std::string_view s);

}  // namespace coauthornet
