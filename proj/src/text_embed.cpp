#include "coauthornet/text_embed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coauthornet/errors.hpp"
#include "coauthornet/random.hpp"

namespace coauthornet {

namespace {

void l2_normalize(Vector& v) {
  const double n = l2_norm(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

}  // namespace

NgramSlot hash_ngram(std::string_view ngram, std::size_t dim) {
  const std::uint64_t h = fnv1a64(ngram);
  return {static_cast<std::size_t>((h >> 1) % dim), (h & 1) ? -1.0 : 1.0};
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::size_t> utf8_boundaries(std::string_view s) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    out.push_back(i);
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) len = 4;
    else if (lead >= 0xE0) len = lead < 0xF0 ? 3 : 1;
    else if (lead >= 0xC0) len = 2;
    std::size_t j = 1;
    while (j < len && i + j < s.size() &&
           (static_cast<unsigned char>(s[i + j]) & 0xC0) == 0x80) {
      ++j;
    }
    i += j;
  }
  out.push_back(s.size());
  return out;
}

Vectorizer::Vectorizer(VectorizerConfig config) : config_(std::move(config)) {
  if (config_.dim == 0) throw ConfigError("vectorizer dim must be >= 1");
  if (config_.mode == VectorizerMode::kHashedNgrams) {
    if (config_.ngram_min == 0 || config_.ngram_min > config_.ngram_max) {
      throw ConfigError("vectorizer n-gram range must satisfy 1 <= min <= max");
    }
    return;
  }
  auto table = std::make_shared<EmbeddingMatrix>(load_pretrained_vectors(config_.table_path));
  if (table->dim() != config_.dim) {
    throw ConfigError("pretrained table " + config_.table_path + " has dimension " +
                      std::to_string(table->dim()) + ", expected " +
                      std::to_string(config_.dim));
  }
  table_ = std::move(table);
}

Vector Vectorizer::vectorize(std::string_view text) const {
  Vector out(config_.dim, 0.0);
  const std::string lowered = ascii_lower(text);
  if (config_.mode == VectorizerMode::kHashedNgrams) {
    const auto bounds = utf8_boundaries(lowered);
    const std::size_t points = bounds.size() - 1;
    for (std::size_t n = config_.ngram_min; n <= config_.ngram_max; ++n) {
      for (std::size_t start = 0; start + n <= points; ++start) {
        const std::string_view gram(lowered.data() + bounds[start],
                                    bounds[start + n] - bounds[start]);
        const auto [slot, sign] = hash_ngram(gram, config_.dim);
        out[slot] += sign;
      }
    }
  } else {
    std::istringstream tokens(lowered);
    std::string token;
    std::vector<std::size_t> rows;
    while (tokens >> token) {
      if (auto row = table_->find(token)) rows.push_back(*row);
    }
    // Summing in table order makes the result exactly independent of token order.
    std::sort(rows.begin(), rows.end());
    for (auto r : rows) axpy(1.0, table_->row(r), out);
    if (!rows.empty()) {
      for (double& v : out) v /= static_cast<double>(rows.size());
    }
  }
  l2_normalize(out);
  return out;
}

Vector vectorize_abstract(std::string_view text, const VectorizerConfig& config) {
  return Vectorizer(config).vectorize(text);
}

}  // namespace coauthornet
