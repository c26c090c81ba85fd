#include "coauthornet/random.hpp"

#include <numeric>

#include "coauthornet/errors.hpp"

namespace coauthornet {

AliasTable::AliasTable(std::span<const double> weights)
    : prob_(weights.size()), alias_(weights.size()) {
  const std::size_t n = weights.size();
  if (n == 0) return;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("alias table weight must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw ConfigError("alias table weights sum to zero");

  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (auto i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::sample(Rng& rng) const {
  const std::size_t column = rng.index(prob_.size());
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

double AliasTable::probability(std::size_t i) const {
  const double n = static_cast<double>(prob_.size());
  double p = prob_[i] / n;
  for (std::size_t j = 0; j < prob_.size(); ++j) {
    if (alias_[j] == i && j != i) p += (1.0 - prob_[j]) / n;
  }
  return p;
}

}  // namespace coauthornet
