#include "coauthornet/walks.hpp"

#include <cmath>
#include <thread>
#include <unordered_map>

#include "coauthornet/errors.hpp"

namespace coauthornet {

void WalkConfig::validate() const {
  if (!(p > 0.0) || !(q > 0.0)) throw ConfigError("walk parameters p and q must be > 0");
  if (walk_length < 2) throw ConfigError("walk_length must be >= 2");
  if (window < 1) throw ConfigError("window must be >= 1");
}

namespace {

class SecondOrderWalker {
 public:
  SecondOrderWalker(const Graph& g, const WalkConfig& cfg) : g_(g), cfg_(cfg) {}

  Walk walk(NodeId start, Rng& rng) {
    Walk w{start};
    w.reserve(cfg_.walk_length);
    while (w.size() < cfg_.walk_length) {
      const NodeId cur = w.back();
      auto nb = g_.neighbors(cur);
      if (nb.empty()) break;
      if (w.size() == 1 || uniform_law()) {
        w.push_back(nb[rng.index(nb.size())]);
      } else {
        w.push_back(nb[table(w[w.size() - 2], cur).sample(rng)]);
      }
    }
    return w;
  }

 private:
  bool uniform_law() const { return cfg_.p == 1.0 && cfg_.q == 1.0; }

  // Alias table over neighbors(cur) given the previous node, built on first use.
  const AliasTable& table(NodeId prev, NodeId cur) {
    const std::uint64_t key = (static_cast<std::uint64_t>(prev) << 32) | cur;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto nb = g_.neighbors(cur);
    std::vector<double> weights(nb.size());
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] == prev) weights[i] = 1.0 / cfg_.p;
      else if (g_.has_edge(prev, nb[i])) weights[i] = 1.0;
      else weights[i] = 1.0 / cfg_.q;
    }
    return cache_.emplace(key, AliasTable(weights)).first->second;
  }

  const Graph& g_;
  const WalkConfig& cfg_;
  std::unordered_map<std::uint64_t, AliasTable> cache_;
};

}  // namespace

WalkCorpus generate_walks(const Graph& g, const WalkConfig& cfg, std::uint64_t seed,
                          unsigned threads) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  const std::size_t r = cfg.walks_per_node;
  WalkCorpus corpus(n * r);
  auto run = [&](std::size_t begin, std::size_t end) {
    SecondOrderWalker walker(g, cfg);
    for (std::size_t s = begin; s < end; ++s) {
      Rng rng(derive_seed(seed, "walk", s));
      for (std::size_t k = 0; k < r; ++k) {
        corpus[k * n + s] = walker.walk(static_cast<NodeId>(s), rng);
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * threads) {
    run(0, n);
    return corpus;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) workers.emplace_back(run, begin, end);
  }
  for (auto& w : workers) w.join();
  return corpus;
}

std::vector<NodePair> build_cooccurrence(const WalkCorpus& corpus, std::size_t window) {
  if (window < 1) throw ConfigError("window must be >= 1");
  std::vector<NodePair> pairs;
  for (const auto& walk : corpus) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      const std::size_t lo = i >= window ? i - window : 0;
      const std::size_t hi = std::min(walk.size() - 1, i + window);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) pairs.emplace_back(walk[i], walk[j]);
      }
    }
  }
  return pairs;
}

UnigramSampler::UnigramSampler(const WalkCorpus& corpus, std::size_t num_nodes, double power) {
  std::vector<double> counts(num_nodes, 0.0);
  for (const auto& walk : corpus) {
    for (NodeId v : walk) counts[v] += 1.0;
  }
  *this = UnigramSampler(counts, power);
}

UnigramSampler::UnigramSampler(std::span<const double> counts, double power)
    : probs_(counts.size()) {
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs_[i] = counts[i] > 0.0 ? std::pow(counts[i], power) : 0.0;
    total += probs_[i];
  }
  if (total <= 0.0) throw ConfigError("negative sampler needs at least one occurring node");
  for (double& p : probs_) p /= total;
  table_ = AliasTable(probs_);
}

}  // namespace coauthornet
