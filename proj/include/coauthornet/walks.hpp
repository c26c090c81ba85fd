#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "coauthornet/graph.hpp"
#include "coauthornet/random.hpp"

namespace coauthornet {

struct WalkConfig {
  double p = 1.0;                 // return parameter
  double q = 1.0;                 // in-out parameter
  std::size_t walk_length = 80;   // nodes per walk, including the start
  std::size_t walks_per_node = 10;
  std::size_t window = 10;

  // Throws ConfigError unless p, q > 0, walk_length >= 2, window >= 1.
  void validate() const;
};

using Walk = std::vector<NodeId>;
using WalkCorpus = std::vector<Walk>;

// Second-order (node2vec) walks. From edge (prev, cur) a neighbor x of cur has
// weight 1/p if x == prev, 1 if prev -> x is an edge, 1/q otherwise; the first
// step is uniform. Walks stop early at nodes without out-neighbors.
//
// The corpus is pass-major: walk k of start node s sits at k * n + s. Each
// start node draws from its own stream derive_seed(seed, "walk", s), so the
// output does not depend on `threads`.
WalkCorpus generate_walks(const Graph& g, const WalkConfig& cfg, std::uint64_t seed,
                          unsigned threads = 1);

using NodePair = std::pair<NodeId, NodeId>;

// (w_i, w_j) for every position i and every j != i with |i - j| <= window.
std::vector<NodePair> build_cooccurrence(const WalkCorpus& corpus, std::size_t window);

// Negative-sampling law: corpus occurrence counts raised to `power`.
class UnigramSampler {
 public:
  UnigramSampler() = default;
  UnigramSampler(const WalkCorpus& corpus, std::size_t num_nodes, double power = 0.75);
  UnigramSampler(std::span<const double> counts, double power = 0.75);

  NodeId sample(Rng& rng) const { return static_cast<NodeId>(table_.sample(rng)); }
  double probability(NodeId v) const { return probs_[v]; }

 private:
  AliasTable table_;
  std::vector<double> probs_;
};

}  // namespace coauthornet
