#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coauthornet/matrix.hpp"
#include "coauthornet/random.hpp"

namespace coauthornet {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Immutable adjacency storage in CSR form. Neighbor lists are sorted and free
// of self-loops and duplicates; undirected graphs store both directions.
class Graph {
 public:
  Graph() = default;

  // Throws ConstructionError naming the first edge with an endpoint >= n.
  static Graph build(std::span<const Edge> edges, std::size_t n, bool directed);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  bool directed() const { return directed_; }
  // Undirected edges are counted once.
  std::size_t num_edges() const;

  // Throws BoundsError when v >= num_nodes().
  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }
  bool has_edge(NodeId u, NodeId v) const;

  // Canonical edge list: (u, v) with u < v for undirected graphs, ascending.
  std::vector<Edge> edges() const;

  // Undirected view of a directed graph (identity for undirected).
  Graph as_undirected() const;

  const std::optional<FeatureMatrix>& features() const { return features_; }
  // Throws DimensionError if rows != num_nodes().
  void set_features(FeatureMatrix x);

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  bool directed_ = false;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::optional<FeatureMatrix> features_;
};

// Fixed-size uniform neighbor sample with replacement. An isolated node
// samples itself k times.
std::vector<NodeId> sample_neighbors(const Graph& g, NodeId v, std::size_t k, Rng& rng);

// Bijection between external keys and dense NodeIds, assigned in insertion
// order.
template <typename Key>
class IdTable {
 public:
  NodeId intern(const Key& key) {
    auto [it, inserted] = index_.try_emplace(key, static_cast<NodeId>(keys_.size()));
    if (inserted) keys_.push_back(key);
    return it->second;
  }
  std::optional<NodeId> find(const Key& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const Key& key(NodeId id) const { return keys_.at(id); }
  const std::vector<Key>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::vector<Key> keys_;
  std::unordered_map<Key, NodeId> index_;
};

// Edge-list text: `src dst` per line, `#` comments. Returns raw integer pairs.
std::vector<std::pair<std::int64_t, std::int64_t>> read_edge_list(std::istream& in);
std::vector<std::pair<std::int64_t, std::int64_t>> read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace coauthornet
