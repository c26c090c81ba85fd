#include "coauthornet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "coauthornet/errors.hpp"

namespace coauthornet {

Graph Graph::build(std::span<const Edge> edges, std::size_t n, bool directed) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw ConstructionError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") has an endpoint >= node count " + std::to_string(n));
    }
    if (u == v) continue;
    adj[u].push_back(v);
    if (!directed) adj[v].push_back(u);
  }
  Graph g;
  g.directed_ = directed;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.offsets_[v + 1] = g.offsets_[v] + list.size();
  }
  g.targets_.reserve(g.offsets_[n]);
  for (const auto& list : adj) g.targets_.insert(g.targets_.end(), list.begin(), list.end());
  return g;
}

std::size_t Graph::num_edges() const {
  return directed_ ? targets_.size() : targets_.size() / 2;
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  if (v >= num_nodes()) {
    throw BoundsError("node " + std::to_string(v) + " out of range (n = " +
                      std::to_string(num_nodes()) + ")");
  }
  return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (directed_ || u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph Graph::as_undirected() const {
  if (!directed_) return *this;
  auto list = edges();
  Graph g = build(list, num_nodes(), false);
  g.features_ = features_;
  return g;
}

void Graph::set_features(FeatureMatrix x) {
  if (x.rows() != num_nodes()) {
    throw DimensionError("feature matrix has " + std::to_string(x.rows()) +
                         " rows for " + std::to_string(num_nodes()) + " nodes");
  }
  features_ = std::move(x);
}

std::vector<NodeId> sample_neighbors(const Graph& g, NodeId v, std::size_t k, Rng& rng) {
  auto nb = g.neighbors(v);
  std::vector<NodeId> out(k, v);
  if (nb.empty()) return out;
  for (auto& s : out) s = nb[rng.index(nb.size())];
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> read_edge_list(std::istream& in) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::int64_t a, b;
    if (!(fields >> a >> b)) {
      throw FormatError("edge list line " + std::to_string(line_no) +
                        ": expected two integer tokens");
    }
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << (g.directed() ? " directed" : " undirected") << "\n";
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace coauthornet
