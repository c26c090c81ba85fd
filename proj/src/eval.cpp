#include "coauthornet/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace coauthornet {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

EdgeSplit split_edges(const Graph& g, std::array<std::size_t, 3> ratio, std::uint64_t seed,
                      NegativeStrategy strategy) {
  if (g.directed()) throw ConfigError("edge splitting expects an undirected graph");
  const std::size_t parts = ratio[0] + ratio[1] + ratio[2];
  if (parts == 0) throw ConfigError("split ratio must have a positive total");
  std::vector<Edge> edges = g.edges();
  if (edges.size() < 6) {
    throw ConfigError("need at least 6 edges to split, graph has " + std::to_string(edges.size()));
  }
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(edges);

  const std::size_t m = edges.size();
  const std::size_t n_val = m * ratio[1] / parts;
  const std::size_t n_test = m * ratio[2] / parts;
  const std::size_t n_train = m - n_val - n_test;

  EdgeSplit split;
  split.seed = seed;
  split.ratio = ratio;
  auto fill = [&](std::vector<LabeledPair>& dst, std::size_t begin, std::size_t count) {
    for (std::size_t i = begin; i < begin + count; ++i) {
      dst.push_back({edges[i].first, edges[i].second, 1});
    }
  };
  fill(split.train, 0, n_train);
  fill(split.val, n_train, n_val);
  fill(split.test, n_train + n_val, n_test);

  const std::size_t n = g.num_nodes();
  AliasTable degree_law;
  if (strategy == NegativeStrategy::kDegree) {
    std::vector<double> w(n);
    for (NodeId v = 0; v < n; ++v) w[v] = static_cast<double>(g.degree(v)) + 1.0;
    degree_law = AliasTable(w);
  }
  auto draw = [&]() -> NodeId {
    return static_cast<NodeId>(strategy == NegativeStrategy::kDegree ? degree_law.sample(rng)
                                                                     : rng.index(n));
  };

  std::set<std::uint64_t> used;
  const std::size_t needed = m;
  const std::size_t budget = 100 * needed;
  std::size_t attempts = 0;
  for (auto* part : {&split.train, &split.val, &split.test}) {
    const std::size_t positives = part->size();
    std::size_t got = 0;
    while (got < positives) {
      if (++attempts > budget) {
        throw SamplingExhaustedError("could not find " + std::to_string(needed) +
                                     " distinct non-edges within " + std::to_string(budget) +
                                     " draws");
      }
      const NodeId u = draw();
      const NodeId v = draw();
      if (u == v || g.has_edge(u, v)) continue;
      if (!used.insert(pair_key(u, v)).second) continue;
      part->push_back({std::min(u, v), std::max(u, v), 0});
      ++got;
    }
  }
  return split;
}

std::vector<Edge> positive_edges(std::span<const LabeledPair> pairs) {
  std::vector<Edge> out;
  for (const auto& p : pairs) {
    if (p.label == 1) out.emplace_back(p.u, p.v);
  }
  return out;
}

void write_split(std::ostream& out, const EdgeSplit& split) {
  out << "# split seed " << split.seed << " ratio " << split.ratio[0] << ':' << split.ratio[1]
      << ':' << split.ratio[2] << '\n';
  auto dump = [&](std::string_view name, const std::vector<LabeledPair>& part) {
    for (const auto& p : part) out << name << ' ' << p.u << ' ' << p.v << ' ' << p.label << '\n';
  };
  dump("train", split.train);
  dump("val", split.val);
  dump("test", split.test);
}

EdgeSplit read_split(std::istream& in) {
  EdgeSplit split;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream f(line);
    if (line[0] == '#') {
      std::string hash, word, ratio;
      f >> hash >> word;
      if (word == "split") {
        f >> word >> split.seed >> word >> ratio;
        char c1, c2;
        std::istringstream r(ratio);
        if (!(r >> split.ratio[0] >> c1 >> split.ratio[1] >> c2 >> split.ratio[2])) {
          throw FormatError("split line " + std::to_string(line_no) + ": bad ratio");
        }
        header = true;
      }
      continue;
    }
    std::string part;
    LabeledPair p;
    if (!(f >> part >> p.u >> p.v >> p.label) || (p.label != 0 && p.label != 1)) {
      throw FormatError("split line " + std::to_string(line_no) + ": expected `part u v label`");
    }
    if (part == "train") split.train.push_back(p);
    else if (part == "val") split.val.push_back(p);
    else if (part == "test") split.test.push_back(p);
    else throw FormatError("split line " + std::to_string(line_no) + ": unknown partition " + part);
  }
  if (!header) throw FormatError("split file lacks its `# split seed` header");
  return split;
}

double auc_roc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw DimensionError("labels and scores differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positives = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positives += 1.0;
        rank_sum += mid_rank;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw UndefinedMetricError("AUC-ROC is undefined without both classes");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

MetricsReport compute_metrics(std::span<const int> labels, std::span<const double> scores,
                              double threshold) {
  if (labels.size() != scores.size()) throw DimensionError("labels and scores differ in length");
  if (labels.empty()) throw DimensionError("cannot compute metrics on zero samples");
  MetricsReport r;
  r.threshold = threshold;
  r.count = labels.size();
  double tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pred = scores[i] >= threshold ? 1 : 0;
    if (pred == labels[i]) correct += 1;
    if (pred == 1 && labels[i] == 1) tp += 1;
    if (pred == 1 && labels[i] == 0) fp += 1;
    if (pred == 0 && labels[i] == 1) fn += 1;
  }
  r.accuracy = correct / static_cast<double>(labels.size());
  const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  r.f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  try {
    r.auc_roc = auc_roc(labels, scores);
  } catch (const UndefinedMetricError& e) {
    throw AucUndefinedError(e.what(), r);
  }
  return r;
}

std::string results_csv_header() {
  return "article_embedding,author_embedding,operator,accuracy,auc_roc,f1";
}

std::string results_csv_row(const MetricsReport& r) {
  return csv_field(r.config.article_embedding) + ',' + csv_field(r.config.author_embedding) +
         ',' + csv_field(r.config.op) + ',' + fixed4(r.accuracy) + ',' + fixed4(r.auc_roc) +
         ',' + fixed4(r.f1);
}

std::string results_table(std::span<const MetricsReport> reports, TableFormat format) {
  std::string out;
  if (format == TableFormat::kCsv) {
    out = results_csv_header() + '\n';
    for (const auto& r : reports) out += results_csv_row(r) + '\n';
    return out;
  }
  out = "Article embedding | Author embedding | LP op. | Accuracy | AUC-ROC | F1-score\n";
  for (const auto& r : reports) {
    out += r.config.article_embedding + " | " + r.config.author_embedding + " | " + r.config.op +
           " | " + fixed4(r.accuracy) + " | " + fixed4(r.auc_roc) + " | " + fixed4(r.f1) + '\n';
  }
  return out;
}

std::vector<double> degree_product_scores(const Graph& g, std::span<const LabeledPair> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(static_cast<double>(g.degree(p.u)) * static_cast<double>(g.degree(p.v)));
  }
  return out;
}

}  // namespace coauthornet
