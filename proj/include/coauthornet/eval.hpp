#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coauthornet/errors.hpp"
#include "coauthornet/graph.hpp"

namespace coauthornet {

struct LabeledPair {
  NodeId u = 0;
  NodeId v = 0;
  int label = 0;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

enum class NegativeStrategy { kUniform, kDegree };

struct EdgeSplit {
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> val;
  std::vector<LabeledPair> test;
  std::uint64_t seed = 0;
  std::array<std::size_t, 3> ratio = {3, 1, 2};

  friend bool operator==(const EdgeSplit&, const EdgeSplit&) = default;
};

// Positive edges are shuffled and cut into floor-proportional blocks (the
// remainder goes to train); each block gets as many distinct non-edge
// negatives, disjoint across blocks. Negatives are drawn by rejection with a
// budget of 100 draws per needed negative (SamplingExhaustedError beyond it).
// kDegree draws endpoints proportionally to degree + 1.
EdgeSplit split_edges(const Graph& g, std::array<std::size_t, 3> ratio, std::uint64_t seed,
                      NegativeStrategy strategy = NegativeStrategy::kUniform);

// Positive pairs of a split partition as an edge list.
std::vector<Edge> positive_edges(std::span<const LabeledPair> pairs);

void write_split(std::ostream& out, const EdgeSplit& split);
EdgeSplit read_split(std::istream& in);

struct ConfigDescriptor {
  std::string article_embedding = "--";
  std::string author_embedding = "GraphSAGE (Mean)";
  std::string op = "L2";

  friend bool operator==(const ConfigDescriptor&, const ConfigDescriptor&) = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double auc_roc = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
  std::size_t count = 0;
  ConfigDescriptor config;
};

// Raised for single-class input; partial() still carries accuracy and F1.
class AucUndefinedError : public UndefinedMetricError {
 public:
  AucUndefinedError(const std::string& what, MetricsReport partial)
      : UndefinedMetricError(what), partial_(std::move(partial)) {}
  const MetricsReport& partial() const { return partial_; }

 private:
  MetricsReport partial_;
};

// Probability that a random positive outscores a random negative, ties half.
// Rank-statistic evaluation in O(n log n). Throws AucUndefinedError variants
// via compute_metrics; here UndefinedMetricError for single-class input.
double auc_roc(std::span<const int> labels, std::span<const double> scores);

// Accuracy and F1 use `score >= threshold` as the positive prediction; F1 is
// 0 when precision + recall is 0.
MetricsReport compute_metrics(std::span<const int> labels, std::span<const double> scores,
                              double threshold = 0.5);

enum class TableFormat { kText, kCsv };

// Columns mirror the ablation table: article embedding, author embedding,
// operator, accuracy, AUC-ROC, F1 (4 decimals), rows in input order.
std::string results_table(std::span<const MetricsReport> reports, TableFormat format);
std::string results_csv_header();
std::string results_csv_row(const MetricsReport& report);

// deg(u) * deg(v) scores, the structural baseline.
std::vector<double> degree_product_scores(const Graph& g, std::span<const LabeledPair> pairs);

}  // namespace coauthornet
