#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "coauthornet/eval.hpp"
#include "coauthornet/random.hpp"

using namespace coauthornet;

namespace {

double brute_auc(const std::vector<int>& y, const std::vector<double>& s) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return wins / pairs;
}

Graph random_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::set<Edge> e;
  while (e.size() < m) {
    NodeId u = NodeId(rng.index(n)), v = NodeId(rng.index(n));
    if (u == v) continue;
    e.emplace(std::min(u, v), std::max(u, v));
  }
  std::vector<Edge> edges(e.begin(), e.end());
  return Graph::build(edges, n, false);
}

std::size_t positives(const std::vector<LabeledPair>& part) {
  return std::count_if(part.begin(), part.end(), [](const auto& p) { return p.label == 1; });
}

std::pair<NodeId, NodeId> key(const LabeledPair& p) {
  return {std::min(p.u, p.v), std::max(p.u, p.v)};
}

}  // namespace

TEST(Auc, HandExample) {
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> s = {0.9, 0.8, 0.7, 0.1};
  EXPECT_DOUBLE_EQ(auc_roc(y, s), 0.75);
}

TEST(Auc, TiesAndSeparation) {
  EXPECT_DOUBLE_EQ(auc_roc(std::vector<int>{1, 0, 1, 0}, std::vector<double>{.5, .5, .5, .5}), 0.5);
  const MetricsReport r =
      compute_metrics(std::vector<int>{1, 1, 0, 0}, std::vector<double>{0.9, 0.6, 0.4, 0.1});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.auc_roc, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.count, 4u);
}

TEST(Auc, RankStatisticMatchesPairwise) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(99);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = int(rng.index(2));
      s[i] = trial % 2 ? double(rng.index(5)) / 4 : rng.uniform();
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(auc_roc(y, s), brute_auc(y, s), 1e-12);
  }
}

TEST(Metrics, SingleClassIsUndefinedButPartial) {
  try {
    compute_metrics(std::vector<int>{1, 1}, std::vector<double>{0.7, 0.2});
    FAIL();
  } catch (const AucUndefinedError& e) {
    EXPECT_DOUBLE_EQ(e.partial().accuracy, 0.5);
    EXPECT_NEAR(e.partial().f1, 2.0 / 3.0, 1e-12);
  }
}

TEST(Metrics, ThresholdAndZeroF1) {
  const MetricsReport r =
      compute_metrics(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.4, 0.2, 0.3, 0.1});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_EQ(r.f1, 0.0);
  const MetricsReport at =
      compute_metrics(std::vector<int>{1, 0}, std::vector<double>{0.5, 0.49});
  EXPECT_EQ(at.accuracy, 1.0);
}

TEST(Metrics, PermutationInvariant) {
  Rng rng(4);
  std::vector<int> y(60);
  std::vector<double> s(60);
  for (int i = 0; i < 60; ++i) y[i] = i % 2, s[i] = rng.uniform();
  const MetricsReport a = compute_metrics(y, s);
  std::vector<std::size_t> order(60);
  for (std::size_t i = 0; i < 60; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<int> y2;
  std::vector<double> s2;
  for (auto i : order) y2.push_back(y[i]), s2.push_back(s[i]);
  const MetricsReport b = compute_metrics(y2, s2);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.auc_roc, b.auc_roc);
  EXPECT_EQ(a.f1, b.f1);
}

TEST(Split, SixHundredEdges) {
  const Graph g = random_graph(200, 600, 1);
  const EdgeSplit s = split_edges(g, {3, 1, 2}, 7);
  EXPECT_EQ(positives(s.train), 300u);
  EXPECT_EQ(positives(s.val), 100u);
  EXPECT_EQ(positives(s.test), 200u);
  EXPECT_EQ(s.train.size(), 600u);
  EXPECT_EQ(s.val.size(), 200u);
  EXPECT_EQ(s.test.size(), 400u);
}

TEST(Split, FloorProportionalRemainderToTrain) {
  for (std::size_t m : {6u, 7u, 11u, 13u, 100u, 101u}) {
    const Graph g = random_graph(60, m, m);
    const EdgeSplit s = split_edges(g, {3, 1, 2}, 1);
    EXPECT_EQ(positives(s.val), m * 1 / 6);
    EXPECT_EQ(positives(s.test), m * 2 / 6);
    EXPECT_EQ(positives(s.train), m - m / 6 - m * 2 / 6);
  }
}

TEST(Split, DeterministicBySeed) {
  const Graph g = random_graph(50, 120, 3);
  EXPECT_EQ(split_edges(g, {3, 1, 2}, 5), split_edges(g, {3, 1, 2}, 5));
  EXPECT_NE(split_edges(g, {3, 1, 2}, 5).train, split_edges(g, {3, 1, 2}, 6).train);
}

TEST(Split, NegativesAreNonEdgesDistinctAndDisjoint) {
  const Graph g = random_graph(50, 150, 8);
  for (NegativeStrategy strategy : {NegativeStrategy::kUniform, NegativeStrategy::kDegree}) {
    const EdgeSplit s = split_edges(g, {3, 1, 2}, 2, strategy);
    std::set<std::pair<NodeId, NodeId>> seen;
    std::size_t total_pos = 0;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      EXPECT_EQ(positives(*part) * 2, part->size());
      for (const auto& p : *part) {
        EXPECT_NE(p.u, p.v);
        EXPECT_EQ(g.has_edge(p.u, p.v), p.label == 1);
        EXPECT_TRUE(seen.insert(key(p)).second);
        total_pos += p.label;
      }
    }
    EXPECT_EQ(total_pos, 150u);
  }
}

TEST(Split, DenseGraphExhaustsBudget) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < 6; ++u)
    for (NodeId v = u + 1; v < 6; ++v) e.emplace_back(u, v);
  const Graph k6 = Graph::build(e, 6, false);
  EXPECT_THROW(split_edges(k6, {3, 1, 2}, 1), SamplingExhaustedError);
}

TEST(Split, TextRoundTrip) {
  const EdgeSplit s = split_edges(random_graph(30, 40, 2), {3, 1, 2}, 9);
  std::stringstream io;
  write_split(io, s);
  EXPECT_EQ(read_split(io), s);
}

TEST(ResultsTable, TextRow) {
  MetricsReport r;
  r.accuracy = 0.8928;
  r.auc_roc = 0.9531;
  r.f1 = 0.8885;
  r.config = {"GraphSAGE (Mean)", "GraphSAGE (Mean)", "L2"};
  const std::string table = results_table(std::span(&r, 1), TableFormat::kText);
  std::istringstream lines(table);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(row, "GraphSAGE (Mean) | GraphSAGE (Mean) | L2 | 0.8928 | 0.9531 | 0.8885");
}

TEST(ResultsTable, FixedFourDecimals) {
  MetricsReport r;
  r.accuracy = r.auc_roc = r.f1 = 0.5;
  EXPECT_EQ(results_csv_row(r), "--,GraphSAGE (Mean),L2,0.5000,0.5000,0.5000");
}

TEST(ResultsTable, CsvRoundTrip) {
  std::vector<MetricsReport> reports(3);
  reports[0].config = {"--", "GraphSAGE (MaxPool)", "Had"};
  reports[0].accuracy = 0.71234;
  reports[1].config = {"Node2Vec", "GraphSAGE (Mean)", "IP"};
  reports[1].auc_roc = 1.0;
  reports[2].f1 = 0.33333;
  const std::string csv = results_table(reports, TableFormat::kCsv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "article_embedding,author_embedding,operator,accuracy,auc_roc,f1");
  std::size_t i = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_EQ(cells[0], reports[i].config.article_embedding);
    EXPECT_EQ(cells[1], reports[i].config.author_embedding);
    EXPECT_EQ(cells[2], reports[i].config.op);
    EXPECT_NEAR(std::stod(cells[3]), reports[i].accuracy, 5e-5);
    EXPECT_NEAR(std::stod(cells[4]), reports[i].auc_roc, 5e-5);
    EXPECT_NEAR(std::stod(cells[5]), reports[i].f1, 5e-5);
    ++i;
  }
  EXPECT_EQ(i, 3u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Baseline, DegreeProduct) {
  std::vector<Edge> e = {{0, 1}, {0, 2}, {0, 3}, {1, 2}};
  const Graph g = Graph::build(e, 5, false);
  const std::vector<LabeledPair> pairs = {{0, 1, 1}, {3, 4, 0}, {2, 3, 0}};
  EXPECT_EQ(degree_product_scores(g, pairs), (std::vector<double>{6, 0, 2}));
}
