#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coauthornet/embedding_io.hpp"
#include "coauthornet/eval.hpp"
#include "coauthornet/ingest.hpp"
#include "coauthornet/journal.hpp"
#include "coauthornet/sage.hpp"

namespace coauthornet {

enum class LinkOperator { kL1, kL2, kHadamard, kAverage, kInnerProduct };

inline constexpr std::array<LinkOperator, 5> kAllOperators = {
    LinkOperator::kL1, LinkOperator::kL2, LinkOperator::kHadamard, LinkOperator::kAverage,
    LinkOperator::kInnerProduct};

std::string_view to_string(LinkOperator op);        // "l1", "l2", "hadamard", ...
std::string_view display_name(LinkOperator op);     // "L1", "L2", "Had", "Avg", "IP"
LinkOperator parse_link_operator(std::string_view s);

std::size_t operator_output_dim(LinkOperator op, std::size_t dim);

// Throws DimensionError on unequal sizes.
Vector link_embed(std::span<const double> hu, std::span<const double> hv, LinkOperator op);
// Accumulates d/dhu and d/dhv given d/doutput.
void link_embed_backward(std::span<const double> hu, std::span<const double> hv, LinkOperator op,
                         std::span<const double> grad_out, std::span<double> grad_u,
                         std::span<double> grad_v);

enum class PaperPooling { kSum, kMean };

struct AugmentedAuthorFeatures {
  FeatureMatrix matrix;           // authors x (k + d)
  std::size_t missing_papers = 0; // author papers without an embedding row
};

// Row i = concat(interest row i, pooled embeddings of author i's papers).
// `paper_tokens[p]` is the embedding label of paper NodeId p. Throws
// ConsistencyError when an author has no interest row.
AugmentedAuthorFeatures augment_author_features(const FeatureMatrix& interests,
                                                const AuthorTable& authors,
                                                std::span<const std::string> paper_tokens,
                                                const EmbeddingMatrix& paper_embeddings,
                                                PaperPooling pooling = PaperPooling::kSum);

struct LinkModelParams {
  SageParams sage;
  LinkOperator op = LinkOperator::kL2;
  // Optional hidden layer between the link embedding and the logit.
  Matrix hidden_weight;  // h x e, empty when disabled
  Vector hidden_bias;
  Vector classifier_weight;  // length = hidden size or operator output dim
  double classifier_bias = 0.0;

  bool has_hidden() const { return !hidden_weight.empty(); }
  std::vector<ParamView> blocks();
  LinkModelParams zeros_like() const;

  friend bool operator==(const LinkModelParams&, const LinkModelParams&) = default;
};

struct LinkModelConfig {
  std::vector<std::size_t> dims = {64, 64};
  std::vector<std::size_t> sample_sizes = {10, 10};
  Aggregator aggregator = Aggregator::kMean;
  Activation activation = Activation::kSigmoid;
  bool normalize = true;
  LinkOperator op = LinkOperator::kL2;
  std::size_t hidden = 0;
  std::size_t epochs = 20;
  std::size_t batch_size = 512;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

LinkModelParams init_link_model(std::size_t input_dim, const LinkModelConfig& cfg, Rng& rng);

// Link probabilities for the pairs, given final-layer node representations
// aligned with `rows` (row index per node).
double link_logit(const LinkModelParams& params, std::span<const double> hu,
                  std::span<const double> hv);

// Mean BCE over labeled pairs whose endpoints are covered by the plan.
double link_model_loss(const LinkModelParams& params, const FeatureMatrix& features,
                       const SagePlan& plan, std::span<const LabeledPair> samples,
                       LinkModelParams* grads);

// sigma(w . op(h_u, h_v) + b) with full-neighborhood embeddings by default.
// Throws BoundsError for unknown nodes, DimensionError on feature mismatch.
std::vector<double> predict_links(const LinkModelParams& params, const Graph& g,
                                  const FeatureMatrix& features,
                                  std::span<const std::pair<NodeId, NodeId>> pairs);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_auc = 0.0;
  double val_f1 = 0.0;
};

struct LinkTrainResult {
  LinkModelParams params;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based; 0 when no epoch ran
  double initial_loss = 0.0;   // train loss at initialization
};

// Minibatch Adam on BCE over split.train. Message passing uses only the train
// positives; parameters of the epoch with best validation AUC are returned.
LinkTrainResult train_link_model(const Graph& g, const FeatureMatrix& features,
                                 const EdgeSplit& split, const LinkModelConfig& cfg);

// Train-partition message-passing graph over g's node set.
Graph training_graph(const Graph& g, const EdgeSplit& split);

struct Recommendation {
  NodeId author = 0;
  double probability = 0.0;
  std::optional<JournalMetrics> info;
};

// Scores every non-neighbor v != u and returns the k most probable, ties by
// ascending id. `author_metrics[v]`, when given, fills Recommendation::info.
std::vector<Recommendation> recommend(
    const LinkModelParams& params, const Graph& g, const FeatureMatrix& features, NodeId u,
    std::size_t k, const std::vector<std::optional<JournalMetrics>>* author_metrics = nullptr);

}  // namespace coauthornet
