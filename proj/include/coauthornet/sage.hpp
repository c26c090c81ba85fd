#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coauthornet/graph.hpp"
#include "coauthornet/matrix.hpp"
#include "coauthornet/nn.hpp"
#include "coauthornet/params.hpp"
#include "coauthornet/skipgram.hpp"
#include "coauthornet/walks.hpp"

namespace coauthornet {

enum class Aggregator { kMean, kMaxPool };

std::string_view to_string(Aggregator a);
Aggregator parse_aggregator(std::string_view s);

struct SageLayer {
  Matrix weight;       // d_out x 2 d_in, applied to concat(self, neighborhood)
  Matrix pool_weight;  // d_in x d_in (max-pool only)
  Vector pool_bias;    // d_in (max-pool only)

  friend bool operator==(const SageLayer&, const SageLayer&) = default;
};

struct SageParams {
  Aggregator aggregator = Aggregator::kMean;
  Activation activation = Activation::kSigmoid;
  bool normalize = true;  // L2-normalize every layer output
  std::vector<SageLayer> layers;

  std::size_t input_dim() const { return layers.front().weight.cols() / 2; }
  std::size_t output_dim() const { return layers.back().weight.rows(); }

  std::vector<ParamView> blocks();
  std::vector<ConstParamView> blocks() const;

  // Same shapes, all zeros.
  SageParams zeros_like() const;

  friend bool operator==(const SageParams&, const SageParams&) = default;
};

// Xavier-initialized layers mapping input_dim -> dims[0] -> ... -> dims.back().
SageParams init_sage(std::size_t input_dim, std::span<const std::size_t> dims,
                     Aggregator aggregator, Activation activation, Rng& rng);

// Receptive field of a set of target nodes. nodes[l] lists the global ids
// whose layer-l representation is needed (nodes[L] are the targets); each
// nodes[l+1] is a prefix of nodes[l]. neighbors[l][i] holds local indices into
// nodes[l] aggregated for node nodes[l+1][i].
struct SagePlan {
  std::vector<std::vector<NodeId>> nodes;
  std::vector<std::vector<std::vector<std::uint32_t>>> neighbors;
  // Local index in nodes.back() of each requested target, in request order.
  std::vector<std::uint32_t> targets;
};

// With `sample_sizes` (one per layer, sample_sizes[l] feeding layer l), each
// node draws that many neighbors uniformly with replacement; without it the
// full neighbor list is used. Isolated nodes aggregate themselves.
SagePlan build_sage_plan(const Graph& g, std::span<const NodeId> targets, std::size_t num_layers,
                         const std::optional<std::vector<std::size_t>>& sample_sizes,
                         Rng* rng);

// Intermediate values retained for the backward pass.
struct SageCache {
  std::vector<Matrix> h;          // h[l]: rows aligned with plan.nodes[l]
  std::vector<Matrix> aggregate;  // per layer, rows aligned with nodes[l+1]
  std::vector<Matrix> pooled;     // per layer, rows aligned with nodes[l] (max-pool)
  std::vector<std::vector<std::uint32_t>> argmax;  // per layer, [i * d_in + j]
  std::vector<Matrix> activated;  // pre-normalization outputs
  std::vector<Vector> norms;
};

// Final-layer representations for plan.nodes.back(). Throws DimensionError if
// the features do not match the first layer.
Matrix sage_forward(const SageParams& params, const FeatureMatrix& features,
                    const SagePlan& plan, SageCache* cache = nullptr);

// Accumulates parameter gradients given d loss / d output rows.
void sage_backward(const SageParams& params, const SagePlan& plan, const SageCache& cache,
                   const Matrix& grad_output, SageParams& grads);

// Embeddings of every node (row v = node v).
Matrix sage_embed_all(const Graph& g, const FeatureMatrix& features, const SageParams& params,
                      const std::optional<std::vector<std::size_t>>& sample_sizes = std::nullopt,
                      std::uint64_t seed = 0);

struct SageUnsupervisedConfig {
  std::vector<std::size_t> dims = {128, 128};
  std::vector<std::size_t> sample_sizes = {10, 5};
  Aggregator aggregator = Aggregator::kMean;
  Activation activation = Activation::kSigmoid;
  bool normalize = true;
  WalkConfig walk{1.0, 1.0, 5, 1, 2};
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  std::size_t batch_size = 512;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

// Mean negative-sampling loss where both center and context representations
// come from the same embedding rows (local indices into `embeddings`).
double pairwise_ns_loss(const Matrix& embeddings, std::span<const PairSample> samples,
                        Matrix* grad_embeddings);

// Loss of the walk-co-occurrence objective for samples given in *global* ids;
// `plan` must cover every id mentioned by the samples.
double sage_unsupervised_loss(const SageParams& params, const FeatureMatrix& features,
                              const SagePlan& plan, std::span<const PairSample> samples,
                              SageParams* grads);

// Minibatch Adam on the walk-co-occurrence objective through all layers.
SageParams train_sage_unsupervised(const Graph& g, const FeatureMatrix& features,
                                   const SageUnsupervisedConfig& cfg);

}  // namespace coauthornet
