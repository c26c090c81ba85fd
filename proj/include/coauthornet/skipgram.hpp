#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coauthornet/graph.hpp"
#include "coauthornet/matrix.hpp"
#include "coauthornet/params.hpp"
#include "coauthornet/walks.hpp"

namespace coauthornet {

// One (center, context) observation with its sampled negatives.
struct PairSample {
  NodeId center = 0;
  NodeId context = 0;
  std::vector<NodeId> negatives;
};

// Negative-sampling surrogate for one pair given a center representation:
//   -log s(c . o_ctx) - sum_j log s(-c . o_neg_j)
// Adds d/dcenter into grad_center and d/do_row into grad_out (if non-null).
double negative_sampling_loss(std::span<const double> center, const Matrix& out_table,
                              const PairSample& sample, std::span<double> grad_center,
                              Matrix* grad_out);

struct SkipGramConfig {
  std::size_t dims = 128;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;  // decays linearly to 1e-4 of its start value
  std::uint64_t seed = 0;
};

struct SkipGramParams {
  Matrix w_in;   // |V| x d, rows are the node embeddings
  Matrix w_out;  // |V| x d, context table

  std::vector<ParamView> blocks();
};

SkipGramParams init_skipgram(std::size_t num_nodes, std::size_t dims, Rng& rng);

// Summed surrogate loss over samples; dense gradients when grads != nullptr
// (must be shaped like params and zeroed by the caller).
double skipgram_loss(const SkipGramParams& params, std::span<const PairSample> samples,
                     SkipGramParams* grads);

// SGD on the surrogate over every window pair of the corpus; negatives from
// the corpus unigram^0.75 law. Throws ConfigError when dims == 0 or
// negatives == 0, EmptyCorpusError when the corpus has no pairs.
SkipGramParams train_skipgram(const WalkCorpus& corpus, std::size_t num_nodes,
                              std::size_t window, const SkipGramConfig& cfg);

// f(x) = sigmoid(W_map x) replaces the free center embedding.
struct Attri2VecParams {
  Matrix w_map;  // d x d_x
  Matrix w_out;  // |V| x d

  std::vector<ParamView> blocks();
};

Attri2VecParams init_attri2vec(std::size_t num_nodes, std::size_t feature_dim,
                               std::size_t dims, Rng& rng);

Vector attri2vec_image(const Attri2VecParams& params, std::span<const double> x);

// Throws ConfigError if features.cols() != w_map.cols().
double attri2vec_loss(const Attri2VecParams& params, const FeatureMatrix& features,
                      std::span<const PairSample> samples, Attri2VecParams* grads);

struct Attri2VecResult {
  Matrix images;  // f(x_i) per node
  Attri2VecParams params;
};

Attri2VecResult train_attri2vec(const Graph& g, const FeatureMatrix& features,
                                const WalkConfig& walk, const SkipGramConfig& cfg);

}  // namespace coauthornet
