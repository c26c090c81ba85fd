#include <gtest/gtest.h>

#include <cmath>

#include "coauthornet/errors.hpp"
#include "coauthornet/nn.hpp"
#include "coauthornet/skipgram.hpp"

using namespace coauthornet;

namespace {

Graph barbell() {
  std::vector<Edge> e;
  for (NodeId side : {0u, 10u})
    for (NodeId i = 0; i < 10; ++i)
      for (NodeId j = i + 1; j < 10; ++j) e.emplace_back(side + i, side + j);
  e.emplace_back(9, 10);
  return Graph::build(e, 20, false);
}

// Mean cosine similarity within and across the two cliques.
std::pair<double, double> clique_similarity(const Matrix& emb) {
  double intra = 0, inter = 0;
  int ni = 0, nx = 0;
  for (NodeId u = 0; u < 20; ++u)
    for (NodeId v = u + 1; v < 20; ++v) {
      const double c = cosine_similarity(emb.row(u), emb.row(v));
      if ((u < 10) == (v < 10)) intra += c, ++ni;
      else inter += c, ++nx;
    }
  return {intra / ni, inter / nx};
}

std::vector<PairSample> random_samples(std::size_t n, std::size_t count, std::size_t negatives,
                                       Rng& rng) {
  std::vector<PairSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    PairSample s{NodeId(rng.index(n)), NodeId(rng.index(n)), {}};
    for (std::size_t j = 0; j < negatives; ++j) s.negatives.push_back(NodeId(rng.index(n)));
    out.push_back(s);
  }
  return out;
}

template <typename Params, typename LossAt>
double max_block_error(Params& params, Params& grads, LossAt&& loss_at) {
  auto pb = params.blocks();
  auto gb = grads.blocks();
  double worst = 0;
  for (std::size_t b = 0; b < pb.size(); ++b) {
    const Vector saved(pb[b].values.begin(), pb[b].values.end());
    LossFn fn = [&](std::span<const double> theta) {
      std::copy(theta.begin(), theta.end(), pb[b].values.begin());
      const double l = loss_at();
      std::copy(saved.begin(), saved.end(), pb[b].values.begin());
      return l;
    };
    worst = std::max(worst, finite_diff_check(fn, saved, gb[b].values));
  }
  return worst;
}

}  // namespace

TEST(NegativeSampling, LossFormula) {
  Matrix out(3, 2, {1, 0, 0, 1, -1, -1});
  const Vector c = {0.5, -0.25};
  PairSample s{0, 0, {1, 2}};
  Vector g(2, 0.0);
  const double loss = negative_sampling_loss(c, out, s, g, nullptr);
  const double expect = -std::log(1 / (1 + std::exp(-0.5))) -
                        std::log(1 / (1 + std::exp(-0.25))) -
                        std::log(1 / (1 + std::exp(-0.25)));
  EXPECT_NEAR(loss, expect, 1e-12);
}

TEST(SkipGram, SinglePairGradient) {
  Rng rng(1);
  SkipGramParams p = init_skipgram(6, 4, rng);
  for (double& x : p.w_out.values()) x = rng.uniform(-0.5, 0.5);
  const std::vector<PairSample> samples = {{2, 4, {0, 5, 4}}};
  SkipGramParams g{Matrix(6, 4), Matrix(6, 4)};
  skipgram_loss(p, samples, &g);
  EXPECT_LE(max_block_error(p, g, [&] { return skipgram_loss(p, samples, nullptr); }), 1e-4);
}

TEST(SkipGram, RandomBatchGradient) {
  Rng rng(2);
  SkipGramParams p = init_skipgram(8, 5, rng);
  for (double& x : p.w_out.values()) x = rng.uniform(-0.5, 0.5);
  const auto samples = random_samples(8, 12, 3, rng);
  SkipGramParams g{Matrix(8, 5), Matrix(8, 5)};
  skipgram_loss(p, samples, &g);
  EXPECT_LE(max_block_error(p, g, [&] { return skipgram_loss(p, samples, nullptr); }), 1e-4);
}

TEST(SkipGram, PositiveStepRaisesScore) {
  Rng rng(3);
  SkipGramParams p = init_skipgram(3, 4, rng);
  for (double& x : p.w_out.values()) x = rng.uniform(-1, 1);
  const std::vector<PairSample> samples = {{0, 1, {2}}};
  double score = dot(p.w_in.row(0), p.w_out.row(1));
  for (int step = 0; step < 50; ++step) {
    SkipGramParams g{Matrix(3, 4), Matrix(3, 4)};
    skipgram_loss(p, samples, &g);
    axpy(-0.1, g.w_in.row(0), p.w_in.row(0));
    const double next = dot(p.w_in.row(0), p.w_out.row(1));
    EXPECT_GT(next, score);
    score = next;
  }
}

TEST(SkipGram, BarbellSeparation) {
  const Graph g = barbell();
  const WalkCorpus walks = generate_walks(g, WalkConfig{1, 1, 20, 10, 5}, 11);
  SkipGramConfig cfg;
  cfg.dims = 16;
  cfg.epochs = 3;
  cfg.seed = 4;
  const SkipGramParams p = train_skipgram(walks, 20, 5, cfg);
  const auto [intra, inter] = clique_similarity(p.w_in);
  EXPECT_GT(intra, inter);
}

TEST(SkipGram, Reproducible) {
  const Graph g = barbell();
  const WalkCorpus walks = generate_walks(g, WalkConfig{1, 1, 10, 2, 3}, 1);
  SkipGramConfig cfg;
  cfg.dims = 8;
  cfg.epochs = 1;
  EXPECT_EQ(train_skipgram(walks, 20, 3, cfg).w_in, train_skipgram(walks, 20, 3, cfg).w_in);
}

TEST(SkipGram, ConfigErrors) {
  const WalkCorpus walks = {{0, 1, 2}};
  SkipGramConfig cfg;
  cfg.dims = 0;
  EXPECT_THROW(train_skipgram(walks, 3, 1, cfg), ConfigError);
  cfg.dims = 4;
  cfg.negatives = 0;
  EXPECT_THROW(train_skipgram(walks, 3, 1, cfg), ConfigError);
}

TEST(Attri2Vec, JointGradient) {
  Rng rng(5);
  Attri2VecParams p = init_attri2vec(4, 5, 3, rng);
  for (double& x : p.w_out.values()) x = rng.uniform(-0.5, 0.5);
  FeatureMatrix x(4, 5);
  for (double& v : x.values()) v = rng.uniform(-1, 1);
  const auto samples = random_samples(4, 6, 2, rng);
  Attri2VecParams g{Matrix(3, 5), Matrix(4, 3)};
  attri2vec_loss(p, x, samples, &g);
  EXPECT_LE(max_block_error(p, g, [&] { return attri2vec_loss(p, x, samples, nullptr); }),
            1e-4);
}

TEST(Attri2Vec, IdenticalFeaturesIdenticalImages) {
  const Graph g = barbell();
  FeatureMatrix x(20, 6);
  Rng rng(6);
  for (double& v : x.values()) v = rng.uniform(0, 1);
  std::copy(x.row(3).begin(), x.row(3).end(), x.row(15).begin());
  SkipGramConfig cfg;
  cfg.dims = 8;
  for (std::size_t epochs : {0u, 1u, 2u}) {
    cfg.epochs = epochs;
    const Attri2VecResult r = train_attri2vec(g, x, WalkConfig{1, 1, 8, 1, 2}, cfg);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(r.images(3, j), r.images(15, j));
  }
}

TEST(Attri2Vec, ZeroFeaturesDegenerate) {
  Rng rng(7);
  Attri2VecParams p = init_attri2vec(4, 3, 2, rng);
  const FeatureMatrix x(4, 3, 0.0);
  EXPECT_EQ(attri2vec_image(p, x.row(0)), (Vector{0.5, 0.5}));
  const auto samples = random_samples(4, 5, 2, rng);
  Attri2VecParams g{Matrix(2, 3), Matrix(4, 2)};
  attri2vec_loss(p, x, samples, &g);
  for (double v : g.w_map.values()) EXPECT_EQ(v, 0.0);

  const Graph graph = barbell();
  SkipGramConfig cfg;
  cfg.dims = 4;
  cfg.epochs = 1;
  const Attri2VecResult r = train_attri2vec(graph, FeatureMatrix(20, 3, 0.0),
                                            WalkConfig{1, 1, 6, 1, 2}, cfg);
  for (double v : r.images.values()) EXPECT_EQ(v, 0.5);
}

TEST(Attri2Vec, FeatureMismatch) {
  Rng rng(8);
  Attri2VecParams p = init_attri2vec(4, 3, 2, rng);
  const std::vector<PairSample> samples = {{0, 1, {2}}};
  EXPECT_THROW(attri2vec_loss(p, FeatureMatrix(4, 5), samples, nullptr), ConfigError);
}

TEST(Attri2Vec, BarbellSeparation) {
  const Graph g = barbell();
  FeatureMatrix x(20, 20, 0.0);
  for (NodeId v = 0; v < 20; ++v) x(v, v) = 1.0;
  SkipGramConfig cfg;
  cfg.dims = 16;
  cfg.epochs = 5;
  cfg.seed = 3;
  const Attri2VecResult r = train_attri2vec(g, x, WalkConfig{1, 1, 20, 10, 5}, cfg);
  Matrix centered = r.images;
  for (std::size_t j = 0; j < 16; ++j) {
    double mean = 0;
    for (NodeId v = 0; v < 20; ++v) mean += centered(v, j) / 20;
    for (NodeId v = 0; v < 20; ++v) centered(v, j) -= mean;
  }
  const auto [intra, inter] = clique_similarity(centered);
  EXPECT_GT(intra, inter);
}
