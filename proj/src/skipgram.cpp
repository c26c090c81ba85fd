#include "coauthornet/skipgram.hpp"

#include <algorithm>
#include <string>

#include "coauthornet/errors.hpp"
#include "coauthornet/nn.hpp"

namespace coauthornet {

namespace {

// Loss and d loss / d score for the context (index 0) and each negative.
double ns_coefficients(std::span<const double> center, const Matrix& out_table,
                       const PairSample& sample, std::vector<double>& coeffs) {
  coeffs.resize(1 + sample.negatives.size());
  const double pos = dot(center, out_table.row(sample.context));
  double loss = -log_sigmoid(pos);
  coeffs[0] = sigmoid(pos) - 1.0;
  for (std::size_t j = 0; j < sample.negatives.size(); ++j) {
    const double neg = dot(center, out_table.row(sample.negatives[j]));
    loss -= log_sigmoid(-neg);
    coeffs[j + 1] = sigmoid(neg);
  }
  return loss;
}

NodeId coeff_row(const PairSample& s, std::size_t k) {
  return k == 0 ? s.context : s.negatives[k - 1];
}

struct DecayingRate {
  double start;
  double total;
  double at(double done) const { return start * std::max(1e-4, 1.0 - done / total); }
};

void check_config(const SkipGramConfig& cfg) {
  if (cfg.dims == 0) throw ConfigError("embedding dims must be >= 1");
  if (cfg.negatives == 0) throw ConfigError("negatives must be >= 1");
}

std::size_t count_pairs(const WalkCorpus& corpus, std::size_t window) {
  std::size_t total = 0;
  for (const auto& walk : corpus) {
    const std::size_t len = walk.size();
    for (std::size_t i = 0; i < len; ++i) {
      total += std::min(window, i) + std::min(window, len - 1 - i);
    }
  }
  return total;
}

// Calls visit(center, context) for every window pair of the corpus.
template <typename Visit>
void for_each_pair(const WalkCorpus& corpus, std::size_t window, Visit&& visit) {
  for (const auto& walk : corpus) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      const std::size_t lo = i >= window ? i - window : 0;
      const std::size_t hi = std::min(walk.size() - 1, i + window);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) visit(walk[i], walk[j]);
      }
    }
  }
}

void draw_negatives(const UnigramSampler& sampler, std::size_t m, PairSample& s, Rng& rng) {
  s.negatives.clear();
  for (std::size_t j = 0; j < m; ++j) {
    const NodeId n = sampler.sample(rng);
    if (n != s.context) s.negatives.push_back(n);
  }
}

}  // namespace

double negative_sampling_loss(std::span<const double> center, const Matrix& out_table,
                              const PairSample& sample, std::span<double> grad_center,
                              Matrix* grad_out) {
  std::vector<double> coeffs;
  const double loss = ns_coefficients(center, out_table, sample, coeffs);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const NodeId row = coeff_row(sample, k);
    if (!grad_center.empty()) axpy(coeffs[k], out_table.row(row), grad_center);
    if (grad_out) axpy(coeffs[k], center, grad_out->row(row));
  }
  return loss;
}

std::vector<ParamView> SkipGramParams::blocks() {
  return {{"skipgram.w_in", w_in.values()}, {"skipgram.w_out", w_out.values()}};
}

SkipGramParams init_skipgram(std::size_t num_nodes, std::size_t dims, Rng& rng) {
  SkipGramParams p{Matrix(num_nodes, dims), Matrix(num_nodes, dims)};
  xavier_uniform(p.w_in, rng);
  xavier_uniform(p.w_out, rng);
  return p;
}

double skipgram_loss(const SkipGramParams& params, std::span<const PairSample> samples,
                     SkipGramParams* grads) {
  double loss = 0.0;
  for (const auto& s : samples) {
    std::span<double> gc;
    if (grads) gc = grads->w_in.row(s.center);
    loss += negative_sampling_loss(params.w_in.row(s.center), params.w_out, s, gc,
                                   grads ? &grads->w_out : nullptr);
  }
  return loss;
}

SkipGramParams train_skipgram(const WalkCorpus& corpus, std::size_t num_nodes,
                              std::size_t window, const SkipGramConfig& cfg) {
  check_config(cfg);
  Rng rng(derive_seed(cfg.seed, "skipgram"));
  SkipGramParams params = init_skipgram(num_nodes, cfg.dims, rng);
  const std::size_t pairs = count_pairs(corpus, window);
  if (pairs == 0) throw EmptyCorpusError("walk corpus yields no training pairs");
  const UnigramSampler sampler(corpus, num_nodes);
  const DecayingRate rate{cfg.learning_rate, static_cast<double>(pairs * cfg.epochs)};

  PairSample sample;
  std::vector<double> coeffs;
  Vector grad_center(cfg.dims);
  double done = 0.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for_each_pair(corpus, window, [&](NodeId center, NodeId context) {
      sample.center = center;
      sample.context = context;
      draw_negatives(sampler, cfg.negatives, sample, rng);
      const double lr = rate.at(done);
      done += 1.0;
      auto c = params.w_in.row(center);
      ns_coefficients(c, params.w_out, sample, coeffs);
      std::fill(grad_center.begin(), grad_center.end(), 0.0);
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const NodeId row = coeff_row(sample, k);
        axpy(coeffs[k], params.w_out.row(row), grad_center);
        axpy(-lr * coeffs[k], c, params.w_out.row(row));
      }
      axpy(-lr, grad_center, c);
    });
  }
  return params;
}

std::vector<ParamView> Attri2VecParams::blocks() {
  return {{"attri2vec.w_map", w_map.values()}, {"attri2vec.w_out", w_out.values()}};
}

Attri2VecParams init_attri2vec(std::size_t num_nodes, std::size_t feature_dim,
                               std::size_t dims, Rng& rng) {
  Attri2VecParams p{Matrix(dims, feature_dim), Matrix(num_nodes, dims)};
  xavier_uniform(p.w_map, rng);
  xavier_uniform(p.w_out, rng);
  return p;
}

Vector attri2vec_image(const Attri2VecParams& params, std::span<const double> x) {
  Vector f(params.w_map.rows());
  matvec(params.w_map, x, f);
  for (double& v : f) v = sigmoid(v);
  return f;
}

double attri2vec_loss(const Attri2VecParams& params, const FeatureMatrix& features,
                      std::span<const PairSample> samples, Attri2VecParams* grads) {
  if (features.cols() != params.w_map.cols()) {
    throw ConfigError("attri2vec mapping expects " + std::to_string(params.w_map.cols()) +
                         " features, matrix has " + std::to_string(features.cols()));
  }
  double loss = 0.0;
  Vector grad_f(params.w_map.rows());
  for (const auto& s : samples) {
    const auto x = features.row(s.center);
    const Vector f = attri2vec_image(params, x);
    std::fill(grad_f.begin(), grad_f.end(), 0.0);
    loss += negative_sampling_loss(f, params.w_out, s, grad_f, grads ? &grads->w_out : nullptr);
    if (grads) {
      for (std::size_t r = 0; r < f.size(); ++r) grad_f[r] *= f[r] * (1.0 - f[r]);
      outer_add(grads->w_map, 1.0, grad_f, x);
    }
  }
  return loss;
}

Attri2VecResult train_attri2vec(const Graph& g, const FeatureMatrix& features,
                                const WalkConfig& walk, const SkipGramConfig& cfg) {
  check_config(cfg);
  if (features.rows() != g.num_nodes()) {
    throw ConfigError("feature matrix has " + std::to_string(features.rows()) +
                         " rows for " + std::to_string(g.num_nodes()) + " nodes");
  }
  Rng rng(derive_seed(cfg.seed, "attri2vec"));
  Attri2VecParams params = init_attri2vec(g.num_nodes(), features.cols(), cfg.dims, rng);
  const WalkCorpus corpus = generate_walks(g, walk, derive_seed(cfg.seed, "attri2vec-walks"));
  const std::size_t pairs = count_pairs(corpus, walk.window);

  if (pairs > 0) {
    const UnigramSampler sampler(corpus, g.num_nodes());
    const DecayingRate rate{cfg.learning_rate, static_cast<double>(pairs * cfg.epochs)};
    PairSample sample;
    std::vector<double> coeffs;
    Vector grad_f(cfg.dims);
    double done = 0.0;
    // The image of a center is computed once per walk position; its window's
    // gradient is accumulated and applied to W_map in one step.
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (const auto& w : corpus) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          const std::size_t lo = i >= walk.window ? i - walk.window : 0;
          const std::size_t hi = std::min(w.size() - 1, i + walk.window);
          if (hi == lo) continue;
          const auto x = features.row(w[i]);
          const Vector f = attri2vec_image(params, x);
          std::fill(grad_f.begin(), grad_f.end(), 0.0);
          double lr = 0.0;
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            sample.center = w[i];
            sample.context = w[j];
            draw_negatives(sampler, cfg.negatives, sample, rng);
            lr = rate.at(done);
            done += 1.0;
            ns_coefficients(f, params.w_out, sample, coeffs);
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
              const NodeId row = coeff_row(sample, k);
              axpy(lr * coeffs[k], params.w_out.row(row), grad_f);
              axpy(-lr * coeffs[k], f, params.w_out.row(row));
            }
          }
          for (std::size_t r = 0; r < f.size(); ++r) grad_f[r] *= f[r] * (1.0 - f[r]);
          outer_add(params.w_map, -1.0, grad_f, x);
        }
      }
    }
  }

  Attri2VecResult result{Matrix(g.num_nodes(), cfg.dims), std::move(params)};
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const Vector f = attri2vec_image(result.params, features.row(v));
    std::copy(f.begin(), f.end(), result.images.row(v).begin());
  }
  return result;
}

}  // namespace coauthornet
