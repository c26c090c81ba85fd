#include "coauthornet/sage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "coauthornet/errors.hpp"

namespace coauthornet {

std::string_view to_string(Aggregator a) {
  return a == Aggregator::kMean ? "mean" : "maxpool";
}

Aggregator parse_aggregator(std::string_view s) {
  if (s == "mean") return Aggregator::kMean;
  if (s == "maxpool" || s == "max-pool") return Aggregator::kMaxPool;
  throw ConfigError("unknown aggregator '" + std::string(s) + "'");
}

std::vector<ParamView> SageParams::blocks() {
  std::vector<ParamView> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "sage.l" + std::to_string(l);
    out.push_back({prefix + ".weight", layers[l].weight.values()});
    if (aggregator == Aggregator::kMaxPool) {
      out.push_back({prefix + ".pool_weight", layers[l].pool_weight.values()});
      out.push_back({prefix + ".pool_bias", layers[l].pool_bias});
    }
  }
  return out;
}

std::vector<ConstParamView> SageParams::blocks() const {
  std::vector<ConstParamView> out;
  for (auto& b : const_cast<SageParams*>(this)->blocks()) out.push_back({b.name, b.values});
  return out;
}

SageParams SageParams::zeros_like() const {
  SageParams z = *this;
  for (auto& b : z.blocks()) std::fill(b.values.begin(), b.values.end(), 0.0);
  return z;
}

SageParams init_sage(std::size_t input_dim, std::span<const std::size_t> dims,
                     Aggregator aggregator, Activation activation, Rng& rng) {
  if (dims.empty()) throw ConfigError("GraphSAGE needs at least one layer");
  SageParams p;
  p.aggregator = aggregator;
  p.activation = activation;
  std::size_t in = input_dim;
  for (std::size_t out : dims) {
    if (out == 0 || in == 0) throw ConfigError("GraphSAGE layer dimensions must be >= 1");
    SageLayer layer;
    layer.weight = Matrix(out, 2 * in);
    xavier_uniform(layer.weight, rng);
    if (aggregator == Aggregator::kMaxPool) {
      layer.pool_weight = Matrix(in, in);
      xavier_uniform(layer.pool_weight, rng);
      layer.pool_bias.assign(in, 0.0);
    }
    p.layers.push_back(std::move(layer));
    in = out;
  }
  return p;
}

SagePlan build_sage_plan(const Graph& g, std::span<const NodeId> targets, std::size_t num_layers,
                         const std::optional<std::vector<std::size_t>>& sample_sizes,
                         Rng* rng) {
  if (sample_sizes && (sample_sizes->size() != num_layers || rng == nullptr)) {
    throw ConfigError("sampled plan needs one sample size per layer and a generator");
  }
  SagePlan plan;
  plan.nodes.resize(num_layers + 1);
  plan.neighbors.resize(num_layers);

  std::unordered_map<NodeId, std::uint32_t> local;
  auto& top = plan.nodes[num_layers];
  for (NodeId t : targets) {
    if (t >= g.num_nodes()) {
      throw BoundsError("node " + std::to_string(t) + " out of range (n = " +
                        std::to_string(g.num_nodes()) + ")");
    }
    auto [it, inserted] = local.try_emplace(t, static_cast<std::uint32_t>(top.size()));
    if (inserted) top.push_back(t);
    plan.targets.push_back(it->second);
  }

  for (std::size_t l = num_layers; l-- > 0;) {
    const auto& upper = plan.nodes[l + 1];
    auto& lower = plan.nodes[l];
    lower = upper;
    auto& nbrs = plan.neighbors[l];
    nbrs.resize(upper.size());
    std::vector<NodeId> picked;
    for (std::size_t i = 0; i < upper.size(); ++i) {
      const NodeId v = upper[i];
      if (sample_sizes) {
        picked = sample_neighbors(g, v, (*sample_sizes)[l], *rng);
      } else {
        auto nb = g.neighbors(v);
        picked.assign(nb.begin(), nb.end());
        if (picked.empty()) picked.push_back(v);
      }
      nbrs[i].reserve(picked.size());
      for (NodeId u : picked) {
        auto [it, inserted] = local.try_emplace(u, static_cast<std::uint32_t>(lower.size()));
        if (inserted) lower.push_back(u);
        nbrs[i].push_back(it->second);
      }
    }
  }
  return plan;
}

Matrix sage_forward(const SageParams& params, const FeatureMatrix& features,
                    const SagePlan& plan, SageCache* cache) {
  const std::size_t num_layers = params.layers.size();
  if (plan.nodes.size() != num_layers + 1) {
    throw DimensionError("plan covers " + std::to_string(plan.nodes.size() - 1) +
                         " layers, model has " + std::to_string(num_layers));
  }
  if (features.cols() != params.input_dim()) {
    throw DimensionError("features have dimension " + std::to_string(features.cols()) +
                         ", first GraphSAGE layer expects " +
                         std::to_string(params.input_dim()));
  }
  SageCache local_cache;
  SageCache& c = cache ? *cache : local_cache;
  c.h.assign(num_layers + 1, Matrix());
  c.aggregate.assign(num_layers, Matrix());
  c.pooled.assign(num_layers, Matrix());
  c.argmax.assign(num_layers, {});
  c.activated.assign(num_layers, Matrix());
  c.norms.assign(num_layers, Vector());

  const auto& bottom = plan.nodes[0];
  c.h[0] = Matrix(bottom.size(), features.cols());
  for (std::size_t i = 0; i < bottom.size(); ++i) {
    if (bottom[i] >= features.rows()) {
      throw BoundsError("node " + std::to_string(bottom[i]) + " has no feature row");
    }
    std::copy_n(features.row(bottom[i]).begin(), features.cols(), c.h[0].row(i).begin());
  }

  Vector concat;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const SageLayer& layer = params.layers[l];
    const std::size_t d_in = layer.weight.cols() / 2;
    const std::size_t d_out = layer.weight.rows();
    if (c.h[l].cols() != d_in) throw DimensionError("GraphSAGE layer dimensions do not conform");
    const Matrix& h = c.h[l];
    const std::size_t n_up = plan.nodes[l + 1].size();
    const auto& nbrs = plan.neighbors[l];

    Matrix& agg = c.aggregate[l];
    agg = Matrix(n_up, d_in);
    if (params.aggregator == Aggregator::kMean) {
      for (std::size_t i = 0; i < n_up; ++i) {
        const double scale = 1.0 / static_cast<double>(nbrs[i].size());
        for (auto u : nbrs[i]) axpy(scale, h.row(u), agg.row(i));
      }
    } else {
      Matrix& pooled = c.pooled[l];
      pooled = Matrix(h.rows(), d_in);
      for (std::size_t r = 0; r < h.rows(); ++r) {
        auto out = pooled.row(r);
        matvec(layer.pool_weight, h.row(r), out);
        for (std::size_t j = 0; j < d_in; ++j) {
          out[j] = activate(params.activation, out[j] + layer.pool_bias[j]);
        }
      }
      auto& arg = c.argmax[l];
      arg.assign(n_up * d_in, 0);
      for (std::size_t i = 0; i < n_up; ++i) {
        for (std::size_t j = 0; j < d_in; ++j) {
          double best = -std::numeric_limits<double>::infinity();
          std::uint32_t best_u = nbrs[i].front();
          for (auto u : nbrs[i]) {
            if (pooled(u, j) > best) {
              best = pooled(u, j);
              best_u = u;
            }
          }
          agg(i, j) = best;
          arg[i * d_in + j] = best_u;
        }
      }
    }

    Matrix& act = c.activated[l];
    act = Matrix(n_up, d_out);
    c.h[l + 1] = Matrix(n_up, d_out);
    c.norms[l].assign(n_up, 1.0);
    concat.resize(2 * d_in);
    for (std::size_t i = 0; i < n_up; ++i) {
      std::copy_n(h.row(i).begin(), d_in, concat.begin());
      std::copy_n(agg.row(i).begin(), d_in, concat.begin() + static_cast<std::ptrdiff_t>(d_in));
      auto a = act.row(i);
      matvec(layer.weight, concat, a);
      for (double& v : a) v = activate(params.activation, v);
      auto out = c.h[l + 1].row(i);
      std::copy(a.begin(), a.end(), out.begin());
      if (params.normalize) {
        const double norm = l2_norm(a);
        if (norm > 0.0) {
          c.norms[l][i] = norm;
          for (double& v : out) v /= norm;
        }
      }
    }
  }
  return c.h[num_layers];
}

void sage_backward(const SageParams& params, const SagePlan& plan, const SageCache& cache,
                   const Matrix& grad_output, SageParams& grads) {
  const std::size_t num_layers = params.layers.size();
  Matrix upper_grad = grad_output;
  Vector concat, g_z, g_concat, g_pz;
  for (std::size_t l = num_layers; l-- > 0;) {
    const SageLayer& layer = params.layers[l];
    SageLayer& glayer = grads.layers[l];
    const std::size_t d_in = layer.weight.cols() / 2;
    const std::size_t d_out = layer.weight.rows();
    const Matrix& h = cache.h[l];
    const Matrix& agg = cache.aggregate[l];
    const auto& nbrs = plan.neighbors[l];
    const std::size_t n_up = plan.nodes[l + 1].size();
    const bool need_lower = l > 0;

    Matrix lower_grad = need_lower ? Matrix(h.rows(), d_in) : Matrix();
    Matrix pooled_grad =
        params.aggregator == Aggregator::kMaxPool ? Matrix(h.rows(), d_in) : Matrix();
    concat.resize(2 * d_in);
    g_z.resize(d_out);
    g_concat.resize(2 * d_in);

    for (std::size_t i = 0; i < n_up; ++i) {
      auto g = upper_grad.row(i);
      auto a = cache.activated[l].row(i);
      auto y = cache.h[l + 1].row(i);
      const double norm = cache.norms[l][i];
      const bool normalized = params.normalize && norm > 0.0 && l2_norm(a) > 0.0;
      const double yg = normalized ? dot(y, g) : 0.0;
      bool any = false;
      for (std::size_t k = 0; k < d_out; ++k) {
        const double g_a = normalized ? (g[k] - y[k] * yg) / norm : g[k];
        g_z[k] = g_a * activation_grad_from_output(params.activation, a[k]);
        any = any || g_z[k] != 0.0;
      }
      if (!any) continue;
      std::copy_n(h.row(i).begin(), d_in, concat.begin());
      std::copy_n(agg.row(i).begin(), d_in, concat.begin() + static_cast<std::ptrdiff_t>(d_in));
      outer_add(glayer.weight, 1.0, g_z, concat);
      std::fill(g_concat.begin(), g_concat.end(), 0.0);
      matvec_transposed_add(layer.weight, g_z, g_concat);
      const std::span<const double> g_self(g_concat.data(), d_in);
      const std::span<const double> g_agg(g_concat.data() + d_in, d_in);
      if (need_lower) axpy(1.0, g_self, lower_grad.row(i));
      if (params.aggregator == Aggregator::kMean) {
        if (need_lower) {
          const double scale = 1.0 / static_cast<double>(nbrs[i].size());
          for (auto u : nbrs[i]) axpy(scale, g_agg, lower_grad.row(u));
        }
      } else {
        const auto& arg = cache.argmax[l];
        for (std::size_t j = 0; j < d_in; ++j) pooled_grad(arg[i * d_in + j], j) += g_agg[j];
      }
    }

    if (params.aggregator == Aggregator::kMaxPool) {
      const Matrix& pooled = cache.pooled[l];
      g_pz.resize(d_in);
      for (std::size_t r = 0; r < h.rows(); ++r) {
        bool any = false;
        for (std::size_t j = 0; j < d_in; ++j) {
          g_pz[j] = pooled_grad(r, j) * activation_grad_from_output(params.activation, pooled(r, j));
          any = any || g_pz[j] != 0.0;
        }
        if (!any) continue;
        outer_add(glayer.pool_weight, 1.0, g_pz, h.row(r));
        axpy(1.0, g_pz, glayer.pool_bias);
        if (need_lower) matvec_transposed_add(layer.pool_weight, g_pz, lower_grad.row(r));
      }
    }
    upper_grad = std::move(lower_grad);
  }
}

Matrix sage_embed_all(const Graph& g, const FeatureMatrix& features, const SageParams& params,
                      const std::optional<std::vector<std::size_t>>& sample_sizes,
                      std::uint64_t seed) {
  std::vector<NodeId> all(g.num_nodes());
  for (NodeId v = 0; v < all.size(); ++v) all[v] = v;
  Rng rng(seed);
  const SagePlan plan = build_sage_plan(g, all, params.layers.size(), sample_sizes, &rng);
  return sage_forward(params, features, plan);
}

double pairwise_ns_loss(const Matrix& embeddings, std::span<const PairSample> samples,
                        Matrix* grad_embeddings) {
  if (samples.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(samples.size());
  double loss = 0.0;
  auto term = [&](NodeId center, NodeId other, double sign) {
    // sign = +1 for the observed context, -1 for a negative.
    const double s = dot(embeddings.row(center), embeddings.row(other));
    loss -= log_sigmoid(sign * s);
    if (!grad_embeddings) return;
    const double coeff = scale * (sign > 0 ? sigmoid(s) - 1.0 : sigmoid(s));
    axpy(coeff, embeddings.row(other), grad_embeddings->row(center));
    axpy(coeff, embeddings.row(center), grad_embeddings->row(other));
  };
  for (const auto& sample : samples) {
    term(sample.center, sample.context, 1.0);
    for (NodeId n : sample.negatives) term(sample.center, n, -1.0);
  }
  return loss * scale;
}

double sage_unsupervised_loss(const SageParams& params, const FeatureMatrix& features,
                              const SagePlan& plan, std::span<const PairSample> samples,
                              SageParams* grads) {
  std::unordered_map<NodeId, NodeId> local;
  const auto& top = plan.nodes.back();
  for (std::size_t i = 0; i < top.size(); ++i) local.emplace(top[i], static_cast<NodeId>(i));
  auto to_local = [&](NodeId v) {
    auto it = local.find(v);
    if (it == local.end()) throw ConsistencyError("node " + std::to_string(v) + " not in plan");
    return it->second;
  };
  std::vector<PairSample> local_samples;
  local_samples.reserve(samples.size());
  for (const auto& s : samples) {
    PairSample ls{to_local(s.center), to_local(s.context), {}};
    for (NodeId n : s.negatives) ls.negatives.push_back(to_local(n));
    local_samples.push_back(std::move(ls));
  }
  SageCache cache;
  const Matrix z = sage_forward(params, features, plan, grads ? &cache : nullptr);
  Matrix gz = grads ? Matrix(z.rows(), z.cols()) : Matrix();
  const double loss = pairwise_ns_loss(z, local_samples, grads ? &gz : nullptr);
  if (grads) sage_backward(params, plan, cache, gz, *grads);
  return loss;
}

SageParams train_sage_unsupervised(const Graph& g, const FeatureMatrix& features,
                                   const SageUnsupervisedConfig& cfg) {
  if (features.rows() != g.num_nodes()) {
    throw DimensionError("feature matrix has " + std::to_string(features.rows()) +
                         " rows for " + std::to_string(g.num_nodes()) + " nodes");
  }
  if (cfg.sample_sizes.size() != cfg.dims.size()) {
    throw ConfigError("GraphSAGE needs one sample size per layer");
  }
  Rng rng(derive_seed(cfg.seed, "sage-unsupervised"));
  SageParams params = init_sage(features.cols(), cfg.dims, cfg.aggregator, cfg.activation, rng);
  params.normalize = cfg.normalize;

  std::vector<AdamState> adam;
  for (auto& b : params.blocks()) adam.emplace_back(b.values.size(), AdamConfig{cfg.learning_rate});

  const std::optional<std::vector<std::size_t>> sizes = cfg.sample_sizes;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const WalkCorpus corpus = generate_walks(g, cfg.walk, derive_seed(cfg.seed, "sage-walks", epoch));
    std::vector<NodePair> pairs = build_cooccurrence(corpus, cfg.walk.window);
    if (pairs.empty()) break;
    rng.shuffle(pairs);
    const UnigramSampler sampler(corpus, g.num_nodes());

    for (std::size_t start = 0; start < pairs.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(pairs.size(), start + cfg.batch_size);
      std::vector<PairSample> batch;
      std::vector<NodeId> targets;
      for (std::size_t i = start; i < end; ++i) {
        PairSample s{pairs[i].first, pairs[i].second, {}};
        for (std::size_t j = 0; j < cfg.negatives; ++j) {
          const NodeId n = sampler.sample(rng);
          if (n != s.context) s.negatives.push_back(n);
        }
        targets.push_back(s.center);
        targets.push_back(s.context);
        targets.insert(targets.end(), s.negatives.begin(), s.negatives.end());
        batch.push_back(std::move(s));
      }
      const SagePlan plan = build_sage_plan(g, targets, params.layers.size(), sizes, &rng);
      SageParams grads = params.zeros_like();
      const double loss = sage_unsupervised_loss(params, features, plan, batch, &grads);
      if (!std::isfinite(loss)) {
        throw DivergenceError("GraphSAGE unsupervised loss is not finite in epoch " +
                              std::to_string(epoch), static_cast<int>(epoch));
      }
      auto pb = params.blocks();
      auto gb = grads.blocks();
      for (std::size_t k = 0; k < pb.size(); ++k) adam_step(pb[k].values, gb[k].values, adam[k], pb[k].name);
    }
  }
  return params;
}

}  // namespace coauthornet
