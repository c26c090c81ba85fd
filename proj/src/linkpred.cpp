#include "coauthornet/linkpred.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "coauthornet/errors.hpp"

namespace coauthornet {

std::string_view to_string(LinkOperator op) {
  switch (op) {
    case LinkOperator::kL1: return "l1";
    case LinkOperator::kL2: return "l2";
    case LinkOperator::kHadamard: return "hadamard";
    case LinkOperator::kAverage: return "average";
    case LinkOperator::kInnerProduct: return "inner";
  }
  return "unknown";
}

std::string_view display_name(LinkOperator op) {
  switch (op) {
    case LinkOperator::kL1: return "L1";
    case LinkOperator::kL2: return "L2";
    case LinkOperator::kHadamard: return "Had";
    case LinkOperator::kAverage: return "Avg";
    case LinkOperator::kInnerProduct: return "IP";
  }
  return "?";
}

LinkOperator parse_link_operator(std::string_view s) {
  if (s == "l1" || s == "L1") return LinkOperator::kL1;
  if (s == "l2" || s == "L2") return LinkOperator::kL2;
  if (s == "hadamard" || s == "had" || s == "Had") return LinkOperator::kHadamard;
  if (s == "average" || s == "avg" || s == "Avg") return LinkOperator::kAverage;
  if (s == "inner" || s == "ip" || s == "IP" || s == "inner-product") {
    return LinkOperator::kInnerProduct;
  }
  throw ConfigError("unknown link operator '" + std::string(s) + "'");
}

std::size_t operator_output_dim(LinkOperator op, std::size_t dim) {
  return op == LinkOperator::kInnerProduct ? 1 : dim;
}

Vector link_embed(std::span<const double> hu, std::span<const double> hv, LinkOperator op) {
  if (hu.size() != hv.size()) {
    throw DimensionError("link operator inputs differ in size (" + std::to_string(hu.size()) +
                         " vs " + std::to_string(hv.size()) + ")");
  }
  if (op == LinkOperator::kInnerProduct) return {dot(hu, hv)};
  Vector out(hu.size());
  for (std::size_t i = 0; i < hu.size(); ++i) {
    switch (op) {
      case LinkOperator::kL1: out[i] = std::abs(hu[i] - hv[i]); break;
      case LinkOperator::kL2: out[i] = (hu[i] - hv[i]) * (hu[i] - hv[i]); break;
      case LinkOperator::kHadamard: out[i] = hu[i] * hv[i]; break;
      case LinkOperator::kAverage: out[i] = (hu[i] + hv[i]) / 2.0; break;
      case LinkOperator::kInnerProduct: break;
    }
  }
  return out;
}

void link_embed_backward(std::span<const double> hu, std::span<const double> hv, LinkOperator op,
                         std::span<const double> grad_out, std::span<double> grad_u,
                         std::span<double> grad_v) {
  if (op == LinkOperator::kInnerProduct) {
    axpy(grad_out[0], hv, grad_u);
    axpy(grad_out[0], hu, grad_v);
    return;
  }
  for (std::size_t i = 0; i < hu.size(); ++i) {
    const double g = grad_out[i];
    const double diff = hu[i] - hv[i];
    switch (op) {
      case LinkOperator::kL1: {
        const double s = diff > 0 ? 1.0 : diff < 0 ? -1.0 : 0.0;
        grad_u[i] += s * g;
        grad_v[i] -= s * g;
        break;
      }
      case LinkOperator::kL2:
        grad_u[i] += 2.0 * diff * g;
        grad_v[i] -= 2.0 * diff * g;
        break;
      case LinkOperator::kHadamard:
        grad_u[i] += hv[i] * g;
        grad_v[i] += hu[i] * g;
        break;
      case LinkOperator::kAverage:
        grad_u[i] += 0.5 * g;
        grad_v[i] += 0.5 * g;
        break;
      case LinkOperator::kInnerProduct: break;
    }
  }
}

AugmentedAuthorFeatures augment_author_features(const FeatureMatrix& interests,
                                                const AuthorTable& authors,
                                                std::span<const std::string> paper_tokens,
                                                const EmbeddingMatrix& paper_embeddings,
                                                PaperPooling pooling) {
  if (interests.rows() < authors.size()) {
    throw ConsistencyError("interest matrix has " + std::to_string(interests.rows()) +
                           " rows for " + std::to_string(authors.size()) + " authors");
  }
  const std::size_t k = interests.cols();
  const std::size_t d = paper_embeddings.dim();
  AugmentedAuthorFeatures out{FeatureMatrix(authors.size(), k + d), 0};
  for (NodeId a = 0; a < authors.size(); ++a) {
    auto row = out.matrix.row(a);
    std::copy_n(interests.row(a).begin(), k, row.begin());
    if (d == 0) continue;
    auto block = row.subspan(k);
    std::size_t found = 0;
    for (NodeId p : authors.papers[a]) {
      auto hit = p < paper_tokens.size() ? paper_embeddings.find(paper_tokens[p]) : std::nullopt;
      if (!hit) {
        ++out.missing_papers;
        continue;
      }
      axpy(1.0, paper_embeddings.row(*hit), block);
      ++found;
    }
    if (pooling == PaperPooling::kMean && found > 1) {
      for (double& v : block) v /= static_cast<double>(found);
    }
  }
  if (out.missing_papers > 0) {
    spdlog::info("author features: {} author papers have no embedding", out.missing_papers);
  }
  return out;
}

std::vector<ParamView> LinkModelParams::blocks() {
  auto out = sage.blocks();
  if (has_hidden()) {
    out.push_back({"classifier.hidden_weight", hidden_weight.values()});
    out.push_back({"classifier.hidden_bias", hidden_bias});
  }
  out.push_back({"classifier.weight", classifier_weight});
  out.push_back({"classifier.bias", {&classifier_bias, 1}});
  return out;
}

LinkModelParams LinkModelParams::zeros_like() const {
  LinkModelParams z = *this;
  for (auto& b : z.blocks()) std::fill(b.values.begin(), b.values.end(), 0.0);
  return z;
}

LinkModelParams init_link_model(std::size_t input_dim, const LinkModelConfig& cfg, Rng& rng) {
  LinkModelParams p;
  p.sage = init_sage(input_dim, cfg.dims, cfg.aggregator, cfg.activation, rng);
  p.sage.normalize = cfg.normalize;
  p.op = cfg.op;
  std::size_t width = operator_output_dim(cfg.op, p.sage.output_dim());
  if (cfg.hidden > 0) {
    p.hidden_weight = Matrix(cfg.hidden, width);
    xavier_uniform(p.hidden_weight, rng);
    p.hidden_bias.assign(cfg.hidden, 0.0);
    width = cfg.hidden;
  }
  Matrix w(1, width);
  xavier_uniform(w, rng);
  p.classifier_weight.assign(w.values().begin(), w.values().end());
  return p;
}

double link_logit(const LinkModelParams& params, std::span<const double> hu,
                  std::span<const double> hv) {
  Vector e = link_embed(hu, hv, params.op);
  if (params.has_hidden()) e = dense_forward(params.hidden_weight, params.hidden_bias, e, Activation::kSigmoid);
  if (e.size() != params.classifier_weight.size()) {
    throw DimensionError("classifier expects " + std::to_string(params.classifier_weight.size()) +
                         " inputs, link embedding has " + std::to_string(e.size()));
  }
  return dot(params.classifier_weight, e) + params.classifier_bias;
}

namespace {

std::unordered_map<NodeId, std::uint32_t> top_index(const SagePlan& plan) {
  std::unordered_map<NodeId, std::uint32_t> local;
  const auto& top = plan.nodes.back();
  for (std::size_t i = 0; i < top.size(); ++i) local.emplace(top[i], static_cast<std::uint32_t>(i));
  return local;
}

std::uint32_t lookup(const std::unordered_map<NodeId, std::uint32_t>& local, NodeId v) {
  auto it = local.find(v);
  if (it == local.end()) throw ConsistencyError("node " + std::to_string(v) + " not in plan");
  return it->second;
}

double clamped_bce(int label, double p) {
  p = std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

}  // namespace

double link_model_loss(const LinkModelParams& params, const FeatureMatrix& features,
                       const SagePlan& plan, std::span<const LabeledPair> samples,
                       LinkModelParams* grads) {
  if (samples.empty()) return 0.0;
  SageCache cache;
  const Matrix h = sage_forward(params.sage, features, plan, grads ? &cache : nullptr);
  const auto local = top_index(plan);
  Matrix gh = grads ? Matrix(h.rows(), h.cols()) : Matrix();
  const double scale = 1.0 / static_cast<double>(samples.size());
  double loss = 0.0;
  for (const auto& s : samples) {
    const auto iu = lookup(local, s.u);
    const auto iv = lookup(local, s.v);
    const Vector e = link_embed(h.row(iu), h.row(iv), params.op);
    Vector hidden;
    if (params.has_hidden()) {
      hidden = dense_forward(params.hidden_weight, params.hidden_bias, e, Activation::kSigmoid);
    }
    const Vector& top = params.has_hidden() ? hidden : e;
    const double p = sigmoid(dot(params.classifier_weight, top) + params.classifier_bias);
    loss += clamped_bce(s.label, p);
    if (!grads) continue;
    const double g_logit = (p - static_cast<double>(s.label)) * scale;
    axpy(g_logit, top, grads->classifier_weight);
    grads->classifier_bias += g_logit;
    Vector g_e(e.size(), 0.0);
    if (params.has_hidden()) {
      Vector g_hz(hidden.size());
      for (std::size_t j = 0; j < hidden.size(); ++j) {
        g_hz[j] = g_logit * params.classifier_weight[j] * hidden[j] * (1.0 - hidden[j]);
      }
      outer_add(grads->hidden_weight, 1.0, g_hz, e);
      axpy(1.0, g_hz, grads->hidden_bias);
      matvec_transposed_add(params.hidden_weight, g_hz, g_e);
    } else {
      axpy(g_logit, params.classifier_weight, g_e);
    }
    link_embed_backward(h.row(iu), h.row(iv), params.op, g_e, gh.row(iu), gh.row(iv));
  }
  if (grads) sage_backward(params.sage, plan, cache, gh, grads->sage);
  return loss * scale;
}

std::vector<double> predict_links(const LinkModelParams& params, const Graph& g,
                                  const FeatureMatrix& features,
                                  std::span<const std::pair<NodeId, NodeId>> pairs) {
  std::vector<NodeId> targets;
  targets.reserve(2 * pairs.size());
  for (const auto& [u, v] : pairs) {
    targets.push_back(u);
    targets.push_back(v);
  }
  const SagePlan plan =
      build_sage_plan(g, targets, params.sage.layers.size(), std::nullopt, nullptr);
  const Matrix h = sage_forward(params.sage, features, plan);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back(sigmoid(link_logit(params, h.row(plan.targets[2 * i]),
                                     h.row(plan.targets[2 * i + 1]))));
  }
  return out;
}

Graph training_graph(const Graph& g, const EdgeSplit& split) {
  const auto edges = positive_edges(split.train);
  return Graph::build(edges, g.num_nodes(), false);
}

LinkTrainResult train_link_model(const Graph& g, const FeatureMatrix& features,
                                 const EdgeSplit& split, const LinkModelConfig& cfg) {
  if (split.train.empty()) throw ConfigError("training partition is empty");
  if (cfg.sample_sizes.size() != cfg.dims.size()) {
    throw ConfigError("link model needs one sample size per GraphSAGE layer");
  }
  if (features.rows() != g.num_nodes()) {
    throw DimensionError("feature matrix has " + std::to_string(features.rows()) + " rows for " +
                         std::to_string(g.num_nodes()) + " authors");
  }
  const Graph train_graph = training_graph(g, split);
  Rng rng(derive_seed(cfg.seed, "link-model"));
  LinkTrainResult result;
  result.params = init_link_model(features.cols(), cfg, rng);
  LinkModelParams& params = result.params;

  {
    std::vector<NodeId> ends;
    for (const auto& s : split.train) {
      ends.push_back(s.u);
      ends.push_back(s.v);
    }
    const SagePlan full = build_sage_plan(train_graph, ends, params.sage.layers.size(), std::nullopt, nullptr);
    result.initial_loss = link_model_loss(params, features, full, split.train, nullptr);
  }
  if (cfg.epochs == 0) return result;

  std::vector<AdamState> adam;
  for (auto& b : params.blocks()) adam.emplace_back(b.values.size(), AdamConfig{cfg.learning_rate});

  std::vector<std::pair<NodeId, NodeId>> val_pairs;
  std::vector<int> val_labels;
  for (const auto& s : split.val) {
    val_pairs.emplace_back(s.u, s.v);
    val_labels.push_back(s.label);
  }

  const std::optional<std::vector<std::size_t>> sizes = cfg.sample_sizes;
  std::vector<LabeledPair> samples = split.train;
  LinkModelParams best = params;
  double best_auc = -1.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(samples);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < samples.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(samples.size(), start + cfg.batch_size);
      const std::span<const LabeledPair> batch(samples.data() + start, end - start);
      std::vector<NodeId> targets;
      for (const auto& s : batch) {
        targets.push_back(s.u);
        targets.push_back(s.v);
      }
      const SagePlan plan = build_sage_plan(train_graph, targets, params.sage.layers.size(), sizes, &rng);
      LinkModelParams grads = params.zeros_like();
      const double loss = link_model_loss(params, features, plan, batch, &grads);
      if (!std::isfinite(loss)) {
        throw DivergenceError("link model loss is not finite in epoch " + std::to_string(epoch),
                              static_cast<int>(epoch));
      }
      epoch_loss += loss * static_cast<double>(batch.size());
      auto pb = params.blocks();
      auto gb = grads.blocks();
      for (std::size_t k = 0; k < pb.size(); ++k) {
        try {
          adam_step(pb[k].values, gb[k].values, adam[k], pb[k].name);
        } catch (const DivergenceError& e) {
          throw DivergenceError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")",
                                static_cast<int>(epoch));
        }
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(samples.size());
    if (!val_pairs.empty()) {
      const auto scores = predict_links(params, train_graph, features, val_pairs);
      try {
        const auto m = compute_metrics(val_labels, scores);
        rec.val_accuracy = m.accuracy;
        rec.val_auc = m.auc_roc;
        rec.val_f1 = m.f1;
      } catch (const AucUndefinedError& e) {
        rec.val_accuracy = e.partial().accuracy;
        rec.val_f1 = e.partial().f1;
      }
    }
    result.history.push_back(rec);
    if (rec.val_auc > best_auc) {
      best_auc = rec.val_auc;
      best = params;
      result.best_epoch = epoch;
    }
  }
  params = std::move(best);
  return result;
}

std::vector<Recommendation> recommend(const LinkModelParams& params, const Graph& g,
                                      const FeatureMatrix& features, NodeId u, std::size_t k,
                                      const std::vector<std::optional<JournalMetrics>>* author_metrics) {
  if (k == 0) throw ConfigError("k must be >= 1");
  if (u >= g.num_nodes()) {
    throw BoundsError("author " + std::to_string(u) + " out of range (n = " +
                      std::to_string(g.num_nodes()) + ")");
  }
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (v != u && !g.has_edge(u, v)) pairs.emplace_back(u, v);
  }
  if (pairs.empty()) return {};
  const auto probs = predict_links(params, g, features, pairs);
  std::vector<Recommendation> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out.push_back({pairs[i].second, probs[i], std::nullopt});
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.author < b.author;
  });
  if (out.size() > k) out.resize(k);
  if (author_metrics) {
    for (auto& r : out) {
      if (r.author < author_metrics->size()) r.info = (*author_metrics)[r.author];
    }
  }
  return out;
}

}  // namespace coauthornet
