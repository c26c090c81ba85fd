#include "coauthornet/gradcheck.hpp"

#include <algorithm>
#include <functional>

#include "coauthornet/linkpred.hpp"
#include "coauthornet/nn.hpp"
#include "coauthornet/random.hpp"
#include "coauthornet/sage.hpp"
#include "coauthornet/skipgram.hpp"

namespace coauthornet {

namespace {

template <class P>
using ObjectiveFn = std::function<double(const P&, P*)>;

template <class P>
void check_blocks(const std::string& family, P& params, P grads, const ObjectiveFn<P>& objective,
                  const GradcheckOptions& opt, std::vector<GradcheckRow>& rows) {
  objective(params, &grads);
  auto grad_blocks = grads.blocks();
  auto param_blocks = params.blocks();
  for (std::size_t b = 0; b < param_blocks.size(); ++b) {
    std::span<double> values = param_blocks[b].values;
    if (values.empty()) continue;
    Vector analytic(grad_blocks[b].values.begin(), grad_blocks[b].values.end());
    if (opt.inject_wrong_gradient) {
      for (double& g : analytic) g *= 2.0;
    }
    const Vector original(values.begin(), values.end());
    LossFn loss = [&](std::span<const double> theta) {
      std::copy(theta.begin(), theta.end(), values.begin());
      const double l = objective(params, nullptr);
      std::copy(original.begin(), original.end(), values.begin());
      return l;
    };
    rows.push_back({family, param_blocks[b].name,
                    finite_diff_check(loss, original, analytic, opt.step)});
  }
}

std::vector<PairSample> random_samples(std::size_t count, std::size_t num_nodes,
                                       std::size_t negatives, Rng& rng) {
  std::vector<PairSample> samples(count);
  for (auto& s : samples) {
    s.center = static_cast<NodeId>(rng.index(num_nodes));
    s.context = static_cast<NodeId>(rng.index(num_nodes));
    for (std::size_t j = 0; j < negatives; ++j) {
      s.negatives.push_back(static_cast<NodeId>(rng.index(num_nodes)));
    }
  }
  return samples;
}

FeatureMatrix random_features(std::size_t rows, std::size_t cols, Rng& rng) {
  FeatureMatrix x(rows, cols);
  for (double& v : x.values()) v = rng.uniform(-1.0, 1.0);
  return x;
}

// Six nodes: a triangle, a path hanging off it and one isolated node.
Graph small_graph() {
  const std::vector<Edge> edges = {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}};
  return Graph::build(edges, 6, false);
}

std::vector<NodeId> all_nodes(const Graph& g) {
  std::vector<NodeId> ids(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) ids[v] = v;
  return ids;
}

}  // namespace

std::vector<GradcheckRow> run_gradcheck(const GradcheckOptions& opt) {
  std::vector<GradcheckRow> rows;
  Rng rng(derive_seed(opt.seed, "gradcheck"));

  {
    auto params = init_skipgram(6, 4, rng);
    const auto samples = random_samples(5, 6, 2, rng);
    ObjectiveFn<SkipGramParams> f = [&](const SkipGramParams& p, SkipGramParams* g) {
      return skipgram_loss(p, samples, g);
    };
    SkipGramParams zeros{Matrix(6, 4), Matrix(6, 4)};
    check_blocks("skipgram", params, zeros, f, opt, rows);
  }

  {
    auto params = init_attri2vec(4, 5, 3, rng);
    const auto features = random_features(4, 5, rng);
    const auto samples = random_samples(4, 4, 2, rng);
    ObjectiveFn<Attri2VecParams> f = [&](const Attri2VecParams& p, Attri2VecParams* g) {
      return attri2vec_loss(p, features, samples, g);
    };
    Attri2VecParams zeros{Matrix(3, 5), Matrix(4, 3)};
    check_blocks("attri2vec", params, zeros, f, opt, rows);
  }

  const Graph g = small_graph();
  const auto features = random_features(g.num_nodes(), 4, rng);
  const std::vector<std::size_t> dims = {4, 3};
  const std::vector<std::size_t> sample_sizes = {3, 2};

  for (Aggregator agg : {Aggregator::kMean, Aggregator::kMaxPool}) {
    auto params = init_sage(4, dims, agg, Activation::kSigmoid, rng);
    const auto targets = all_nodes(g);
    const SagePlan plan = build_sage_plan(g, targets, dims.size(), sample_sizes, &rng);
    const auto samples = random_samples(6, g.num_nodes(), 2, rng);
    ObjectiveFn<SageParams> f = [&](const SageParams& p, SageParams* gr) {
      return sage_unsupervised_loss(p, features, plan, samples, gr);
    };
    check_blocks("sage-" + std::string(to_string(agg)), params, params.zeros_like(), f, opt,
                 rows);
  }

  struct LinkVariant {
    Aggregator aggregator;
    LinkOperator op;
    std::size_t hidden;
  };
  std::vector<LinkVariant> variants;
  for (LinkOperator op : kAllOperators) variants.push_back({Aggregator::kMean, op, 0});
  variants.push_back({Aggregator::kMaxPool, LinkOperator::kHadamard, 0});
  variants.push_back({Aggregator::kMean, LinkOperator::kL2, 3});

  const std::vector<LabeledPair> pairs = {{0, 1, 1}, {2, 3, 1}, {3, 4, 1},
                                          {0, 4, 0}, {1, 5, 0}, {2, 5, 0}};
  for (const auto& variant : variants) {
    LinkModelConfig cfg;
    cfg.dims = dims;
    cfg.sample_sizes = sample_sizes;
    cfg.aggregator = variant.aggregator;
    cfg.op = variant.op;
    cfg.hidden = variant.hidden;
    auto params = init_link_model(4, cfg, rng);
    const auto targets = all_nodes(g);
    const SagePlan plan = build_sage_plan(g, targets, dims.size(), sample_sizes, &rng);
    ObjectiveFn<LinkModelParams> f = [&](const LinkModelParams& p, LinkModelParams* gr) {
      return link_model_loss(p, features, plan, pairs, gr);
    };
    std::string family = "link-" + std::string(to_string(variant.aggregator)) + "-" +
                         std::string(to_string(variant.op));
    if (variant.hidden > 0) family += "-hidden";
    check_blocks(family, params, params.zeros_like(), f, opt, rows);
  }
  return rows;
}

bool gradcheck_passed(const std::vector<GradcheckRow>& rows, double tolerance) {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const GradcheckRow& r) { return r.max_rel_error <= tolerance; });
}

}  // namespace coauthornet
