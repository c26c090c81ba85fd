#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "coauthornet/errors.hpp"
#include "coauthornet/pipeline.hpp"

using namespace coauthornet;

namespace {

const std::set<std::string> kCommands = {"ingest",    "embed",     "train",        "evaluate",
                                         "recommend", "gradcheck", "gen-synthetic"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// `key = value` lines, `#` starts a comment. Each entry becomes `--key=value`.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::vector<std::string> args;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "config") throw ConfigError(path + ": config files cannot include others");
    args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

// Global flags may precede the command; config-file values are inserted ahead
// of the command-line flags so that the latter win.
std::vector<std::string> arrange_arguments(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto cmd = std::find_if(args.begin(), args.end(),
                                [](const std::string& a) { return kCommands.count(a) > 0; });
  if (cmd == args.end()) return args;
  std::vector<std::string> arranged = {*cmd};
  std::vector<std::string> rest(args.begin(), cmd);
  rest.insert(rest.end(), cmd + 1, args.end());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    std::string path;
    if (rest[i] == "--config" && i + 1 < rest.size()) {
      path = rest[i + 1];
    } else if (rest[i].rfind("--config=", 0) == 0) {
      path = rest[i].substr(9);
    }
    if (!path.empty()) {
      const auto extra = config_arguments(path);
      arranged.insert(arranged.end(), extra.begin(), extra.end());
    }
  }
  arranged.insert(arranged.end(), rest.begin(), rest.end());
  return arranged;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> sizes;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError(flag + ": expected comma-separated sizes, got '" + text + "'");
    }
  }
  if (sizes.empty()) throw ConfigError(flag + ": empty list");
  return sizes;
}

struct TextOptions {
  std::string vectorizer = "hashed";
  std::string article_method = "graphsage-mean";
  std::string pooling = "sum";
  std::string aggregator = "mean";
  std::string op = "l2";
  std::string activation = "sigmoid";
  std::string author_dims = "64,64";
  std::string sample_sizes = "10,10";
  std::string article_sample_sizes = "10,5";
  std::string split_ratio = "3:1:2";
  std::string negative_strategy = "uniform";
  std::string config;
};

void add_run_options(CLI::App* app, RunConfig& cfg, TextOptions& text) {
  app->option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  app->add_option("--config", text.config, "Config file of `key = value` lines");
  app->add_option("--seed", cfg.seed, "Master random seed");
  app->add_option("--out", cfg.out_dir, "Output directory");
  app->add_option("--threads", cfg.threads, "Worker threads for random walks");
  app->add_flag("--offline", cfg.offline, "Never touch the network");
  app->add_option("--metadata", cfg.metadata_path, "Paper metadata file");
  app->add_option("--edges", cfg.edges_path, "Citation edge list");
  app->add_option("--metrics", cfg.metrics_path, "Journal metrics CSV");
  app->add_option("--metrics-url", cfg.metrics_url, "HTTP source of the journal metrics CSV");
  app->add_option("--lookup", cfg.lookup_path, "Journal prefix to ISSN table");
  app->add_option("--vectorizer", text.vectorizer, "Abstract vectorizer: hashed|pretrained");
  app->add_option("--vector-dim", cfg.vectorizer.dim, "Abstract vector size");
  app->add_option("--ngram-min", cfg.vectorizer.ngram_min, "Shortest character n-gram");
  app->add_option("--ngram-max", cfg.vectorizer.ngram_max, "Longest character n-gram");
  app->add_option("--vector-table", cfg.vectorizer.table_path, "Pretrained word vectors");
  app->add_option("--interest-vocab", cfg.interest_vocab, "Research-interest vocabulary size");
  app->add_option("--walk-p", cfg.walk.p, "Return parameter p");
  app->add_option("--walk-q", cfg.walk.q, "In-out parameter q");
  app->add_option("--walk-length", cfg.walk.walk_length, "Random walk length");
  app->add_option("--walks-per-node", cfg.walk.walks_per_node, "Walks started per node");
  app->add_option("--window", cfg.walk.window, "Skip-gram context window");
  app->add_flag("--respect-direction", cfg.respect_direction,
                "Walk and aggregate along citation direction");
  app->add_option("--article-method", text.article_method,
                  "none|abstracts-only|node2vec|attri2vec|graphsage-mean|graphsage-maxpool");
  app->add_option("--article-dims", cfg.article_dims, "Paper embedding size");
  app->add_option("--article-epochs", cfg.article_epochs, "Paper embedding epochs");
  app->add_option("--article-lr", cfg.article_lr, "Skip-gram / Attri2Vec learning rate");
  app->add_option("--article-sage-lr", cfg.article_sage_lr, "Unsupervised GraphSAGE learning rate");
  app->add_option("--article-sample-sizes", text.article_sample_sizes,
                  "Unsupervised GraphSAGE neighbor samples per layer");
  app->add_option("--negatives", cfg.negatives, "Negative samples per pair");
  app->add_option("--pooling", text.pooling, "Pooling of an author's papers: sum|mean");
  app->add_option("--aggregator", text.aggregator, "Author GraphSAGE aggregator: mean|maxpool");
  app->add_option("--operator", text.op, "Link operator: l1|l2|hadamard|average|inner");
  app->add_option("--activation", text.activation, "Layer activation: sigmoid|relu|linear");
  app->add_option("--author-dims", text.author_dims, "Author GraphSAGE layer sizes");
  app->add_option("--sample-sizes", text.sample_sizes, "Author neighbor samples per layer");
  app->add_option("--hidden", cfg.link.hidden, "Hidden classifier units (0: none)");
  app->add_option("--epochs", cfg.link.epochs, "Link model epochs");
  app->add_option("--batch", cfg.link.batch_size, "Link model minibatch size");
  app->add_option("--lr", cfg.link.learning_rate, "Link model Adam learning rate");
  app->add_option("--split-ratio", text.split_ratio, "Train:validation:test ratio");
  app->add_option("--negative-strategy", text.negative_strategy, "Negative pairs: uniform|degree");
}

void finish_config(RunConfig& cfg, const TextOptions& text) {
  if (text.vectorizer == "hashed") {
    cfg.vectorizer.mode = VectorizerMode::kHashedNgrams;
  } else if (text.vectorizer == "pretrained") {
    cfg.vectorizer.mode = VectorizerMode::kPretrainedTable;
  } else {
    throw ConfigError("--vectorizer: expected hashed or pretrained, got '" + text.vectorizer + "'");
  }
  cfg.article_method = parse_article_method(text.article_method);
  if (text.pooling == "sum") {
    cfg.pooling = PaperPooling::kSum;
  } else if (text.pooling == "mean") {
    cfg.pooling = PaperPooling::kMean;
  } else {
    throw ConfigError("--pooling: expected sum or mean, got '" + text.pooling + "'");
  }
  cfg.link.aggregator = parse_aggregator(text.aggregator);
  cfg.link.op = parse_link_operator(text.op);
  cfg.link.activation = parse_activation(text.activation);
  cfg.link.dims = parse_sizes(text.author_dims, "--author-dims");
  cfg.link.sample_sizes = parse_sizes(text.sample_sizes, "--sample-sizes");
  cfg.article_sample_sizes = parse_sizes(text.article_sample_sizes, "--article-sample-sizes");
  std::string ratio = text.split_ratio;
  std::replace(ratio.begin(), ratio.end(), ':', ',');
  const auto parts = parse_sizes(ratio, "--split-ratio");
  if (parts.size() != 3) throw ConfigError("--split-ratio: expected a:b:c");
  cfg.split_ratio = {parts[0], parts[1], parts[2]};
  if (text.negative_strategy == "uniform") {
    cfg.negative_strategy = NegativeStrategy::kUniform;
  } else if (text.negative_strategy == "degree") {
    cfg.negative_strategy = NegativeStrategy::kDegree;
  } else {
    throw ConfigError("--negative-strategy: expected uniform or degree");
  }
  if (const char* cache = std::getenv("COAUTHORNET_CACHE"); cache && *cache) {
    cfg.cache_path = cache;
  }
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("coauthornet"));
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Co-authorship recommendation from citation-graph embeddings", "coauthornet"};
  app.require_subcommand(1);
  app.footer("Run `coauthornet <command> --help` for the flags of a command.");

  RunConfig cfg;
  TextOptions text;
  bool grid = false;
  bool inject_wrong = false;
  std::string author;
  std::size_t k = 10;
  std::string blocks = "50,50";
  SyntheticOptions synthetic;

  auto* ingest = app.add_subcommand("ingest", "Parse metadata and build graphs and features");
  auto* embed = app.add_subcommand("embed", "Train the selected paper embedding");
  auto* train = app.add_subcommand("train", "Train the link prediction model");
  auto* evaluate = app.add_subcommand("evaluate", "Score the test partition");
  auto* rec = app.add_subcommand("recommend", "Rank likely new co-authors of an author");
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  auto* gen = app.add_subcommand("gen-synthetic", "Write a stochastic-block-model corpus");
  for (auto* sub : {ingest, embed, train, evaluate, rec, gradcheck, gen}) {
    add_run_options(sub, cfg, text);
  }
  evaluate->add_flag("--grid", grid, "Train and score the whole ablation grid");
  rec->add_option("--author", author, "Author name or id")->required();
  rec->add_option("--k", k, "Number of recommendations");
  gradcheck->add_flag("--inject-wrong-gradient", inject_wrong,
                      "Test hook: corrupt analytic gradients");
  gen->add_option("--blocks", blocks, "Block sizes");
  gen->add_option("--p-in", synthetic.p_in, "Edge probability within a block");
  gen->add_option("--p-out", synthetic.p_out, "Edge probability across blocks");

  try {
    std::vector<std::string> args = arrange_arguments(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 2;
    }
    finish_config(cfg, text);
    if (ingest->parsed()) return cmd_ingest(cfg, std::cout);
    if (embed->parsed()) return cmd_embed(cfg, std::cout);
    if (train->parsed()) return cmd_train(cfg, std::cout);
    if (evaluate->parsed()) return cmd_evaluate(cfg, grid, std::cout);
    if (rec->parsed()) return cmd_recommend(cfg, author, k, std::cout);
    if (gradcheck->parsed()) return cmd_gradcheck(cfg, inject_wrong, std::cout);
    if (gen->parsed()) {
      synthetic.block_sizes = parse_sizes(blocks, "--blocks");
      return cmd_gen_synthetic(cfg, synthetic, std::cout);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e);
  }
  return 1;
}
