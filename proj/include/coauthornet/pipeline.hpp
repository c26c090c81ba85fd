#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "coauthornet/embedding_io.hpp"
#include "coauthornet/eval.hpp"
#include "coauthornet/ingest.hpp"
#include "coauthornet/journal.hpp"
#include "coauthornet/linkpred.hpp"
#include "coauthornet/text_embed.hpp"
#include "coauthornet/walks.hpp"

namespace coauthornet {

enum class ArticleMethod { kNone, kAbstractsOnly, kNode2Vec, kAttri2Vec, kSageMean, kSageMaxPool };

inline constexpr std::array<ArticleMethod, 6> kAllArticleMethods = {
    ArticleMethod::kNone,      ArticleMethod::kAbstractsOnly, ArticleMethod::kNode2Vec,
    ArticleMethod::kAttri2Vec, ArticleMethod::kSageMean,      ArticleMethod::kSageMaxPool};

std::string_view to_string(ArticleMethod m);     // "none", "abstracts-only", "node2vec", ...
std::string_view display_name(ArticleMethod m);  // "--", "Abstracts", "Node2Vec", ...
ArticleMethod parse_article_method(std::string_view s);

std::string author_display_name(Aggregator a);  // "GraphSAGE (Mean)" / "GraphSAGE (MaxPool)"

struct RunConfig {
  std::uint64_t seed = 7;
  unsigned threads = 1;
  bool offline = false;
  std::string out_dir = "run";

  std::string metadata_path;
  std::string edges_path;    // citation edge list; optional
  std::string metrics_path;  // journal metrics CSV; optional
  std::string metrics_url;   // fetched (and cached) when metrics_path is empty
  std::string lookup_path;   // journal prefix -> ISSN table; optional
  std::string cache_path;    // metrics cache; empty means <out>/metrics_cache.csv

  VectorizerConfig vectorizer;
  std::size_t interest_vocab = 64;

  WalkConfig walk;
  bool respect_direction = false;  // embed on the directed citation graph
  ArticleMethod article_method = ArticleMethod::kSageMean;
  std::size_t article_dims = 128;
  std::size_t article_epochs = 5;
  double article_lr = 0.025;       // skip-gram family SGD
  double article_sage_lr = 0.01;   // unsupervised GraphSAGE Adam
  std::vector<std::size_t> article_sample_sizes = {10, 5};
  std::size_t negatives = 5;
  PaperPooling pooling = PaperPooling::kSum;

  LinkModelConfig link;
  std::array<std::size_t, 3> split_ratio = {3, 1, 2};
  NegativeStrategy negative_strategy = NegativeStrategy::kUniform;

  // Throws ConfigError for out-of-range values and IoError for missing inputs
  // when `require_inputs`.
  void validate(bool require_inputs) const;
  // Flat key/value view, as written into manifests.
  std::map<std::string, std::string> describe() const;
  std::string metrics_cache() const;
};

// Per-purpose seeds derived from the master seed.
std::uint64_t purpose_seed(const RunConfig& cfg, std::string_view purpose);

// Ingested corpus as used by the downstream commands. Paper NodeIds index
// paper_tokens and the rows of `abstracts`; author NodeIds index everything
// author-shaped.
struct Corpus {
  Graph coauthors;
  Graph citations;  // directed
  AuthorTable authors;
  std::vector<std::string> paper_tokens;  // external paper ids
  FeatureMatrix abstracts;
  InterestFeatures interests;
  std::vector<std::optional<JournalMetrics>> author_metrics;
};

struct IngestStats {
  std::size_t papers = 0;  // parsed records
  std::size_t skipped_records = 0;
  std::size_t dropped_anonymous = 0;
  std::size_t authors = 0;
  std::size_t collaboration_edges = 0;
  std::size_t citation_edges = 0;
  std::size_t dropped_citations = 0;
  std::size_t papers_with_issn = 0;

  std::string line() const;
};

// Builds the corpus from the configured raw inputs.
Corpus build_corpus(const RunConfig& cfg, IngestStats* stats = nullptr);
void save_corpus(const Corpus& corpus, const std::string& dir);
Corpus load_corpus(const std::string& dir);

EmbeddingMatrix embed_papers(const Corpus& corpus, const RunConfig& cfg);
// Research interests, augmented with pooled paper embeddings unless the
// method is kNone (then `paper_embeddings` is ignored).
FeatureMatrix author_features(const Corpus& corpus, const RunConfig& cfg,
                              const EmbeddingMatrix* paper_embeddings);

EdgeSplit make_split(const Corpus& corpus, const RunConfig& cfg);
ConfigDescriptor describe_model(const RunConfig& cfg);
MetricsReport evaluate_model(const LinkModelParams& params, const Corpus& corpus,
                             const FeatureMatrix& features, const EdgeSplit& split,
                             const ConfigDescriptor& descriptor);

// Command entry points. Each writes its artifacts under cfg.out_dir (holding
// the directory lock) and reports to `log`. They return a process exit code
// for verification outcomes and throw for errors.
int cmd_ingest(const RunConfig& cfg, std::ostream& log);
int cmd_embed(const RunConfig& cfg, std::ostream& log);
int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_evaluate(const RunConfig& cfg, bool grid, std::ostream& log);
int cmd_recommend(const RunConfig& cfg, const std::string& author, std::size_t k,
                  std::ostream& log);
int cmd_gradcheck(const RunConfig& cfg, bool inject_wrong_gradient, std::ostream& log);

struct SyntheticOptions {
  std::vector<std::size_t> block_sizes = {50, 50};
  double p_in = 0.1;
  double p_out = 0.01;
};
int cmd_gen_synthetic(const RunConfig& cfg, const SyntheticOptions& options, std::ostream& log);

// All configurations of the ablation grid: article method x paper pooling
// (for methods producing embeddings) x author aggregator x operator.
std::vector<MetricsReport> run_grid(const Corpus& corpus, const RunConfig& cfg,
                                    std::ostream* progress = nullptr);

// Exit code for an exception escaping a command: 3 lookup, 2 I/O or
// configuration, 1 anything else.
int exit_code_for(const std::exception& e);

// Up to `count` author names closest to `query` by edit distance.
std::vector<std::string> closest_names(const AuthorTable& authors, std::string_view query,
                                       std::size_t count = 3);

}  // namespace coauthornet
