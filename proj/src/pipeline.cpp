#include "coauthornet/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "coauthornet/checkpoint.hpp"
#include "coauthornet/errors.hpp"
#include "coauthornet/gradcheck.hpp"
#include "coauthornet/random.hpp"
#include "coauthornet/sage.hpp"
#include "coauthornet/skipgram.hpp"
#include "coauthornet/synthetic.hpp"

namespace coauthornet {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCoauthorGraphFile = "coauthor_graph.txt";
constexpr const char* kCitationGraphFile = "citation_graph.txt";
constexpr const char* kAuthorsFile = "authors.tsv";
constexpr const char* kPapersFile = "papers.tsv";
constexpr const char* kAbstractsFile = "abstracts.emb";
constexpr const char* kInterestsFile = "interests.emb";
constexpr const char* kVocabularyFile = "interest_vocab.txt";
constexpr const char* kAuthorMetricsFile = "author_metrics.tsv";
constexpr const char* kStatsFile = "ingest_stats.txt";
constexpr const char* kEmbeddingsFile = "paper_embeddings.emb";
constexpr const char* kEmbedManifestFile = "paper_embeddings.manifest";
constexpr const char* kSplitFile = "split.tsv";
constexpr const char* kCheckpointFile = "model.ckpt";
constexpr const char* kHistoryFile = "history.csv";
constexpr const char* kResultsFile = "results.csv";
constexpr const char* kGridFile = "grid_results.csv";

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_input(const std::string& path, const std::string& hint = "") {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path + hint);
  return in;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string join_sizes(const std::vector<std::size_t>& v, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s.push_back(sep);
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

// Exclusive advisory lock on <dir>/.lock for the lifetime of the object.
class DirLock {
 public:
  explicit DirLock(const std::string& dir) {
    fs::create_directories(dir);
    path_ = join_path(dir, ".lock");
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot create lock file " + path_);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw IoError("output directory " + dir + " is in use by another command");
    }
  }
  ~DirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

Graph read_graph_file(const std::string& path) {
  auto in = open_input(path, " (run `ingest` first)");
  std::string header;
  std::getline(in, header);
  std::istringstream h(header);
  std::string hash, word, kind;
  std::size_t n = 0;
  if (!(h >> hash >> word >> n >> kind) || hash != "#" || word != "nodes" ||
      (kind != "directed" && kind != "undirected")) {
    throw FormatError(path + ": expected header `# nodes N directed|undirected`");
  }
  std::vector<Edge> edges;
  for (const auto& [a, b] : read_edge_list(in)) {
    if (a < 0 || b < 0) throw FormatError(path + ": negative node id");
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  return Graph::build(edges, n, kind == "directed");
}

void write_graph_file(const std::string& path, const Graph& g) {
  auto out = open_output(path);
  write_edge_list(out, g);
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& kv) {
  auto out = open_output(path);
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

EmbeddingMatrix load_paper_embeddings(const RunConfig& cfg) {
  const std::string path = join_path(cfg.out_dir, kEmbeddingsFile);
  if (!fs::exists(path)) {
    throw IoError("paper embeddings not found at " + path + " (run `embed` first)");
  }
  const auto manifest = read_manifest(join_path(cfg.out_dir, kEmbedManifestFile));
  const auto it = manifest.find("article-method");
  if (it != manifest.end() && it->second != to_string(cfg.article_method)) {
    throw ConsistencyError("paper embeddings were produced by article-method " + it->second +
                           " but the run asks for " + std::string(to_string(cfg.article_method)));
  }
  return read_embeddings_file(path);
}

FeatureMatrix run_features(const Corpus& corpus, const RunConfig& cfg) {
  if (cfg.article_method == ArticleMethod::kNone) return author_features(corpus, cfg, nullptr);
  const EmbeddingMatrix emb = load_paper_embeddings(cfg);
  return author_features(corpus, cfg, &emb);
}

LinkModelConfig link_config(const RunConfig& cfg) {
  LinkModelConfig lc = cfg.link;
  lc.seed = purpose_seed(cfg, "link-model");
  return lc;
}

}  // namespace

std::string_view to_string(ArticleMethod m) {
  switch (m) {
    case ArticleMethod::kNone: return "none";
    case ArticleMethod::kAbstractsOnly: return "abstracts-only";
    case ArticleMethod::kNode2Vec: return "node2vec";
    case ArticleMethod::kAttri2Vec: return "attri2vec";
    case ArticleMethod::kSageMean: return "graphsage-mean";
    case ArticleMethod::kSageMaxPool: return "graphsage-maxpool";
  }
  return "?";
}

std::string_view display_name(ArticleMethod m) {
  switch (m) {
    case ArticleMethod::kNone: return "--";
    case ArticleMethod::kAbstractsOnly: return "Abstracts";
    case ArticleMethod::kNode2Vec: return "Node2Vec";
    case ArticleMethod::kAttri2Vec: return "Attri2Vec";
    case ArticleMethod::kSageMean: return "GraphSAGE (Mean)";
    case ArticleMethod::kSageMaxPool: return "GraphSAGE (MaxPool)";
  }
  return "?";
}

ArticleMethod parse_article_method(std::string_view s) {
  for (ArticleMethod m : kAllArticleMethods) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown article-embedding method '" + std::string(s) +
                    "' (expected none, abstracts-only, node2vec, attri2vec, graphsage-mean, "
                    "graphsage-maxpool)");
}

std::string author_display_name(Aggregator a) {
  return a == Aggregator::kMean ? "GraphSAGE (Mean)" : "GraphSAGE (MaxPool)";
}

void RunConfig::validate(bool require_inputs) const {
  if (threads == 0) throw ConfigError("threads must be >= 1");
  if (interest_vocab == 0) throw ConfigError("interest-vocab must be >= 1");
  if (article_dims == 0) throw ConfigError("article-dims must be >= 1");
  if (negatives == 0) throw ConfigError("negatives must be >= 1");
  if (!(article_lr > 0) || !(article_sage_lr > 0) || !(link.learning_rate > 0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (link.dims.empty() || std::find(link.dims.begin(), link.dims.end(), 0u) != link.dims.end()) {
    throw ConfigError("author-dims must list positive layer sizes");
  }
  if (link.sample_sizes.size() != link.dims.size()) {
    throw ConfigError("sample-sizes needs one entry per author layer (" +
                      std::to_string(link.dims.size()) + ")");
  }
  if (article_sample_sizes.size() != 2) {
    throw ConfigError("article-sample-sizes needs two entries");
  }
  if (link.batch_size == 0) throw ConfigError("batch must be >= 1");
  if (split_ratio[0] == 0 || split_ratio[2] == 0) {
    throw ConfigError("split-ratio needs non-zero train and test parts");
  }
  walk.validate();
  if (!require_inputs) return;
  if (metadata_path.empty()) throw ConfigError("no metadata file given (--metadata)");
  for (const std::string* p : {&metadata_path, &edges_path, &metrics_path, &lookup_path}) {
    if (!p->empty() && !fs::exists(*p)) throw IoError("input file not found: " + *p);
  }
  if (vectorizer.mode == VectorizerMode::kPretrainedTable && !fs::exists(vectorizer.table_path)) {
    throw IoError("input file not found: " + vectorizer.table_path);
  }
}

std::map<std::string, std::string> RunConfig::describe() const {
  return {
      {"seed", std::to_string(seed)},
      {"metadata", metadata_path},
      {"edges", edges_path},
      {"metrics", metrics_path},
      {"lookup", lookup_path},
      {"vectorizer", vectorizer.mode == VectorizerMode::kHashedNgrams ? "hashed" : "pretrained"},
      {"vector-dim", std::to_string(vectorizer.dim)},
      {"interest-vocab", std::to_string(interest_vocab)},
      {"walk-p", fixed(walk.p, 6)},
      {"walk-q", fixed(walk.q, 6)},
      {"walk-length", std::to_string(walk.walk_length)},
      {"walks-per-node", std::to_string(walk.walks_per_node)},
      {"window", std::to_string(walk.window)},
      {"respect-direction", respect_direction ? "true" : "false"},
      {"article-method", std::string(to_string(article_method))},
      {"article-dims", std::to_string(article_dims)},
      {"article-epochs", std::to_string(article_epochs)},
      {"article-lr", fixed(article_lr, 6)},
      {"article-sage-lr", fixed(article_sage_lr, 6)},
      {"article-sample-sizes", join_sizes(article_sample_sizes)},
      {"negatives", std::to_string(negatives)},
      {"pooling", pooling == PaperPooling::kSum ? "sum" : "mean"},
      {"aggregator", std::string(to_string(link.aggregator))},
      {"operator", std::string(to_string(link.op))},
      {"activation", std::string(to_string(link.activation))},
      {"author-dims", join_sizes(link.dims)},
      {"sample-sizes", join_sizes(link.sample_sizes)},
      {"hidden", std::to_string(link.hidden)},
      {"epochs", std::to_string(link.epochs)},
      {"batch", std::to_string(link.batch_size)},
      {"lr", fixed(link.learning_rate, 6)},
      {"split-ratio", std::to_string(split_ratio[0]) + ":" + std::to_string(split_ratio[1]) +
                          ":" + std::to_string(split_ratio[2])},
      {"negative-strategy", negative_strategy == NegativeStrategy::kUniform ? "uniform" : "degree"},
  };
}

std::string RunConfig::metrics_cache() const {
  if (!cache_path.empty()) return cache_path;
  return join_path(out_dir, "metrics_cache.csv");
}

std::uint64_t purpose_seed(const RunConfig& cfg, std::string_view purpose) {
  return derive_seed(cfg.seed, purpose);
}

std::string IngestStats::line() const {
  return "papers=" + std::to_string(papers) + " skipped_records=" + std::to_string(skipped_records) +
         " dropped_anonymous=" + std::to_string(dropped_anonymous) +
         " authors=" + std::to_string(authors) +
         " collaboration_edges=" + std::to_string(collaboration_edges) +
         " citation_edges=" + std::to_string(citation_edges) +
         " dropped_citations=" + std::to_string(dropped_citations) +
         " papers_with_issn=" + std::to_string(papers_with_issn);
}

Corpus build_corpus(const RunConfig& cfg, IngestStats* stats) {
  cfg.validate(true);
  ParseResult parsed = parse_paper_metadata_file(cfg.metadata_path);
  CoauthorNetwork net = reconstruct_coauthorship(parsed.papers);

  Corpus corpus;
  std::vector<std::pair<std::int64_t, std::int64_t>> citations;
  if (!cfg.edges_path.empty()) citations = read_edge_list_file(cfg.edges_path);
  std::size_t dropped_citations = 0;
  corpus.citations = build_citation_graph(net, citations, &dropped_citations);

  const Vectorizer vectorizer(cfg.vectorizer);
  corpus.abstracts = FeatureMatrix(net.papers.size(), cfg.vectorizer.dim);
  for (std::size_t p = 0; p < net.papers.size(); ++p) {
    const Vector v = vectorizer.vectorize(net.papers[p].abstract);
    std::copy(v.begin(), v.end(), corpus.abstracts.row(p).begin());
    corpus.paper_tokens.push_back(std::to_string(net.papers[p].paper_id));
  }
  corpus.interests = derive_interest_features(net, cfg.interest_vocab);

  std::size_t with_issn = 0;
  corpus.author_metrics.assign(net.authors.size(), std::nullopt);
  if (!cfg.lookup_path.empty()) {
    const JournalLookup lookup = JournalLookup::load_file(cfg.lookup_path);
    std::vector<std::optional<Issn>> paper_issn(net.papers.size());
    for (std::size_t p = 0; p < net.papers.size(); ++p) {
      paper_issn[p] = extract_issn(net.papers[p].journal_ref, lookup);
      if (paper_issn[p]) ++with_issn;
    }
    MetricsMap metrics;
    if (!cfg.metrics_path.empty()) {
      metrics = load_journal_metrics_file(cfg.metrics_path);
    } else if (!cfg.metrics_url.empty()) {
      metrics = fetch_journal_metrics(cfg.metrics_url, cfg.metrics_cache(), !cfg.offline);
    }
    // Informational only: the highest-impact journal an author published in.
    for (NodeId a = 0; a < net.authors.size(); ++a) {
      for (NodeId p : net.authors.papers[a]) {
        if (!paper_issn[p]) continue;
        auto it = metrics.find(*paper_issn[p]);
        if (it == metrics.end()) continue;
        auto& best = corpus.author_metrics[a];
        if (!best || it->second.impact_factor > best->impact_factor) best = it->second;
      }
    }
  }

  if (stats) {
    stats->papers = parsed.papers.size();
    stats->skipped_records = parsed.skipped;
    stats->dropped_anonymous = net.dropped_anonymous;
    stats->authors = net.authors.size();
    stats->collaboration_edges = net.graph.num_edges();
    stats->citation_edges = corpus.citations.num_edges();
    stats->dropped_citations = dropped_citations;
    stats->papers_with_issn = with_issn;
  }
  corpus.coauthors = std::move(net.graph);
  corpus.authors = std::move(net.authors);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  write_graph_file(join_path(dir, kCoauthorGraphFile), corpus.coauthors);
  write_graph_file(join_path(dir, kCitationGraphFile), corpus.citations);
  {
    auto out = open_output(join_path(dir, kAuthorsFile));
    out << "# author\tname\tpapers\n";
    for (NodeId a = 0; a < corpus.authors.size(); ++a) {
      out << a << '\t' << corpus.authors.names.key(a) << '\t';
      const auto& papers = corpus.authors.papers[a];
      for (std::size_t i = 0; i < papers.size(); ++i) out << (i ? "," : "") << papers[i];
      out << '\n';
    }
  }
  {
    auto out = open_output(join_path(dir, kPapersFile));
    out << "# paper\tpaper_id\n";
    for (std::size_t p = 0; p < corpus.paper_tokens.size(); ++p) {
      out << p << '\t' << corpus.paper_tokens[p] << '\n';
    }
  }
  write_embeddings_file(join_path(dir, kAbstractsFile),
                        EmbeddingMatrix(corpus.paper_tokens, corpus.abstracts));
  std::vector<std::string> author_labels;
  for (NodeId a = 0; a < corpus.authors.size(); ++a) author_labels.push_back(std::to_string(a));
  write_embeddings_file(join_path(dir, kInterestsFile),
                        EmbeddingMatrix(author_labels, corpus.interests.matrix));
  {
    auto out = open_output(join_path(dir, kVocabularyFile));
    for (const auto& term : corpus.interests.vocabulary) out << term << '\n';
  }
  {
    auto out = open_output(join_path(dir, kAuthorMetricsFile));
    out << "# author\tissn\tquartile\th_index\timpact_factor\n";
    for (NodeId a = 0; a < corpus.author_metrics.size(); ++a) {
      const auto& m = corpus.author_metrics[a];
      if (!m) continue;
      out << a << '\t' << m->issn.str() << '\t' << to_string(m->quartile) << '\t' << m->h_index
          << '\t' << fixed(m->impact_factor, 3) << '\n';
    }
  }
}

Corpus load_corpus(const std::string& dir) {
  Corpus corpus;
  corpus.coauthors = read_graph_file(join_path(dir, kCoauthorGraphFile));
  corpus.citations = read_graph_file(join_path(dir, kCitationGraphFile));
  const std::size_t n_authors = corpus.coauthors.num_nodes();
  const std::size_t n_papers = corpus.citations.num_nodes();
  {
    auto in = open_input(join_path(dir, kAuthorsFile));
    corpus.authors.papers.resize(n_authors);
    for (std::string line; std::getline(in, line);) {
      if (line.empty() || line[0] == '#') continue;
      const auto fields = split_on(line, '\t');
      if (fields.size() < 2) throw FormatError(join_path(dir, kAuthorsFile) + ": bad line");
      const NodeId a = corpus.authors.names.intern(fields[1]);
      if (a >= n_authors || std::to_string(a) != fields[0]) {
        throw FormatError(join_path(dir, kAuthorsFile) + ": author ids out of order");
      }
      if (fields.size() > 2 && !fields[2].empty()) {
        for (const auto& p : split_on(fields[2], ',')) {
          corpus.authors.papers[a].push_back(static_cast<NodeId>(std::stoul(p)));
        }
      }
    }
    if (corpus.authors.size() != n_authors) {
      throw ConsistencyError("author table does not match the co-authorship graph");
    }
  }
  {
    auto in = open_input(join_path(dir, kPapersFile));
    for (std::string line; std::getline(in, line);) {
      if (line.empty() || line[0] == '#') continue;
      const auto fields = split_on(line, '\t');
      if (fields.size() < 2) throw FormatError(join_path(dir, kPapersFile) + ": bad line");
      corpus.paper_tokens.push_back(fields[1]);
    }
    if (corpus.paper_tokens.size() != n_papers) {
      throw ConsistencyError("paper table does not match the citation graph");
    }
  }
  const EmbeddingMatrix abstracts = read_embeddings_file(join_path(dir, kAbstractsFile));
  corpus.abstracts = abstracts.to_matrix();
  const EmbeddingMatrix interests = read_embeddings_file(join_path(dir, kInterestsFile));
  corpus.interests.matrix = interests.to_matrix();
  if (corpus.abstracts.rows() != n_papers || corpus.interests.matrix.rows() != n_authors) {
    throw ConsistencyError("feature files do not match the ingested graphs");
  }
  {
    auto in = open_input(join_path(dir, kVocabularyFile));
    for (std::string line; std::getline(in, line);) corpus.interests.vocabulary.push_back(line);
  }
  corpus.author_metrics.assign(n_authors, std::nullopt);
  {
    auto in = open_input(join_path(dir, kAuthorMetricsFile));
    for (std::string line; std::getline(in, line);) {
      if (line.empty() || line[0] == '#') continue;
      const auto f = split_on(line, '\t');
      auto issn = f.size() == 5 ? Issn::parse(f[1]) : std::nullopt;
      if (!issn) throw FormatError(join_path(dir, kAuthorMetricsFile) + ": bad line");
      const auto a = std::stoul(f[0]);
      if (a >= n_authors) throw FormatError(join_path(dir, kAuthorMetricsFile) + ": bad author");
      corpus.author_metrics[a] =
          JournalMetrics{*issn, parse_quartile(f[2]), std::stoll(f[3]), std::stod(f[4])};
    }
  }
  return corpus;
}

EmbeddingMatrix embed_papers(const Corpus& corpus, const RunConfig& cfg) {
  const Graph g = cfg.respect_direction ? corpus.citations : corpus.citations.as_undirected();
  const std::size_t n = g.num_nodes();
  SkipGramConfig sg;
  sg.dims = cfg.article_dims;
  sg.negatives = cfg.negatives;
  sg.epochs = cfg.article_epochs;
  sg.learning_rate = cfg.article_lr;
  switch (cfg.article_method) {
    case ArticleMethod::kNone:
      return {};
    case ArticleMethod::kAbstractsOnly:
      return EmbeddingMatrix(corpus.paper_tokens, corpus.abstracts);
    case ArticleMethod::kNode2Vec: {
      const WalkCorpus walks =
          generate_walks(g, cfg.walk, purpose_seed(cfg, "node2vec-walks"), cfg.threads);
      sg.seed = purpose_seed(cfg, "node2vec");
      const SkipGramParams p = train_skipgram(walks, n, cfg.walk.window, sg);
      return EmbeddingMatrix(corpus.paper_tokens, p.w_in);
    }
    case ArticleMethod::kAttri2Vec: {
      sg.seed = purpose_seed(cfg, "attri2vec");
      return EmbeddingMatrix(corpus.paper_tokens,
                             train_attri2vec(g, corpus.abstracts, cfg.walk, sg).images);
    }
    case ArticleMethod::kSageMean:
    case ArticleMethod::kSageMaxPool: {
      SageUnsupervisedConfig sc;
      sc.dims = {cfg.article_dims, cfg.article_dims};
      sc.sample_sizes = cfg.article_sample_sizes;
      sc.aggregator = cfg.article_method == ArticleMethod::kSageMean ? Aggregator::kMean
                                                                     : Aggregator::kMaxPool;
      sc.negatives = cfg.negatives;
      sc.epochs = cfg.article_epochs;
      sc.learning_rate = cfg.article_sage_lr;
      sc.seed = purpose_seed(cfg, "graphsage-article");
      const SageParams params = train_sage_unsupervised(g, corpus.abstracts, sc);
      return EmbeddingMatrix(corpus.paper_tokens, sage_embed_all(g, corpus.abstracts, params));
    }
  }
  throw ConfigError("unknown article-embedding method");
}

FeatureMatrix author_features(const Corpus& corpus, const RunConfig& cfg,
                              const EmbeddingMatrix* paper_embeddings) {
  if (cfg.article_method == ArticleMethod::kNone || paper_embeddings == nullptr) {
    return corpus.interests.matrix;
  }
  auto augmented = augment_author_features(corpus.interests.matrix, corpus.authors,
                                           corpus.paper_tokens, *paper_embeddings, cfg.pooling);
  if (augmented.missing_papers > 0) {
    spdlog::warn("{} author papers have no embedding row", augmented.missing_papers);
  }
  return std::move(augmented.matrix);
}

EdgeSplit make_split(const Corpus& corpus, const RunConfig& cfg) {
  return split_edges(corpus.coauthors, cfg.split_ratio, purpose_seed(cfg, "split"),
                     cfg.negative_strategy);
}

ConfigDescriptor describe_model(const RunConfig& cfg) {
  ConfigDescriptor d;
  d.article_embedding = std::string(display_name(cfg.article_method));
  if (cfg.article_method != ArticleMethod::kNone && cfg.pooling == PaperPooling::kMean) {
    d.article_embedding += " (mean pool)";
  }
  d.author_embedding = author_display_name(cfg.link.aggregator);
  d.op = std::string(display_name(cfg.link.op));
  return d;
}

MetricsReport evaluate_model(const LinkModelParams& params, const Corpus& corpus,
                             const FeatureMatrix& features, const EdgeSplit& split,
                             const ConfigDescriptor& descriptor) {
  const Graph tg = training_graph(corpus.coauthors, split);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<int> labels;
  for (const auto& s : split.test) {
    pairs.emplace_back(s.u, s.v);
    labels.push_back(s.label);
  }
  const auto scores = predict_links(params, tg, features, pairs);
  MetricsReport report = compute_metrics(labels, scores);
  report.config = descriptor;
  return report;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& log) {
  cfg.validate(true);
  DirLock lock(cfg.out_dir);
  IngestStats stats;
  const Corpus corpus = build_corpus(cfg, &stats);
  save_corpus(corpus, cfg.out_dir);
  auto out = open_output(join_path(cfg.out_dir, kStatsFile));
  out << stats.line() << '\n';
  log << stats.line() << '\n';
  return 0;
}

int cmd_embed(const RunConfig& cfg, std::ostream& log) {
  cfg.validate(false);
  DirLock lock(cfg.out_dir);
  const std::string emb_path = join_path(cfg.out_dir, kEmbeddingsFile);
  const std::string manifest_path = join_path(cfg.out_dir, kEmbedManifestFile);
  if (cfg.article_method == ArticleMethod::kNone) {
    fs::remove(emb_path);
    fs::remove(manifest_path);
    log << "article-method none: no paper embeddings; author features are the research "
           "interests alone\n";
    return 0;
  }
  const Corpus corpus = load_corpus(cfg.out_dir);
  const EmbeddingMatrix emb = embed_papers(corpus, cfg);
  write_embeddings_file(emb_path, emb);
  auto manifest = cfg.describe();
  manifest["rows"] = std::to_string(emb.size());
  manifest["dim"] = std::to_string(emb.dim());
  write_manifest(manifest_path, manifest);
  log << "wrote " << emb.size() << " x " << emb.dim() << " " << to_string(cfg.article_method)
      << " paper embeddings to " << emb_path << '\n';
  return 0;
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
  cfg.validate(false);
  DirLock lock(cfg.out_dir);
  const Corpus corpus = load_corpus(cfg.out_dir);
  const FeatureMatrix features = run_features(corpus, cfg);
  const EdgeSplit split = make_split(corpus, cfg);
  {
    auto out = open_output(join_path(cfg.out_dir, kSplitFile));
    write_split(out, split);
  }
  const LinkTrainResult result = train_link_model(corpus.coauthors, features, split, link_config(cfg));
  CheckpointMeta meta;
  meta.split_seed = split.seed;
  meta.config = cfg.describe();
  save_checkpoint(join_path(cfg.out_dir, kCheckpointFile), result.params, meta);
  {
    auto out = open_output(join_path(cfg.out_dir, kHistoryFile));
    out << "epoch,train_loss,val_accuracy,val_auc_roc,val_f1\n";
    out << "0," << fixed(result.initial_loss, 6) << ",,,\n";
    for (const auto& e : result.history) {
      out << e.epoch << ',' << fixed(e.train_loss, 6) << ',' << fixed(e.val_accuracy, 6) << ','
          << fixed(e.val_auc, 6) << ',' << fixed(e.val_f1, 6) << '\n';
    }
  }
  log << "split train=" << split.train.size() << " val=" << split.val.size()
      << " test=" << split.test.size() << "; features " << features.rows() << " x "
      << features.cols() << '\n';
  log << "initial train loss " << fixed(result.initial_loss, 4);
  if (!result.history.empty()) {
    const auto& last = result.history.back();
    log << ", final " << fixed(last.train_loss, 4) << "; best epoch " << result.best_epoch
        << " (val AUC-ROC " << fixed(result.history[result.best_epoch - 1].val_auc, 4) << ")";
  }
  log << '\n';
  return 0;
}

std::vector<MetricsReport> run_grid(const Corpus& corpus, const RunConfig& cfg,
                                    std::ostream* progress) {
  const EdgeSplit split = make_split(corpus, cfg);
  std::vector<MetricsReport> reports;
  const std::size_t total = 10 * (1 + 2 * (kAllArticleMethods.size() - 1));
  for (ArticleMethod method : kAllArticleMethods) {
    RunConfig run = cfg;
    run.article_method = method;
    const EmbeddingMatrix emb = embed_papers(corpus, run);
    std::vector<PaperPooling> poolings = {PaperPooling::kSum};
    if (method != ArticleMethod::kNone) poolings.push_back(PaperPooling::kMean);
    for (PaperPooling pooling : poolings) {
      run.pooling = pooling;
      const FeatureMatrix features = author_features(corpus, run, &emb);
      for (Aggregator agg : {Aggregator::kMean, Aggregator::kMaxPool}) {
        for (LinkOperator op : kAllOperators) {
          run.link.aggregator = agg;
          run.link.op = op;
          const LinkTrainResult result =
              train_link_model(corpus.coauthors, features, split, link_config(run));
          reports.push_back(evaluate_model(result.params, corpus, features, split,
                                           describe_model(run)));
          if (progress) {
            const auto& r = reports.back();
            *progress << '[' << reports.size() << '/' << total << "] "
                      << r.config.article_embedding << " | " << r.config.author_embedding
                      << " | " << r.config.op << " | AUC-ROC " << fixed(r.auc_roc, 4) << '\n';
          }
        }
      }
    }
  }
  return reports;
}

int cmd_evaluate(const RunConfig& cfg, bool grid, std::ostream& log) {
  cfg.validate(false);
  DirLock lock(cfg.out_dir);
  const Corpus corpus = load_corpus(cfg.out_dir);
  if (grid) {
    const auto reports = run_grid(corpus, cfg, &log);
    auto out = open_output(join_path(cfg.out_dir, kGridFile));
    out << results_table(reports, TableFormat::kCsv);
    log << results_table(reports, TableFormat::kText);
    return 0;
  }
  CheckpointMeta meta;
  const LinkModelParams params = load_checkpoint(join_path(cfg.out_dir, kCheckpointFile), &meta);
  EdgeSplit split;
  {
    auto in = open_input(join_path(cfg.out_dir, kSplitFile), " (run `train` first)");
    split = read_split(in);
  }
  if (split.seed != meta.split_seed) {
    throw ConsistencyError("split seed " + std::to_string(split.seed) +
                           " does not match the checkpoint's split seed " +
                           std::to_string(meta.split_seed));
  }
  const FeatureMatrix features = run_features(corpus, cfg);
  if (features.cols() != params.sage.input_dim()) {
    throw ConsistencyError("author features have " + std::to_string(features.cols()) +
                           " columns but the checkpoint expects " +
                           std::to_string(params.sage.input_dim()));
  }
  RunConfig described = cfg;
  described.link.aggregator = params.sage.aggregator;
  described.link.op = params.op;
  const MetricsReport report =
      evaluate_model(params, corpus, features, split, describe_model(described));
  const std::string results = join_path(cfg.out_dir, kResultsFile);
  const bool fresh = !fs::exists(results);
  std::ofstream out(results, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot write " + results);
  if (fresh) out << results_csv_header() << '\n';
  out << results_csv_row(report) << '\n';
  const std::vector<MetricsReport> one = {report};
  log << results_table(one, TableFormat::kText);
  return 0;
}

std::vector<std::string> closest_names(const AuthorTable& authors, std::string_view query,
                                       std::size_t count) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& name : authors.names.keys()) scored.emplace_back(edit_distance(query, name), name);
  const std::size_t keep = std::min(count, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < keep; ++i) names.push_back(scored[i].second);
  return names;
}

int cmd_recommend(const RunConfig& cfg, const std::string& author, std::size_t k,
                  std::ostream& log) {
  if (k == 0) throw ConfigError("--k must be at least 1");
  cfg.validate(false);
  const Corpus corpus = load_corpus(cfg.out_dir);
  std::optional<NodeId> u;
  if (!author.empty() && std::all_of(author.begin(), author.end(), ::isdigit)) {
    const auto id = std::stoull(author);
    if (id < corpus.authors.size()) u = static_cast<NodeId>(id);
  }
  if (!u) u = corpus.authors.names.find(normalize_author_name(author));
  if (!u) {
    std::string msg = "unknown author '" + author + "'; closest matches:";
    for (const auto& name : closest_names(corpus.authors, normalize_author_name(author))) {
      msg += " '" + name + "'";
    }
    throw LookupError(msg);
  }
  const LinkModelParams params = load_checkpoint(join_path(cfg.out_dir, kCheckpointFile));
  const FeatureMatrix features = run_features(corpus, cfg);
  if (features.cols() != params.sage.input_dim()) {
    throw ConsistencyError("author features do not match the checkpoint input size");
  }
  const auto recs =
      recommend(params, corpus.coauthors, features, *u, k, &corpus.author_metrics);
  if (recs.empty()) {
    log << "no recommendations for '" << corpus.authors.names.key(*u)
        << "': every other author is already a co-author\n";
    return 0;
  }
  log << "rank\tauthor\tname\tprobability\tissn\tquartile\th_index\timpact_factor\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    log << i + 1 << '\t' << r.author << '\t' << corpus.authors.names.key(r.author) << '\t'
        << fixed(r.probability, 4);
    if (r.info) {
      log << '\t' << r.info->issn.str() << '\t' << to_string(r.info->quartile) << '\t'
          << r.info->h_index << '\t' << fixed(r.info->impact_factor, 3);
    } else {
      log << "\t-\t-\t-\t-";
    }
    log << '\n';
  }
  return 0;
}

int cmd_gradcheck(const RunConfig& cfg, bool inject_wrong_gradient, std::ostream& log) {
  GradcheckOptions opt;
  opt.seed = cfg.seed;
  opt.inject_wrong_gradient = inject_wrong_gradient;
  const auto rows = run_gradcheck(opt);
  log << "family\tblock\tmax_rel_error\n";
  for (const auto& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", r.max_rel_error);
    log << r.family << '\t' << r.block << '\t' << buf
        << (r.max_rel_error > opt.tolerance ? "\tFAIL" : "") << '\n';
  }
  if (!gradcheck_passed(rows, opt.tolerance)) {
    log << "gradient check failed: tolerance " << opt.tolerance << " exceeded\n";
    return 4;
  }
  return 0;
}

int cmd_gen_synthetic(const RunConfig& cfg, const SyntheticOptions& options, std::ostream& log) {
  DirLock lock(cfg.out_dir);
  SyntheticCorpusConfig sc;
  sc.sbm.block_sizes = options.block_sizes;
  sc.sbm.p_in = options.p_in;
  sc.sbm.p_out = options.p_out;
  sc.sbm.seed = cfg.seed;
  const SyntheticCorpus corpus = generate_synthetic_corpus(sc);
  write_synthetic_corpus(corpus, cfg.out_dir);
  {
    auto out = open_output(join_path(cfg.out_dir, "synthetic.conf"));
    out << "# synthetic SBM corpus (blocks " << join_sizes(options.block_sizes)
        << ", p_in " << options.p_in << ", p_out " << options.p_out << ", seed " << cfg.seed
        << ")\n";
    out << "metadata = " << join_path(cfg.out_dir, "metadata.txt") << '\n';
    out << "edges = " << join_path(cfg.out_dir, "citations.txt") << '\n';
    out << "lookup = " << join_path(cfg.out_dir, "journals.tsv") << '\n';
    out << "metrics = " << join_path(cfg.out_dir, "metrics.csv") << '\n';
  }
  log << "nodes=" << corpus.sbm.graph.num_nodes() << " edges=" << corpus.sbm.graph.num_edges()
      << " papers=" << corpus.papers.size() << " citations=" << corpus.citations.size()
      << " journals=" << corpus.journals.size() << '\n';
  return 0;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const LookupError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
      dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const EmptyCorpusError*>(&e) ||
      dynamic_cast<const UnavailableMetricsError*>(&e) ||
      dynamic_cast<const ConsistencyError*>(&e) ||
      dynamic_cast<const std::filesystem::filesystem_error*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace coauthornet
