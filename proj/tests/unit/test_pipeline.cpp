#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coauthornet/checkpoint.hpp"
#include "coauthornet/errors.hpp"
#include "coauthornet/pipeline.hpp"

using namespace coauthornet;
namespace fs = std::filesystem;

namespace {

const std::string kData = COAUTHORNET_TEST_DATA;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "coauthornet_pipeline" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != ".lock")
      files[entry.path().filename().string()] = slurp(entry.path());
  return files;
}

RunConfig five_paper_config(const fs::path& out) {
  RunConfig cfg;
  cfg.out_dir = out.string();
  cfg.metadata_path = kData + "/five_papers.txt";
  cfg.edges_path = kData + "/five_citations.txt";
  cfg.lookup_path = kData + "/lookup.tsv";
  cfg.metrics_path = kData + "/metrics.csv";
  return cfg;
}

// Small synthetic run shared by the command tests.
class SyntheticRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fresh_dir("synthetic");
    RunConfig gen;
    gen.out_dir = (root_ / "corpus").string();
    std::ostringstream log;
    ASSERT_EQ(cmd_gen_synthetic(gen, {}, log), 0);
  }

  static RunConfig config(const std::string& name) {
    RunConfig cfg;
    cfg.out_dir = (root_ / name).string();
    cfg.metadata_path = (root_ / "corpus" / "metadata.txt").string();
    cfg.edges_path = (root_ / "corpus" / "citations.txt").string();
    cfg.lookup_path = (root_ / "corpus" / "journals.tsv").string();
    cfg.metrics_path = (root_ / "corpus" / "metrics.csv").string();
    cfg.article_method = ArticleMethod::kNone;
    cfg.link.epochs = 2;
    cfg.article_dims = 8;
    cfg.article_epochs = 1;
    cfg.walk.walk_length = 10;
    cfg.walk.walks_per_node = 2;
    cfg.walk.window = 3;
    return cfg;
  }

  static RunConfig ingested(const std::string& name) {
    RunConfig cfg = config(name);
    std::ostringstream log;
    cmd_ingest(cfg, log);
    return cfg;
  }

  static fs::path root_;
};
fs::path SyntheticRun::root_;

}  // namespace

TEST(Ingest, FivePaperFixtureStats) {
  const fs::path out = fresh_dir("five");
  std::ostringstream log;
  ASSERT_EQ(cmd_ingest(five_paper_config(out), log), 0);
  const std::string expect =
      "papers=5 skipped_records=1 dropped_anonymous=1 authors=5 collaboration_edges=5 "
      "citation_edges=3 dropped_citations=2 papers_with_issn=3\n";
  EXPECT_EQ(log.str(), expect);
  EXPECT_EQ(slurp(out / "ingest_stats.txt"), expect);

  const Corpus corpus = load_corpus(out.string());
  EXPECT_EQ(corpus.authors.names.keys(),
            (std::vector<std::string>{"a. smith", "b. jones", "c. lee", "d. kim", "e. novak"}));
  EXPECT_TRUE(corpus.coauthors.has_edge(0, 4));
  EXPECT_EQ(corpus.coauthors.degree(3), 0u);
  ASSERT_TRUE(corpus.author_metrics[0]);
  EXPECT_EQ(corpus.author_metrics[0]->issn.str(), "0556-2821");
  EXPECT_EQ(corpus.author_metrics[1]->issn.str(), "0556-2821");
  EXPECT_FALSE(corpus.author_metrics[3]);
}

TEST(Ingest, RerunIsByteIdentical) {
  const fs::path a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
  std::ostringstream log;
  cmd_ingest(five_paper_config(a), log);
  const auto first = snapshot(a);
  cmd_ingest(five_paper_config(a), log);
  EXPECT_EQ(snapshot(a), first);
  cmd_ingest(five_paper_config(b), log);
  EXPECT_EQ(snapshot(b), first);
}

TEST(Ingest, MissingMetadataNamesPath) {
  RunConfig cfg = five_paper_config(fresh_dir("missing"));
  cfg.metadata_path = "/nonexistent/meta.txt";
  std::ostringstream log;
  try {
    cmd_ingest(cfg, log);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/meta.txt"), std::string::npos);
    EXPECT_EQ(exit_code_for(e), 2);
  }
}

TEST(Ingest, ReadsCorpusBackExactly) {
  const fs::path out = fresh_dir("roundtrip");
  const RunConfig cfg = five_paper_config(out);
  const Corpus built = build_corpus(cfg);
  save_corpus(built, out.string());
  const Corpus loaded = load_corpus(out.string());
  EXPECT_EQ(loaded.coauthors, built.coauthors);
  EXPECT_EQ(loaded.citations, built.citations);
  EXPECT_EQ(loaded.paper_tokens, built.paper_tokens);
  EXPECT_EQ(loaded.abstracts, built.abstracts);
  EXPECT_EQ(loaded.interests.matrix, built.interests.matrix);
  EXPECT_EQ(loaded.interests.vocabulary, built.interests.vocabulary);
  EXPECT_EQ(loaded.authors.papers, built.authors.papers);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(LookupError("x")), 3);
  EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
  EXPECT_EQ(exit_code_for(IoError("x")), 2);
  EXPECT_EQ(exit_code_for(FormatError("x")), 2);
  EXPECT_EQ(exit_code_for(ConsistencyError("x")), 2);
  EXPECT_EQ(exit_code_for(DivergenceError("x", 3)), 1);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}

TEST(Config, ArticleMethodNames) {
  for (ArticleMethod m : kAllArticleMethods) EXPECT_EQ(parse_article_method(to_string(m)), m);
  EXPECT_THROW(parse_article_method("word2vec"), ConfigError);
  RunConfig cfg;
  EXPECT_EQ(cfg.article_method, ArticleMethod::kSageMean);
  EXPECT_EQ(cfg.link.aggregator, Aggregator::kMean);
  EXPECT_EQ(cfg.link.op, LinkOperator::kL2);
  EXPECT_EQ(cfg.link.batch_size, 512u);
  EXPECT_EQ(cfg.link.epochs, 20u);
  EXPECT_EQ(describe_model(cfg),
            (ConfigDescriptor{"GraphSAGE (Mean)", "GraphSAGE (Mean)", "L2"}));
  cfg.link.sample_sizes = {10};
  EXPECT_THROW(cfg.validate(false), ConfigError);
}

TEST_F(SyntheticRun, EmbedNoneSkipsWithMessage) {
  const RunConfig cfg = ingested("embed_none");
  std::ostringstream log;
  EXPECT_EQ(cmd_embed(cfg, log), 0);
  EXPECT_NE(log.str().find("none"), std::string::npos);
  EXPECT_FALSE(fs::exists(fs::path(cfg.out_dir) / "paper_embeddings.emb"));
}

TEST_F(SyntheticRun, EmbedAbstractsOnlyPassesVectorsThrough) {
  RunConfig cfg = ingested("embed_abstracts");
  cfg.article_method = ArticleMethod::kAbstractsOnly;
  std::ostringstream log;
  cmd_embed(cfg, log);
  const EmbeddingMatrix emb =
      read_embeddings_file((fs::path(cfg.out_dir) / "paper_embeddings.emb").string());
  const Corpus corpus = load_corpus(cfg.out_dir);
  ASSERT_EQ(emb.size(), corpus.paper_tokens.size());
  EXPECT_EQ(emb.to_matrix(), corpus.abstracts);
  EXPECT_EQ(emb.labels(), corpus.paper_tokens);
}

TEST_F(SyntheticRun, EmbedIsDeterministic) {
  for (ArticleMethod m : {ArticleMethod::kNode2Vec, ArticleMethod::kAttri2Vec,
                          ArticleMethod::kSageMean, ArticleMethod::kSageMaxPool}) {
    const std::string name = "embed_" + std::string(to_string(m));
    RunConfig cfg = ingested(name);
    cfg.article_method = m;
    std::ostringstream log;
    cmd_embed(cfg, log);
    const auto first = snapshot(cfg.out_dir);
    cmd_embed(cfg, log);
    EXPECT_EQ(snapshot(cfg.out_dir), first) << name;
    const EmbeddingMatrix emb =
        read_embeddings_file((fs::path(cfg.out_dir) / "paper_embeddings.emb").string());
    EXPECT_EQ(emb.dim(), 8u);
  }
}

TEST_F(SyntheticRun, TrainEvaluateTwiceIdenticalRows) {
  const RunConfig cfg = ingested("train_eval");
  std::ostringstream log;
  cmd_embed(cfg, log);
  ASSERT_EQ(cmd_train(cfg, log), 0);
  const std::string history = slurp(fs::path(cfg.out_dir) / "history.csv");
  EXPECT_EQ(history.substr(0, history.find('\n')), "epoch,train_loss,val_accuracy,val_auc_roc,val_f1");
  cmd_evaluate(cfg, false, log);
  cmd_evaluate(cfg, false, log);
  std::istringstream rows(slurp(fs::path(cfg.out_dir) / "results.csv"));
  std::string header, first, second, extra;
  std::getline(rows, header);
  std::getline(rows, first);
  std::getline(rows, second);
  EXPECT_EQ(header, "article_embedding,author_embedding,operator,accuracy,auc_roc,f1");
  EXPECT_EQ(first.rfind("--,GraphSAGE (Mean),L2,", 0), 0u) << first;
  EXPECT_EQ(first, second);
  EXPECT_FALSE(std::getline(rows, extra));
}

TEST_F(SyntheticRun, TrainingIsByteIdentical) {
  const RunConfig a = ingested("det_a");
  const RunConfig b = ingested("det_b");
  std::ostringstream log;
  cmd_train(a, log);
  cmd_train(b, log);
  const fs::path pa(a.out_dir), pb(b.out_dir);
  for (const char* f : {"model.ckpt", "history.csv", "split.tsv", "coauthor_graph.txt",
                        "interests.emb", "abstracts.emb"})
    EXPECT_EQ(slurp(pa / f), slurp(pb / f)) << f;
}

TEST_F(SyntheticRun, SeedMismatchIsConsistencyError) {
  RunConfig a = ingested("seed_a");
  RunConfig b = ingested("seed_b");
  b.seed = 8;
  std::ostringstream log;
  cmd_train(a, log);
  cmd_train(b, log);
  fs::copy_file(fs::path(b.out_dir) / "split.tsv", fs::path(a.out_dir) / "split.tsv",
                fs::copy_options::overwrite_existing);
  EXPECT_THROW(cmd_evaluate(a, false, log), ConsistencyError);
}

TEST_F(SyntheticRun, ZeroEpochCheckpointIsInitialization) {
  RunConfig cfg = ingested("epochs0");
  cfg.link.epochs = 0;
  std::ostringstream log;
  cmd_train(cfg, log);
  const LinkModelParams saved = load_checkpoint((fs::path(cfg.out_dir) / "model.ckpt").string());
  const Corpus corpus = load_corpus(cfg.out_dir);
  const FeatureMatrix x = author_features(corpus, cfg, nullptr);
  LinkModelConfig link = cfg.link;
  link.seed = purpose_seed(cfg, "link-model");
  Rng rng(derive_seed(link.seed, "link-model"));
  EXPECT_EQ(saved, init_link_model(x.cols(), link, rng));
}

TEST_F(SyntheticRun, RecommendMatchesLibraryRanking) {
  const RunConfig cfg = ingested("recommend");
  std::ostringstream log;
  cmd_train(cfg, log);
  std::ostringstream out;
  ASSERT_EQ(cmd_recommend(cfg, "Author 0003", 5, out), 0);

  const Corpus corpus = load_corpus(cfg.out_dir);
  const LinkModelParams params = load_checkpoint((fs::path(cfg.out_dir) / "model.ckpt").string());
  const auto recs = recommend(params, corpus.coauthors, author_features(corpus, cfg, nullptr), 3, 5);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "rank\tauthor\tname\tprobability\tissn\tquartile\th_index\timpact_factor");
  for (std::size_t i = 0; i < recs.size(); ++i) {
    ASSERT_TRUE(std::getline(lines, line));
    std::istringstream cells(line);
    std::string rank, author, name_first, name_last, prob;
    cells >> rank >> author >> name_first >> name_last >> prob;
    EXPECT_EQ(rank, std::to_string(i + 1));
    EXPECT_EQ(author, std::to_string(recs[i].author));
    EXPECT_NEAR(std::stod(prob), recs[i].probability, 5e-5);
  }
  EXPECT_FALSE(std::getline(lines, line));
}

TEST_F(SyntheticRun, RecommendErrors) {
  const RunConfig cfg = ingested("recommend_errors");
  std::ostringstream log;
  cmd_train(cfg, log);
  try {
    cmd_recommend(cfg, "Autor 0003", 5, log);
    FAIL();
  } catch (const LookupError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("closest matches"), std::string::npos);
    EXPECT_NE(msg.find("'author 0003'"), std::string::npos) << msg;
    EXPECT_EQ(exit_code_for(e), 3);
  }
  EXPECT_THROW(cmd_recommend(cfg, "Author 0003", 0, log), ConfigError);
}

TEST(PerfectStub, EvaluatesToOnes) {
  // Two disjoint 4-cliques; every non-edge crosses blocks.
  std::vector<Edge> e;
  for (NodeId b : {0u, 4u})
    for (NodeId i = 0; i < 4; ++i)
      for (NodeId j = i + 1; j < 4; ++j) e.emplace_back(b + i, b + j);
  Corpus corpus;
  corpus.coauthors = Graph::build(e, 8, false);
  FeatureMatrix x(8, 2, 0.0);
  for (NodeId v = 0; v < 8; ++v) x(v, v < 4 ? 0 : 1) = 1.0;
  LinkModelParams p;
  p.sage.aggregator = Aggregator::kMean;
  p.sage.activation = Activation::kLinear;
  p.sage.normalize = false;
  p.sage.layers.push_back({Matrix(2, 4, {1, 0, 1, 0, 0, 1, 0, 1}), {}, {}});
  p.op = LinkOperator::kHadamard;
  p.classifier_weight = {1, 1};
  p.classifier_bias = -2;
  const EdgeSplit split = split_edges(corpus.coauthors, {3, 1, 2}, 1);
  const MetricsReport r = evaluate_model(p, corpus, x, split, {});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.auc_roc, 1.0);
  EXPECT_EQ(r.f1, 1.0);
}
