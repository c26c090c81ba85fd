#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coauthornet/graph.hpp"
#include "coauthornet/ingest.hpp"
#include "coauthornet/journal.hpp"

namespace coauthornet {

struct SbmConfig {
  std::vector<std::size_t> block_sizes = {50, 50};
  double p_in = 0.1;
  double p_out = 0.01;
  std::uint64_t seed = 7;
};

struct SbmGraph {
  Graph graph;
  std::vector<std::size_t> block;  // block of each node
};

// Every unordered pair is an edge independently with p_in (same block) or
// p_out (different blocks). Nodes are numbered block by block.
SbmGraph generate_sbm(const SbmConfig& cfg);

struct SyntheticCorpusConfig {
  SbmConfig sbm;
  std::size_t journals_per_block = 32;
  std::size_t topic_words = 60;       // block-specific abstract vocabulary
  std::size_t common_words = 200;
  std::size_t abstract_words = 40;
  double topic_fraction = 0.6;
  std::size_t anonymous_papers = 5;
  std::size_t citations_per_paper = 4;
  double citation_in_block = 0.8;
};

// A corpus in the ingest formats whose co-authorship graph is exactly the SBM:
// one single-author paper per node (in node order, so author ids equal SBM
// ids), then one two-author paper per SBM edge, then anonymous papers. Each
// paper belongs to a block, which picks its journal and abstract topic.
struct SyntheticCorpus {
  SbmGraph sbm;
  std::vector<PaperRecord> papers;
  std::vector<std::size_t> paper_block;
  std::vector<std::pair<std::int64_t, std::int64_t>> citations;
  std::vector<std::pair<std::string, Issn>> journals;  // normalized prefix -> ISSN
  std::vector<JournalMetrics> metrics;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusConfig& cfg);

// Writes metadata.txt, citations.txt, journals.tsv and metrics.csv into dir.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& dir);

// Serializes records in the block format read by parse_paper_metadata.
void write_paper_metadata(std::ostream& out, const std::vector<PaperRecord>& papers);

}  // namespace coauthornet
