#include "coauthornet/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "coauthornet/errors.hpp"
#include "coauthornet/random.hpp"

namespace coauthornet {

namespace {

constexpr std::array<const char*, 8> kBlockNames = {"Alpha", "Beta",  "Gamma", "Delta",
                                                    "Epsilon", "Zeta", "Eta", "Theta"};
constexpr std::array<const char*, 16> kSyllables = {"ka", "lo", "mi", "ne", "ru", "si",
                                                    "ta", "vo", "xe", "zu", "pha", "qui",
                                                    "bre", "dro", "gli", "sto"};

std::string pseudo_word(std::size_t index) {
  std::string w;
  for (int i = 0; i < 3; ++i) {
    w += kSyllables[index % kSyllables.size()];
    index /= kSyllables.size();
  }
  return w;
}

std::string letter_code(std::size_t j) {
  return {static_cast<char>('a' + (j / 26) % 26), static_cast<char>('a' + j % 26)};
}

std::string block_name(std::size_t b) {
  return b < kBlockNames.size() ? kBlockNames[b] : "Block" + letter_code(b);
}

std::string journal_name(std::size_t block, std::size_t j) {
  return "Synth." + block_name(block) + " J" + letter_code(j);
}

}  // namespace

SbmGraph generate_sbm(const SbmConfig& cfg) {
  if (cfg.p_in < 0 || cfg.p_in > 1 || cfg.p_out < 0 || cfg.p_out > 1) {
    throw ConfigError("SBM probabilities must lie in [0, 1]");
  }
  SbmGraph out;
  for (std::size_t b = 0; b < cfg.block_sizes.size(); ++b) {
    out.block.insert(out.block.end(), cfg.block_sizes[b], b);
  }
  const std::size_t n = out.block.size();
  Rng rng(derive_seed(cfg.seed, "sbm"));
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double p = out.block[u] == out.block[v] ? cfg.p_in : cfg.p_out;
      if (rng.uniform() < p) edges.emplace_back(u, v);
    }
  }
  out.graph = Graph::build(edges, n, false);
  return out;
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusConfig& cfg) {
  if (cfg.journals_per_block == 0 || cfg.topic_words == 0 || cfg.common_words == 0) {
    throw ConfigError("synthetic corpus needs journals and vocabulary");
  }
  SyntheticCorpus corpus;
  corpus.sbm = generate_sbm(cfg.sbm);
  const std::size_t blocks = cfg.sbm.block_sizes.size();
  Rng rng(derive_seed(cfg.sbm.seed, "synthetic-corpus"));

  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < cfg.journals_per_block; ++j) {
      std::string digits;
      for (int i = 0; i < 7; ++i) digits.push_back(static_cast<char>('0' + rng.index(10)));
      const auto issn = Issn::parse(digits + Issn::check_character(digits));
      corpus.journals.emplace_back(normalize_journal(journal_name(b, j)), *issn);
      corpus.metrics.push_back({*issn, static_cast<Quartile>(rng.index(4)),
                                static_cast<std::int64_t>(10 + rng.index(190)),
                                std::round(rng.uniform(0.5, 8.0) * 1000.0) / 1000.0});
    }
  }

  auto author_name = [](NodeId v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "Author %04u", v);
    return std::string(buf);
  };
  auto make_paper = [&](std::vector<std::string> authors, std::size_t block) {
    const std::size_t i = corpus.papers.size();
    PaperRecord p;
    p.paper_id = 1000001 + static_cast<std::int64_t>(i);
    p.title = "Synthetic study " + std::to_string(i);
    for (auto& a : authors) a = normalize_author_name(a);
    p.authors = std::move(authors);
    const std::size_t j = rng.index(cfg.journals_per_block);
    p.journal_ref = journal_name(block, j) + " " + std::to_string(1 + rng.index(60)) + " (" +
                    std::to_string(1993 + rng.index(11)) + ") " + std::to_string(1 + rng.index(900));
    char date[16];
    std::snprintf(date, sizeof date, "%04d-%02d-%02d", 1993 + static_cast<int>(i % 11),
                  1 + static_cast<int>(i % 12), 1 + static_cast<int>(i % 28));
    p.date = date;
    std::string abstract;
    for (std::size_t w = 0; w < cfg.abstract_words; ++w) {
      const bool topic = rng.uniform() < cfg.topic_fraction;
      const std::size_t idx = topic ? 1000 + block * cfg.topic_words + rng.index(cfg.topic_words)
                                    : rng.index(cfg.common_words);
      if (!abstract.empty()) abstract.push_back(' ');
      abstract += pseudo_word(idx);
    }
    p.abstract = abstract + ".";
    corpus.papers.push_back(std::move(p));
    corpus.paper_block.push_back(block);
  };

  const Graph& g = corpus.sbm.graph;
  for (NodeId v = 0; v < g.num_nodes(); ++v) make_paper({author_name(v)}, corpus.sbm.block[v]);
  for (const auto& [u, v] : g.edges()) {
    const std::size_t bu = corpus.sbm.block[u], bv = corpus.sbm.block[v];
    make_paper({author_name(u), author_name(v)}, bu == bv || rng.index(2) == 0 ? bu : bv);
  }
  for (std::size_t i = 0; i < cfg.anonymous_papers; ++i) make_paper({}, rng.index(blocks));

  std::vector<std::vector<std::size_t>> by_block(blocks);
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    const std::size_t b = corpus.paper_block[i];
    for (std::size_t c = 0; c < cfg.citations_per_paper && i > 0; ++c) {
      std::size_t target;
      if (!by_block[b].empty() && rng.uniform() < cfg.citation_in_block) {
        target = by_block[b][rng.index(by_block[b].size())];
      } else {
        target = rng.index(i);
      }
      corpus.citations.emplace_back(corpus.papers[i].paper_id, corpus.papers[target].paper_id);
    }
    by_block[b].push_back(i);
  }
  return corpus;
}

void write_paper_metadata(std::ostream& out, const std::vector<PaperRecord>& papers) {
  for (std::size_t i = 0; i < papers.size(); ++i) {
    const auto& p = papers[i];
    if (i > 0) out << kRecordSeparator << '\n';
    out << "Paper: " << p.paper_id << '\n';
    if (p.date) out << "Date: " << *p.date << '\n';
    out << "Title: " << p.title << '\n';
    out << "Authors: ";
    for (std::size_t a = 0; a < p.authors.size(); ++a) {
      if (a > 0) out << (a + 1 == p.authors.size() ? " and " : ", ");
      out << p.authors[a];
    }
    out << '\n';
    if (p.journal_ref) out << "Journal-ref: " << *p.journal_ref << '\n';
    out << '\n' << p.abstract << '\n';
  }
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw IoError("cannot write " + dir + "/" + name);
    return out;
  };
  {
    auto out = open("metadata.txt");
    write_paper_metadata(out, corpus.papers);
  }
  {
    auto out = open("citations.txt");
    out << "# FromNodeId\tToNodeId\n";
    for (const auto& [a, b] : corpus.citations) out << a << '\t' << b << '\n';
  }
  {
    auto out = open("journals.tsv");
    for (const auto& [prefix, issn] : corpus.journals) out << prefix << '\t' << issn.str() << '\n';
  }
  {
    auto out = open("metrics.csv");
    out << "issn,quartile,h_index,impact_factor\n";
    for (const auto& m : corpus.metrics) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", m.impact_factor);
      out << m.issn.str() << ',' << to_string(m.quartile) << ',' << m.h_index << ',' << buf << '\n';
    }
  }
}

}  // namespace coauthornet
