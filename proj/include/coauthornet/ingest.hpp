#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coauthornet/graph.hpp"
#include "coauthornet/matrix.hpp"

namespace coauthornet {

inline constexpr std::string_view kRecordSeparator =
    "------------------------------------------------------------";

struct PaperRecord {
  std::int64_t paper_id = 0;
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;  // normalized, in listed order
  std::optional<std::string> journal_ref;
  std::optional<std::string> date;  // YYYY-MM-DD when parseable

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct ParseResult {
  std::vector<PaperRecord> papers;
  std::size_t skipped = 0;
};

// Block format: records separated by a line of 60 or more dashes; `Key: value`
// header lines (indented lines continue the previous header) up to the first
// blank line, then the abstract. Records fenced by `\\` lines (headers, then
// abstract) are read the same way. Records lacking a numeric `Paper:` id or an
// abstract are skipped and counted. Throws EmptyCorpusError if nothing parses.
ParseResult parse_paper_metadata(std::istream& in);
// A directory is read as the concatenation of every file below it, in path
// order, one record per file.
ParseResult parse_paper_metadata_file(const std::string& path);

// Lowercase, collapse whitespace, strip Latin diacritics and TeX accent macros.
std::string normalize_author_name(std::string_view raw);
// Splits an `Authors:` value on commas and the word "and".
std::vector<std::string> split_authors(std::string_view raw);

struct AuthorTable {
  IdTable<std::string> names;
  // Paper NodeIds (indices into CoauthorNetwork::papers) per author, ascending.
  std::vector<std::vector<NodeId>> papers;

  std::size_t size() const { return names.size(); }
};

struct CoauthorNetwork {
  Graph graph;                      // undirected author collaboration graph
  AuthorTable authors;
  std::vector<PaperRecord> papers;  // non-anonymous papers; index = paper NodeId
  std::size_t dropped_anonymous = 0;
};

// Drops papers without authors, then links every pair of co-listed authors.
// Throws EmptyCorpusError when no paper survives.
CoauthorNetwork reconstruct_coauthorship(std::span<const PaperRecord> papers);

// Directed citation graph over the surviving papers. Edges whose endpoints are
// not among them are dropped and counted in `dropped` when given.
Graph build_citation_graph(const CoauthorNetwork& net,
                           std::span<const std::pair<std::int64_t, std::int64_t>> citations,
                           std::size_t* dropped = nullptr);

struct InterestFeatures {
  FeatureMatrix matrix;                // authors x vocabulary.size()
  std::vector<std::string> vocabulary; // "journal:<prefix>" or "abstract:<token>"
};

// Journal name with volume/page data removed: normalized journal_ref cut at
// its first digit. Empty when nothing remains.
std::string journal_prefix(std::string_view journal_ref);
// Lowercase alphanumeric tokens of length >= 3, minus stop-words and numbers.
std::vector<std::string> abstract_tokens(std::string_view text);

// One-hot research interests. The vocabulary holds the `vocab_size` most
// common journal prefixes (by paper count, ties lexicographic); if the corpus
// has fewer, the remaining slots take the most common abstract tokens.
InterestFeatures derive_interest_features(const CoauthorNetwork& net, std::size_t vocab_size);

}  // namespace coauthornet
