#include "coauthornet/ingest.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "coauthornet/errors.hpp"
#include "coauthornet/journal.hpp"

namespace coauthornet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool gap = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      gap = !out.empty();
      continue;
    }
    if (gap) out.push_back(' ');
    gap = false;
    out.push_back(c);
  }
  return out;
}

// ASCII replacement for U+00C0..U+00FF.
constexpr std::array<const char*, 64> kLatin1 = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "y"};

// ASCII replacement for U+0100..U+017F, as (first code point, text) ranges.
struct Range {
  char32_t first;
  const char* text;
};
constexpr std::array<Range, 23> kLatinExtA = {{
    {0x100, "a"}, {0x106, "c"}, {0x10E, "d"}, {0x112, "e"}, {0x11C, "g"}, {0x124, "h"},
    {0x128, "i"}, {0x132, "ij"}, {0x134, "j"}, {0x136, "k"}, {0x139, "l"}, {0x143, "n"},
    {0x14C, "o"}, {0x152, "oe"}, {0x154, "r"}, {0x15A, "s"}, {0x162, "t"}, {0x168, "u"},
    {0x174, "w"}, {0x176, "y"}, {0x179, "z"}, {0x17F, "s"}, {0x180, ""},
}};

std::string strip_diacritics(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0));
      ++i;
      continue;
    }
    if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size()) {
      const char32_t cp = ((b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      i += 2;
      if (cp >= 0xC0 && cp <= 0xFF) {
        out += kLatin1[cp - 0xC0];
      } else if (cp >= 0x100 && cp < 0x180) {
        const char* text = "";
        for (const auto& r : kLatinExtA) {
          if (cp >= r.first) text = r.text;
        }
        out += text;
      } else if (cp >= 0x300 && cp <= 0x36F) {
        // combining mark: dropped
      } else {
        out.append(s.substr(i - 2, 2));
      }
      continue;
    }
    std::size_t len = (b0 & 0xF0) == 0xE0 ? 3 : (b0 & 0xF8) == 0xF0 ? 4 : 1;
    len = std::min(len, s.size() - i);
    out.append(s.substr(i, len));
    i += len;
  }
  return out;
}

std::string strip_tex_accents(std::string_view s) {
  static const std::string_view kSymbolAccents = "\"'`^~=.";
  static const std::string_view kLetterAccents = "uvHckrdb";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '{' || c == '}') continue;
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (i + 1 >= s.size()) break;
    const char next = s[i + 1];
    if (kSymbolAccents.find(next) != std::string_view::npos) {
      ++i;
    } else if (kLetterAccents.find(next) != std::string_view::npos && i + 2 < s.size() &&
               (s[i + 2] == '{' || s[i + 2] == ' ')) {
      ++i;
    }
  }
  return out;
}

std::optional<std::string> parse_date(std::string_view raw) {
  const std::string t = trim(raw);
  auto digits = [](std::string_view v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (t.size() >= 10 && t[4] == '-' && t[7] == '-' && digits(t.substr(0, 4)) &&
      digits(t.substr(5, 2)) && digits(t.substr(8, 2))) {
    return t.substr(0, 10);
  }
  static const std::array<std::string_view, 12> kMonths = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  std::istringstream words(t);
  std::vector<std::string> tokens;
  for (std::string w; words >> w;) tokens.push_back(w);
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
    const std::string mon = normalize_journal(tokens[i + 1]).substr(0, 3);
    auto m = std::find(kMonths.begin(), kMonths.end(), mon);
    if (digits(tokens[i]) && tokens[i].size() <= 2 && m != kMonths.end() &&
        digits(tokens[i + 2]) && (tokens[i + 2].size() == 4 || tokens[i + 2].size() == 2)) {
      int year = std::stoi(tokens[i + 2]);
      if (tokens[i + 2].size() == 2) year += year < 50 ? 2000 : 1900;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year,
                    static_cast<int>(m - kMonths.begin()) + 1, std::stoi(tokens[i]));
      return std::string(buf);
    }
  }
  return std::nullopt;
}

std::optional<std::int64_t> parse_paper_id(std::string_view raw) {
  std::string t = trim(raw);
  if (const auto slash = t.rfind('/'); slash != std::string::npos) t = t.substr(slash + 1);
  if (t.empty() || t.size() > 18) return std::nullopt;
  std::int64_t v = 0;
  for (char c : t) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

// A line of at least 60 dashes and nothing else.
bool is_separator(std::string_view line) {
  return line.size() >= kRecordSeparator.size() &&
         line.find_first_not_of('-') == std::string_view::npos;
}

bool is_marker(std::string_view line) { return trim(line) == "\\\\"; }

std::optional<PaperRecord> parse_block(const std::vector<std::string>& lines) {
  // Two layouts: headers ended by a blank line, or sections fenced by `\\`
  // lines (headers, abstract) as in per-paper abstract files.
  std::vector<std::size_t> markers;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_marker(lines[i])) markers.push_back(i);
  }
  const bool fenced = markers.size() >= 2;

  std::map<std::string, std::string> headers;
  std::string last_key;
  std::size_t i = fenced ? markers[0] + 1 : 0;
  const std::size_t header_end = fenced ? markers[1] : lines.size();
  while (i < header_end && trim(lines[i]).empty()) ++i;
  for (; i < header_end; ++i) {
    const std::string& line = lines[i];
    if (is_marker(line)) continue;
    if (trim(line).empty()) {
      if (fenced) continue;
      break;
    }
    if (line[0] == ' ' || line[0] == '\t') {
      if (last_key.empty()) return std::nullopt;
      headers[last_key] += " " + trim(line);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) return std::nullopt;
    last_key = trim(std::string_view(line).substr(0, colon));
    headers[last_key] = trim(std::string_view(line).substr(colon + 1));
  }
  std::string abstract;
  const std::size_t abstract_end = fenced && markers.size() >= 3 ? markers[2] : lines.size();
  for (i = fenced ? markers[1] + 1 : i; i < abstract_end; ++i) {
    if (is_marker(lines[i])) continue;
    if (!abstract.empty()) abstract.push_back(' ');
    abstract += trim(lines[i]);
  }
  abstract = collapse_spaces(abstract);

  auto paper = headers.find("Paper");
  if (paper == headers.end() || abstract.empty()) return std::nullopt;
  auto id = parse_paper_id(paper->second);
  if (!id) return std::nullopt;

  PaperRecord rec;
  rec.paper_id = *id;
  rec.abstract = std::move(abstract);
  if (auto it = headers.find("Title"); it != headers.end()) rec.title = collapse_spaces(it->second);
  if (auto it = headers.find("Authors"); it != headers.end()) rec.authors = split_authors(it->second);
  if (auto it = headers.find("Journal-ref"); it != headers.end() && !it->second.empty()) {
    rec.journal_ref = collapse_spaces(it->second);
  }
  if (auto it = headers.find("Date"); it != headers.end()) rec.date = parse_date(it->second);
  return rec;
}

}  // namespace

std::string normalize_author_name(std::string_view raw) {
  std::string s = strip_tex_accents(raw);
  s = strip_diacritics(s);
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return collapse_spaces(s);
}

std::vector<std::string> split_authors(std::string_view raw) {
  // Parenthesized affiliations are not names.
  std::string cleaned;
  int depth = 0;
  for (char c : raw) {
    if (c == '(') ++depth;
    else if (c == ')') depth = std::max(0, depth - 1);
    else if (depth == 0) cleaned.push_back(c == '&' || c == ';' ? ',' : c);
  }
  std::vector<std::string> out;
  std::istringstream pieces(cleaned);
  for (std::string piece; std::getline(pieces, piece, ',');) {
    std::istringstream words(piece);
    std::string current;
    for (std::string w; words >> w;) {
      if (normalize_journal(w) == "and") {
        if (!current.empty()) out.push_back(normalize_author_name(current));
        current.clear();
        continue;
      }
      if (!current.empty()) current.push_back(' ');
      current += w;
    }
    if (!current.empty()) out.push_back(normalize_author_name(current));
  }
  std::erase_if(out, [](const std::string& s) { return s.empty(); });
  return out;
}

ParseResult parse_paper_metadata(std::istream& in) {
  ParseResult result;
  std::vector<std::string> block;
  std::size_t block_start = 1, line_no = 0;
  auto flush = [&] {
    const bool blank = std::all_of(block.begin(), block.end(),
                                   [](const std::string& l) { return trim(l).empty(); });
    if (!blank) {
      if (auto rec = parse_block(block)) {
        result.papers.push_back(std::move(*rec));
      } else {
        ++result.skipped;
        spdlog::warn("metadata: malformed record starting at line {} skipped", block_start);
      }
    }
    block.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_separator(line)) {
      flush();
      block_start = line_no + 1;
      continue;
    }
    block.push_back(line);
  }
  if (in.bad()) throw IoError("error while reading metadata stream");
  flush();
  if (result.papers.empty()) {
    throw EmptyCorpusError("metadata contains no well-formed records (" +
                           std::to_string(result.skipped) + " malformed)");
  }
  return result;
}

ParseResult parse_paper_metadata_file(const std::string& path) {
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::stringstream joined;
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      if (!in) throw IoError("cannot open metadata " + f.string());
      joined << in.rdbuf() << '\n' << kRecordSeparator << '\n';
    }
    return parse_paper_metadata(joined);
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metadata " + path);
  return parse_paper_metadata(in);
}

CoauthorNetwork reconstruct_coauthorship(std::span<const PaperRecord> papers) {
  CoauthorNetwork net;
  std::vector<Edge> edges;
  for (const auto& paper : papers) {
    if (paper.authors.empty()) {
      ++net.dropped_anonymous;
      continue;
    }
    const auto paper_id = static_cast<NodeId>(net.papers.size());
    net.papers.push_back(paper);
    std::vector<NodeId> ids;
    for (const auto& name : paper.authors) {
      const NodeId a = net.authors.names.intern(name);
      if (a == net.authors.papers.size()) net.authors.papers.emplace_back();
      auto& list = net.authors.papers[a];
      if (list.empty() || list.back() != paper_id) list.push_back(paper_id);
      ids.push_back(a);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) edges.emplace_back(ids[i], ids[j]);
    }
  }
  if (net.papers.empty()) {
    throw EmptyCorpusError("all " + std::to_string(papers.size()) + " papers are anonymous");
  }
  net.graph = Graph::build(edges, net.authors.size(), false);
  return net;
}

Graph build_citation_graph(const CoauthorNetwork& net,
                           std::span<const std::pair<std::int64_t, std::int64_t>> citations,
                           std::size_t* dropped) {
  std::unordered_map<std::int64_t, NodeId> index;
  for (std::size_t i = 0; i < net.papers.size(); ++i) {
    index.emplace(net.papers[i].paper_id, static_cast<NodeId>(i));
  }
  std::vector<Edge> edges;
  std::size_t missing = 0;
  for (const auto& [src, dst] : citations) {
    auto a = index.find(src);
    auto b = index.find(dst);
    if (a == index.end() || b == index.end()) {
      ++missing;
      continue;
    }
    edges.emplace_back(a->second, b->second);
  }
  if (dropped) *dropped = missing;
  return Graph::build(edges, net.papers.size(), true);
}

std::string journal_prefix(std::string_view journal_ref) {
  const std::string normalized = normalize_journal(journal_ref);
  const auto digit = normalized.find_first_of("0123456789");
  return trim(std::string_view(normalized).substr(0, digit));
}

std::vector<std::string> abstract_tokens(std::string_view text) {
  static const std::unordered_set<std::string> kStopWords = {
      "the", "and", "for", "are", "with", "that", "this", "from", "which", "these",
      "those", "can", "not", "but", "have", "has", "was", "were", "been", "being",
      "its", "their", "there", "then", "than", "also", "our", "into", "such", "some",
      "any", "all", "one", "two", "may", "more", "most", "other", "over", "under",
      "both", "each", "who", "whom", "what", "when", "where", "how", "why", "will",
      "would", "should", "could", "does", "did", "using", "use", "used", "via", "between",
      "show", "shown", "paper", "here", "we", "in", "of", "on", "by", "an", "as", "is",
      "it", "be", "at", "or", "to", "a", "new", "given", "well", "find", "found",
  };
  std::vector<std::string> out;
  std::string current;
  auto emit = [&] {
    const bool numeric = std::all_of(current.begin(), current.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
    if (current.size() >= 3 && !numeric && !kStopWords.contains(current)) out.push_back(current);
    current.clear();
  };
  for (char c : text) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (alnum) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!current.empty()) {
      emit();
    }
  }
  if (!current.empty()) emit();
  return out;
}

InterestFeatures derive_interest_features(const CoauthorNetwork& net, std::size_t vocab_size) {
  const std::size_t num_papers = net.papers.size();
  std::vector<std::string> prefixes(num_papers);
  std::vector<std::set<std::string>> tokens(num_papers);
  std::map<std::string, std::size_t> prefix_counts, token_counts;
  for (std::size_t p = 0; p < num_papers; ++p) {
    if (net.papers[p].journal_ref) prefixes[p] = journal_prefix(*net.papers[p].journal_ref);
    if (!prefixes[p].empty()) ++prefix_counts[prefixes[p]];
    for (auto& t : abstract_tokens(net.papers[p].abstract)) tokens[p].insert(std::move(t));
    for (const auto& t : tokens[p]) ++token_counts[t];
  }
  auto ranked = [](const std::map<std::string, std::size_t>& counts) {
    std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return v;
  };

  InterestFeatures out;
  std::map<std::string, std::size_t> journal_slot, token_slot;
  for (const auto& [prefix, count] : ranked(prefix_counts)) {
    if (out.vocabulary.size() == vocab_size) break;
    journal_slot.emplace(prefix, out.vocabulary.size());
    out.vocabulary.push_back("journal:" + prefix);
  }
  if (out.vocabulary.size() < vocab_size) {
    for (const auto& [token, count] : ranked(token_counts)) {
      if (out.vocabulary.size() == vocab_size) break;
      token_slot.emplace(token, out.vocabulary.size());
      out.vocabulary.push_back("abstract:" + token);
    }
  }

  out.matrix = FeatureMatrix(net.authors.size(), out.vocabulary.size());
  for (NodeId a = 0; a < net.authors.size(); ++a) {
    for (NodeId p : net.authors.papers[a]) {
      if (auto it = journal_slot.find(prefixes[p]); it != journal_slot.end()) {
        out.matrix(a, it->second) = 1.0;
      }
      for (const auto& t : tokens[p]) {
        if (auto it = token_slot.find(t); it != token_slot.end()) out.matrix(a, it->second) = 1.0;
      }
    }
  }
  return out;
}

}  // namespace coauthornet
