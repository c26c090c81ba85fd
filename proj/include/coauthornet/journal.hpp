#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coauthornet {

// International Standard Serial Number: seven digits plus a mod-11 check
// character ('X' stands for 10).
class Issn {
 public:
  // Accepts "NNNN-NNNC" or "NNNNNNNC"; nullopt on bad shape or check digit.
  static std::optional<Issn> parse(std::string_view text);
  // Check character implied by the first seven digits.
  static char check_character(std::string_view seven_digits);

  // Canonical hyphenated form, e.g. "0378-5955".
  const std::string& str() const { return text_; }

  friend auto operator<=>(const Issn&, const Issn&) = default;

 private:
  explicit Issn(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

enum class Quartile { kQ1, kQ2, kQ3, kQ4, kUnknown };

std::string_view to_string(Quartile q);
Quartile parse_quartile(std::string_view s);

struct JournalMetrics {
  Issn issn;
  Quartile quartile = Quartile::kUnknown;
  std::int64_t h_index = 0;
  double impact_factor = 0.0;
};

using MetricsMap = std::map<Issn, JournalMetrics>;

// Lowercase, whitespace-collapsed, trimmed journal string.
std::string normalize_journal(std::string_view text);

// Normalized journal-name prefix -> ISSN table, matched by longest prefix.
class JournalLookup {
 public:
  JournalLookup() = default;
  // One `prefix<TAB>ISSN` per line; any invalid ISSN raises ConfigError.
  static JournalLookup load(std::istream& in);
  static JournalLookup load_file(const std::string& path);

  void add(std::string prefix, Issn issn);
  std::optional<Issn> longest_prefix(std::string_view normalized) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Issn, std::less<>> entries_;
};

std::optional<Issn> extract_issn(const std::optional<std::string>& journal_ref,
                                 const JournalLookup& lookup);

// Comma-separated `issn,quartile,h_index,impact_factor` with header. Rows with
// an invalid ISSN or malformed numbers are skipped; duplicates: last row wins.
// Missing column raises SchemaError.
MetricsMap load_journal_metrics(std::istream& in);
MetricsMap load_journal_metrics_file(const std::string& path);

// Downloads the rankings table from `endpoint` (http://host[:port]/path) when
// `network_enabled`, persists it at cache_path, then parses it. Falls back to
// the cache on any network failure; without a cache raises
// UnavailableMetricsError.
MetricsMap fetch_journal_metrics(const std::string& endpoint, const std::string& cache_path,
                                 bool network_enabled);

// Minimal RFC-4180 field splitter (quoted fields, doubled quotes).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace coauthornet
