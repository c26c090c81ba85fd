#include "coauthornet/journal.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coauthornet/errors.hpp"

namespace coauthornet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

char Issn::check_character(std::string_view seven_digits) {
  int sum = 0;
  for (std::size_t i = 0; i < 7; ++i) sum += (seven_digits[i] - '0') * static_cast<int>(8 - i);
  const int check = (11 - sum % 11) % 11;
  return check == 10 ? 'X' : static_cast<char>('0' + check);
}

std::optional<Issn> Issn::parse(std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (c != '-') compact.push_back(c == 'x' ? 'X' : c);
  }
  if (compact.size() != 8) return std::nullopt;
  if (text.size() == 9 && text[4] != '-') return std::nullopt;
  if (text.size() != 8 && text.size() != 9) return std::nullopt;
  for (std::size_t i = 0; i < 7; ++i) {
    if (compact[i] < '0' || compact[i] > '9') return std::nullopt;
  }
  if (check_character(compact) != compact[7]) return std::nullopt;
  return Issn(compact.substr(0, 4) + "-" + compact.substr(4));
}

std::string_view to_string(Quartile q) {
  switch (q) {
    case Quartile::kQ1: return "Q1";
    case Quartile::kQ2: return "Q2";
    case Quartile::kQ3: return "Q3";
    case Quartile::kQ4: return "Q4";
    case Quartile::kUnknown: return "unknown";
  }
  return "unknown";
}

Quartile parse_quartile(std::string_view s) {
  const std::string t = trim(s);
  if (t == "Q1" || t == "q1") return Quartile::kQ1;
  if (t == "Q2" || t == "q2") return Quartile::kQ2;
  if (t == "Q3" || t == "q3") return Quartile::kQ3;
  if (t == "Q4" || t == "q4") return Quartile::kQ4;
  return Quartile::kUnknown;
}

std::string normalize_journal(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

JournalLookup JournalLookup::load(std::istream& in) {
  JournalLookup table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError("journal lookup line " + std::to_string(line_no) +
                        ": expected `prefix<TAB>ISSN`");
    }
    const std::string raw_issn = trim(std::string_view(line).substr(tab + 1));
    auto issn = Issn::parse(raw_issn);
    if (!issn) {
      throw ConfigError("journal lookup line " + std::to_string(line_no) +
                        ": invalid ISSN '" + raw_issn + "'");
    }
    table.add(normalize_journal(std::string_view(line).substr(0, tab)), *issn);
  }
  return table;
}

JournalLookup JournalLookup::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open journal lookup table " + path);
  return load(in);
}

void JournalLookup::add(std::string prefix, Issn issn) {
  entries_.insert_or_assign(std::move(prefix), std::move(issn));
}

std::optional<Issn> JournalLookup::longest_prefix(std::string_view normalized) const {
  for (std::size_t len = normalized.size(); len > 0; --len) {
    auto it = entries_.find(normalized.substr(0, len));
    if (it != entries_.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<Issn> extract_issn(const std::optional<std::string>& journal_ref,
                                 const JournalLookup& lookup) {
  if (!journal_ref) return std::nullopt;
  const std::string normalized = normalize_journal(*journal_ref);
  if (normalized.empty()) return std::nullopt;
  return lookup.longest_prefix(normalized);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  return fields;
}

MetricsMap load_journal_metrics(std::istream& in) {
  MetricsMap out;
  std::string line;
  if (!std::getline(in, line)) return out;
  const auto header = split_csv_line(line);
  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw SchemaError("metrics table is missing required column '" + std::string(name) + "'");
  };
  const std::size_t c_issn = column("issn");
  const std::size_t c_quartile = column("quartile");
  const std::size_t c_h = column("h_index");
  const std::size_t c_if = column("impact_factor");
  const std::size_t width = std::max({c_issn, c_quartile, c_h, c_if}) + 1;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < width) {
      spdlog::warn("metrics table line {}: too few columns, row skipped", line_no);
      continue;
    }
    auto issn = Issn::parse(trim(fields[c_issn]));
    if (!issn) {
      spdlog::warn("metrics table line {}: invalid ISSN '{}', row skipped", line_no,
                   fields[c_issn]);
      continue;
    }
    const std::string h_text = trim(fields[c_h]);
    const std::string if_text = trim(fields[c_if]);
    std::int64_t h = 0;
    double impact = 0.0;
    auto [hp, he] = std::from_chars(h_text.data(), h_text.data() + h_text.size(), h);
    auto [ip, ie] = std::from_chars(if_text.data(), if_text.data() + if_text.size(), impact);
    if (he != std::errc() || hp != h_text.data() + h_text.size() || h < 0 ||
        ie != std::errc() || ip != if_text.data() + if_text.size() || impact < 0.0 ||
        !std::isfinite(impact)) {
      spdlog::warn("metrics table line {}: malformed h_index/impact_factor, row skipped",
                   line_no);
      continue;
    }
    JournalMetrics m{*issn, parse_quartile(fields[c_quartile]), h, impact};
    if (out.contains(*issn)) {
      spdlog::warn("metrics table line {}: duplicate ISSN {}, later row wins", line_no,
                   issn->str());
    }
    out.insert_or_assign(*issn, std::move(m));
  }
  return out;
}

MetricsMap load_journal_metrics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics table " + path);
  return load_journal_metrics(in);
}

MetricsMap fetch_journal_metrics(const std::string& endpoint, const std::string& cache_path,
                                 bool network_enabled) {
  if (network_enabled) {
    std::string failure;
    const auto scheme_end = endpoint.find("://");
    const auto path_start =
        endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string host = endpoint.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : endpoint.substr(path_start);
    try {
      httplib::Client client(host);
      client.set_connection_timeout(5);
      client.set_read_timeout(15);
      auto res = client.Get(path);
      if (!res) {
        failure = httplib::to_string(res.error());
      } else if (res->status != 200) {
        failure = "HTTP status " + std::to_string(res->status);
      } else {
        std::filesystem::path cache(cache_path);
        if (cache.has_parent_path()) std::filesystem::create_directories(cache.parent_path());
        std::ofstream out(cache_path, std::ios::binary);
        if (!out) throw IoError("cannot write metrics cache " + cache_path);
        out << res->body;
        out.close();
        std::istringstream body(res->body);
        return load_journal_metrics(body);
      }
    } catch (const std::invalid_argument& e) {
      failure = e.what();
    }
    spdlog::warn("metrics fetch from {} failed ({}); trying cache {}", endpoint, failure,
                 cache_path);
  }
  if (std::filesystem::exists(cache_path)) return load_journal_metrics_file(cache_path);
  throw UnavailableMetricsError("journal metrics unavailable: no network result and no cache at " +
                                cache_path);
}

}  // namespace coauthornet
