#pragma once

#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratebound/error.hpp"
#include "ratebound/monitoring.hpp"
#include "ratebound/rating_core.hpp"

// File formats:
//   profile   grade,probability   one row per grade, 1..k ascending
//   PD curve  grade,pd            same layout
//   overrides borrower_id,rating_date,proposed_grade,final_grade,reason_code,default_within_period
//             empty field = missing optional; dates YYYY-MM-DD; default flag 0/1 (or false/true)

namespace ratebound::io {

enum class Format { plain, csv, json };

inline Format parse_format(std::string_view s) {
  if (s == "plain") return Format::plain;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw Error(ErrorKind::invalid_argument, "unknown format '" + std::string(s) + "'");
}

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

/// Value rounded to the 6 decimals every text format prints.
inline double round6(double x) {
  return std::stod(fixed6(x));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::string(trim(field)));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted field");
  out.push_back(std::string(trim(field)));
  return out;
}

inline std::string quote_csv(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline int parse_int(std::string_view s, std::size_t line_no, const char *what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line_no, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

inline double parse_double(std::string_view s, std::size_t line_no, const char *what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    throw ParseError(line_no, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

inline std::chrono::year_month_day parse_date(std::string_view s, std::size_t line_no) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
    throw ParseError(line_no, "rating_date must be YYYY-MM-DD, got '" + std::string(s) + "'");
  }
  const int y = parse_int(s.substr(0, 4), line_no, "year");
  const int m = parse_int(s.substr(5, 2), line_no, "month");
  const int d = parse_int(s.substr(8, 2), line_no, "day");
  const std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(static_cast<unsigned>(m)),
                                        std::chrono::day(static_cast<unsigned>(d))};
  if (!ymd.ok()) throw ParseError(line_no, "invalid calendar date '" + std::string(s) + "'");
  return ymd;
}

inline std::optional<bool> parse_flag(std::string_view s, std::size_t line_no) {
  if (s.empty()) return std::nullopt;
  if (s == "1" || s == "true" || s == "TRUE") return true;
  if (s == "0" || s == "false" || s == "FALSE") return false;
  throw ParseError(line_no, "default_within_period must be 0, 1 or empty, got '" + std::string(s) + "'");
}

inline std::string format_date(const std::chrono::year_month_day &d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

/// Reads a two-column grade,value table. Grades must run 1..k in order.
inline std::vector<double> read_grade_table(std::istream &in, std::string_view value_header) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(0, "empty input");
  ++line_no;
  const auto header = split_csv(line, line_no);
  if (header.size() != 2 || header[0] != "grade" || header[1] != value_header) {
    throw ParseError(line_no, "expected header 'grade," + std::string(value_header) + "'");
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line, line_no);
    if (fields.size() != 2) throw ParseError(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    const int grade = parse_int(fields[0], line_no, "grade");
    if (grade != static_cast<int>(values.size()) + 1) {
      throw ParseError(line_no, "grades must be 1..k ascending; expected " + std::to_string(values.size() + 1) +
                                    ", got " + std::to_string(grade));
    }
    values.push_back(parse_double(fields[1], line_no, std::string(value_header).c_str()));
  }
  if (values.size() < 2) throw ParseError(line_no, "need at least 2 grades");
  return values;
}

template <class T, class Reader>
T read_file(const std::string &path, Reader reader) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  try {
    return reader(in);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path + ": " + e.message());
  }
}

} // namespace detail

inline RatingProfile read_profile(std::istream &in) {
  auto values = detail::read_grade_table(in, "probability");
  try {
    return RatingProfile(std::move(values));
  } catch (const Error &e) {
    throw ParseError(0, e.what());
  }
}

inline PdCurve read_pd_curve(std::istream &in) {
  auto values = detail::read_grade_table(in, "pd");
  try {
    return PdCurve(std::move(values));
  } catch (const Error &e) {
    throw ParseError(0, e.what());
  }
}

inline RatingProfile read_profile_file(const std::string &path) {
  return detail::read_file<RatingProfile>(path, [](std::istream &in) { return read_profile(in); });
}

inline PdCurve read_pd_curve_file(const std::string &path) {
  return detail::read_file<PdCurve>(path, [](std::istream &in) { return read_pd_curve(in); });
}

inline void write_profile(std::ostream &out, const RatingProfile &profile) {
  out << "grade,probability\n";
  for (int s = 1; s <= profile.grades(); ++s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", profile.mass(s));
    out << s << ',' << buf << '\n';
  }
}

/// PD values are written with full round-trip precision.
inline void write_pd_curve(std::ostream &out, const PdCurve &curve) {
  out << "grade,pd\n";
  for (int s = 1; s <= curve.grades(); ++s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", curve.pd(s));
    out << s << ',' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Override records
// ---------------------------------------------------------------------------

inline constexpr std::string_view kRecordHeader =
    "borrower_id,rating_date,proposed_grade,final_grade,reason_code,default_within_period";

struct RowIssue {
  std::size_t line;
  std::string message;
};

struct RecordReadResult {
  std::vector<OverrideRecord> records;
  std::vector<RowIssue> rejected; // malformed rows, skipped
};

/// Parses override records. Malformed rows are collected in `rejected`
/// with their line numbers; a bad header is fatal. With `grades` set,
/// out-of-scale grades count as malformed.
inline RecordReadResult read_records(std::istream &in, std::optional<int> grades = std::nullopt) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(0, "empty input");
  if (detail::trim(line) != kRecordHeader) {
    throw ParseError(1, "expected header '" + std::string(kRecordHeader) + "'");
  }
  RecordReadResult result;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const auto f = detail::split_csv(line, line_no);
      if (f.size() != 6) throw ParseError(line_no, "expected 6 fields, got " + std::to_string(f.size()));
      OverrideRecord r;
      if (f[0].empty()) throw ParseError(line_no, "borrower_id is empty");
      r.borrower_id = f[0];
      r.rating_date = detail::parse_date(f[1], line_no);
      r.proposed_grade = detail::parse_int(f[2], line_no, "proposed_grade");
      r.final_grade = detail::parse_int(f[3], line_no, "final_grade");
      const int hi = grades.value_or(std::numeric_limits<int>::max());
      if (r.proposed_grade < 1 || r.proposed_grade > hi || r.final_grade < 1 || r.final_grade > hi) {
        throw ParseError(line_no, "grade outside 1.." + (grades ? std::to_string(*grades) : std::string("k")));
      }
      if (!f[4].empty()) r.reason_code = f[4];
      r.defaulted = detail::parse_flag(f[5], line_no);
      result.records.push_back(std::move(r));
    } catch (const ParseError &e) {
      result.rejected.push_back({line_no, e.message()});
    }
  }
  return result;
}

inline RecordReadResult read_records_file(const std::string &path, std::optional<int> grades = std::nullopt) {
  return detail::read_file<RecordReadResult>(path, [&](std::istream &in) { return read_records(in, grades); });
}

inline void write_records(std::ostream &out, std::span<const OverrideRecord> records) {
  out << kRecordHeader << '\n';
  for (const auto &r : records) {
    out << detail::quote_csv(r.borrower_id) << ',' << detail::format_date(r.rating_date) << ','
        << r.proposed_grade << ',' << r.final_grade << ',' << detail::quote_csv(r.reason_code.value_or("")) << ','
        << (r.defaulted ? (*r.defaulted ? "1" : "0") : "") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Monitoring report
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json report_to_json(const MonitoringReport &rep) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double> &x) { return x ? ordered_json(round6(*x)) : ordered_json(nullptr); };
  ordered_json j;
  j["n_actions"] = rep.n_actions;
  j["n_overrides"] = rep.n_overrides;
  j["override_rate"] = round6(rep.override_rate);
  j["natural_error_rate"] = round6(rep.natural_error_rate);
  j["bound_breached"] = rep.bound_breached;
  j["n_upgrades"] = rep.n_upgrades;
  j["n_downgrades"] = rep.n_downgrades;
  j["n_outcomes"] = rep.n_outcomes;
  j["n_defaults"] = rep.n_defaults;
  j["ar_pre"] = opt(rep.ar_pre);
  j["ar_post"] = opt(rep.ar_post);
  j["ar_ex_ante"] = opt(rep.ar_ex_ante);
  ordered_json violations = ordered_json::array();
  for (const auto &v : rep.policy_violations) {
    ordered_json rules = ordered_json::array();
    for (auto r : v.rules) rules.push_back(to_string(r));
    violations.push_back({{"record_index", v.record_index}, {"borrower_id", v.borrower_id}, {"rules", rules}});
  }
  j["policy_violations"] = violations;
  ordered_json verdicts = ordered_json::array();
  for (const auto &v : rep.verdicts) {
    verdicts.push_back({{"code", to_string(v.code)}, {"finding", v.finding}, {"message", v.message}});
  }
  j["verdicts"] = verdicts;
  return j;
}

inline void write_report(std::ostream &out, const MonitoringReport &rep, Format format) {
  auto opt = [](const std::optional<double> &x) { return x ? fixed6(*x) : std::string("unavailable"); };
  if (format == Format::json) {
    out << report_to_json(rep).dump(2) << '\n';
    return;
  }
  const std::vector<std::pair<std::string, std::string>> fields = {
      {"n_actions", std::to_string(rep.n_actions)},
      {"n_overrides", std::to_string(rep.n_overrides)},
      {"override_rate", fixed6(rep.override_rate)},
      {"natural_error_rate", fixed6(rep.natural_error_rate)},
      {"bound_breached", rep.bound_breached ? "true" : "false"},
      {"n_upgrades", std::to_string(rep.n_upgrades)},
      {"n_downgrades", std::to_string(rep.n_downgrades)},
      {"n_outcomes", std::to_string(rep.n_outcomes)},
      {"n_defaults", std::to_string(rep.n_defaults)},
      {"ar_pre", opt(rep.ar_pre)},
      {"ar_post", opt(rep.ar_post)},
      {"ar_ex_ante", opt(rep.ar_ex_ante)},
  };
  if (format == Format::csv) {
    out << "key,value\n";
    for (const auto &[k, v] : fields) out << k << ',' << v << '\n';
    for (const auto &v : rep.policy_violations) {
      std::string rules;
      for (auto r : v.rules) rules += (rules.empty() ? "" : ";") + std::string(to_string(r));
      out << "policy_violation,\"" << v.record_index << ':' << v.borrower_id << ':' << rules << "\"\n";
    }
    for (const auto &v : rep.verdicts) out << "verdict," << to_string(v.code) << '\n';
    return;
  }
  for (const auto &[k, v] : fields) out << k << ": " << v << '\n';
  out << "policy_violations: " << rep.policy_violations.size() << '\n';
  for (const auto &v : rep.policy_violations) {
    out << "  record " << v.record_index << " (" << v.borrower_id << "):";
    for (auto r : v.rules) out << ' ' << to_string(r);
    out << '\n';
  }
  out << "verdicts:\n";
  for (const auto &v : rep.verdicts) {
    out << "  " << to_string(v.code) << (v.finding ? " [finding] " : " [info] ") << v.message << '\n';
  }
}

} // namespace ratebound::io
