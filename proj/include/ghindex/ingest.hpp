#pragma once

// CSV ingestion into the unit cube.
//
// Numeric and date columns are min-max normalized with the top end pulled
// just below 1; a constant column maps to 0. Dates become days since
// 1970-01-01 before normalizing. Categorical values get a seeded keyed-hash
// code in [0,1), re-salted on the rare collision. Rows missing any selected
// value are dropped, or imputed with coordinate 0 when asked.
//
// Point ids are 0-based data row numbers of the file, so dropped rows leave
// gaps. Error messages use 1-based data row numbers (the header is not a row).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ghindex/point_cloud.hpp"
#include "ghindex/random.hpp"

namespace ghindex {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AttributeKind { Numeric, Categorical, Date };

inline std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Numeric: return "num";
    case AttributeKind::Categorical: return "cat";
    case AttributeKind::Date: return "date";
  }
  return "unknown";
}

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

/// "a,b:cat,when:date" -> specs. Kinds: num (default), cat, date. Empty text
/// selects nothing, which load_csv reads as "all columns".
inline std::vector<AttributeSpec> parse_attribute_specs(std::string_view text) {
  std::vector<AttributeSpec> specs;
  if (text.empty()) return specs;
  std::set<std::string> seen;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string item(text.substr(start, end - start));
    start = end + 1;
    AttributeSpec spec;
    const auto colon = item.rfind(':');
    std::string kind = "num";
    if (colon != std::string::npos) {
      kind = item.substr(colon + 1);
      item.resize(colon);
    }
    if (item.empty()) throw std::invalid_argument("empty attribute name in '" + std::string(text) + "'");
    if (kind == "num" || kind == "numeric") {
      spec.kind = AttributeKind::Numeric;
    } else if (kind == "cat" || kind == "categorical") {
      spec.kind = AttributeKind::Categorical;
    } else if (kind == "date") {
      spec.kind = AttributeKind::Date;
    } else {
      throw std::invalid_argument("unknown attribute kind '" + kind + "' for '" + item + "'");
    }
    if (!seen.insert(item).second) throw std::invalid_argument("attribute '" + item + "' selected twice");
    spec.name = std::move(item);
    specs.push_back(std::move(spec));
    if (end == text.size()) break;
  }
  return specs;
}

enum class MissingPolicy { Drop, ImputeZero };
enum class Normalization { MinMax, None };

inline MissingPolicy parse_missing_policy(std::string_view text) {
  if (text == "drop") return MissingPolicy::Drop;
  if (text == "impute-zero") return MissingPolicy::ImputeZero;
  throw std::invalid_argument("unknown missing-value policy '" + std::string(text) + "'");
}

inline Normalization parse_normalization(std::string_view text) {
  if (text == "minmax") return Normalization::MinMax;
  if (text == "none") return Normalization::None;
  throw std::invalid_argument("unknown normalization '" + std::string(text) + "'");
}

struct IngestOptions {
  char delimiter = ',';
  std::uint64_t seed = 42;
  MissingPolicy missing = MissingPolicy::Drop;
  Normalization normalize = Normalization::MinMax;
};

struct AttributeReport {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  std::size_t distinct = 0;
  std::size_t missing = 0;
  std::optional<double> min, max;            // numeric and date columns
  std::map<std::string, double> codes;       // categorical columns
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped = 0;
  std::size_t rows_imputed = 0;
  std::vector<AttributeReport> attributes;
};

struct IngestResult {
  PointCloud cloud;
  IngestReport report;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_missing(std::string_view raw) {
  const auto s = trim(raw);
  if (s.empty()) return true;
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "na" || lower == "n/a" || lower == "nan" || lower == "null" || lower == "none";
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Reads one CSV record (RFC 4180 quoting, CRLF or LF). Returns false at EOF.
inline bool read_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  while (true) {
    if (quoted) {
      if (c == EOF) throw IngestError("unterminated quoted field");
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += static_cast<char>(c);
      }
    } else if (c == EOF || c == '\n') {
      if (!field.empty() && field.back() == '\r' && !field_was_quoted) field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\r' && in.peek() == '\n') {
      // CRLF; the LF ends the record on the next step
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '"' && detail::trim(field).empty() && !field_was_quoted) {
      field.clear();
      quoted = true;
      field_was_quoted = true;
    } else {
      field += static_cast<char>(c);
    }
    c = in.get();
  }
}

inline std::optional<double> parse_number(std::string_view raw) {
  auto s = detail::trim(raw);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

/// ISO dates, YYYY-MM-DD or YYYY/MM/DD, as days since 1970-01-01.
inline std::optional<double> parse_date(std::string_view raw) {
  const auto s = detail::trim(raw);
  int y = 0;
  unsigned m = 0, d = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  auto take = [&](auto& out) {
    const auto r = std::from_chars(p, end, out);
    if (r.ec != std::errc() || r.ptr == p) return false;
    p = r.ptr;
    return true;
  };
  if (!take(y) || p == end || (*p != '-' && *p != '/')) return std::nullopt;
  const char sep = *p++;
  if (!take(m) || p == end || *p++ != sep || !take(d) || p != end) return std::nullopt;
  const std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return static_cast<double>(std::chrono::sys_days(date).time_since_epoch().count());
}

/// (v - lo) / (hi - lo) * (1 - 2^-52); lo == hi gives 0.
inline double normalize_value(double v, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const double x = (v - lo) / (hi - lo) * (1.0 - 0x1.0p-52);
  return std::clamp(x, 0.0, std::nextafter(1.0, 0.0));
}

inline std::vector<double> normalize_numeric(const std::vector<double>& values, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("normalization bounds reversed");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(normalize_value(v, lo, hi));
  return out;
}

inline std::vector<double> normalize_numeric(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return normalize_numeric(values, *lo, *hi);
}

/// Seeded code table for a set of distinct values. Values are coded in sorted
/// order; a value whose code is already taken is re-hashed with a new salt.
inline std::map<std::string, double> categorical_codes(const std::set<std::string>& values, std::uint64_t seed) {
  std::map<std::string, double> table;
  std::set<double> taken;
  for (const auto& value : values) {
    const std::uint64_t h = detail::fnv1a(value);
    for (std::uint64_t salt = 0;; ++salt) {
      const double code = static_cast<double>(mix64(derive_seed(seed, salt) ^ h) >> 11) * 0x1.0p-53;
      if (taken.insert(code).second) {
        table.emplace(value, code);
        break;
      }
    }
  }
  return table;
}

inline std::vector<double> encode_categorical(const std::vector<std::string>& values, std::uint64_t seed) {
  const auto table = categorical_codes(std::set<std::string>(values.begin(), values.end()), seed);
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(table.at(v));
  return out;
}

/// With no specs, every header column other than "id" is taken as numeric.
inline IngestResult load_csv(std::istream& in, std::vector<AttributeSpec> specs, const IngestOptions& options = {}) {
  std::vector<std::string> header;
  if (!read_csv_record(in, options.delimiter, header)) throw IngestError("input has no header row");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  if (specs.empty()) {
    for (const auto& name : header) {
      const auto trimmed = detail::trim(name);
      if (trimmed != "id") specs.push_back({std::string(trimmed), AttributeKind::Numeric});
    }
    if (specs.empty()) throw IngestError("header has no attribute columns");
  }

  const std::size_t n = specs.size();
  std::vector<std::size_t> column(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t found = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (detail::trim(header[c]) != specs[a].name) continue;
      if (found != header.size()) throw IngestError("column '" + specs[a].name + "' appears twice in header");
      found = c;
    }
    if (found == header.size()) throw IngestError("missing column '" + specs[a].name + "'");
    column[a] = found;
  }

  IngestResult result;
  auto& report = result.report;
  report.attributes.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    report.attributes[a].name = specs[a].name;
    report.attributes[a].kind = specs[a].kind;
  }

  // Raw values of kept rows, column-major; categorical columns keep text.
  std::vector<std::vector<double>> numbers(n);
  std::vector<std::vector<std::string>> labels(n);
  std::vector<std::vector<bool>> absent(n);
  std::vector<std::uint64_t> ids;

  std::vector<std::string> fields;
  std::size_t row = 0;
  while (read_csv_record(in, options.delimiter, fields)) {
    if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;  // blank line
    ++row;
    const auto where = [&](std::size_t a) {
      return "row " + std::to_string(row) + ", column '" + specs[a].name + "'";
    };
    if (fields.size() != header.size()) {
      throw IngestError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));
    }
    bool any_missing = false;
    for (std::size_t a = 0; a < n; ++a) {
      if (detail::is_missing(fields[column[a]])) {
        any_missing = true;
        ++report.attributes[a].missing;
      }
    }
    ++report.rows_read;
    if (any_missing && options.missing == MissingPolicy::Drop) {
      ++report.rows_dropped;
      continue;
    }
    report.rows_imputed += any_missing;
    for (std::size_t a = 0; a < n; ++a) {
      const auto& raw = fields[column[a]];
      const bool missing = detail::is_missing(raw);
      absent[a].push_back(missing);
      if (specs[a].kind == AttributeKind::Categorical) {
        labels[a].emplace_back(missing ? std::string() : std::string(detail::trim(raw)));
        continue;
      }
      double value = 0.0;
      if (!missing) {
        const auto parsed = specs[a].kind == AttributeKind::Date ? parse_date(raw) : parse_number(raw);
        if (!parsed) {
          throw IngestError(where(a) + ": cannot parse '" + raw + "' as " +
                            (specs[a].kind == AttributeKind::Date ? "a date" : "a number"));
        }
        value = *parsed;
        if (options.normalize == Normalization::None && !(value >= 0.0 && value < 1.0)) {
          throw IngestError(where(a) + ": value " + raw + " outside [0, 1) with normalization off");
        }
      }
      numbers[a].push_back(value);
    }
    ids.push_back(row - 1);
  }
  report.rows_kept = ids.size();
  if (ids.empty()) throw IngestError("no rows left after applying the missing-value policy");

  const std::size_t count = ids.size();
  std::vector<double> coords(count * n);
  for (std::size_t a = 0; a < n; ++a) {
    auto& attr = report.attributes[a];
    if (specs[a].kind == AttributeKind::Categorical) {
      std::set<std::string> distinct;
      for (std::size_t i = 0; i < count; ++i) {
        if (!absent[a][i]) distinct.insert(labels[a][i]);
      }
      attr.distinct = distinct.size();
      attr.codes = categorical_codes(distinct, derive_seed(options.seed, a));
      for (std::size_t i = 0; i < count; ++i) {
        coords[i * n + a] = absent[a][i] ? 0.0 : attr.codes.at(labels[a][i]);
      }
      continue;
    }
    std::vector<double> present;
    for (std::size_t i = 0; i < count; ++i) {
      if (!absent[a][i]) present.push_back(numbers[a][i]);
    }
    std::sort(present.begin(), present.end());
    attr.distinct = static_cast<std::size_t>(std::unique(present.begin(), present.end()) - present.begin());
    if (!present.empty()) {
      attr.min = present.front();
      attr.max = present.back();
    }
    for (std::size_t i = 0; i < count; ++i) {
      double x = 0.0;
      if (!absent[a][i]) {
        x = options.normalize == Normalization::MinMax ? normalize_value(numbers[a][i], *attr.min, *attr.max)
                                                       : numbers[a][i];
      }
      coords[i * n + a] = x;
    }
  }
  result.cloud = PointCloud(static_cast<unsigned>(n), std::move(coords), std::move(ids));
  return result;
}

inline IngestResult load_csv_file(const std::string& path, std::vector<AttributeSpec> specs,
                                  const IngestOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path + "'");
  return load_csv(in, std::move(specs), options);
}

inline nlohmann::ordered_json report_json(const IngestReport& report) {
  nlohmann::ordered_json j;
  j["rows_read"] = report.rows_read;
  j["rows_kept"] = report.rows_kept;
  j["rows_dropped"] = report.rows_dropped;
  j["rows_imputed"] = report.rows_imputed;
  auto& attrs = j["attributes"] = nlohmann::ordered_json::array();
  for (const auto& a : report.attributes) {
    nlohmann::ordered_json ja;
    ja["name"] = a.name;
    ja["kind"] = to_string(a.kind);
    ja["distinct"] = a.distinct;
    ja["missing"] = a.missing;
    if (a.kind == AttributeKind::Categorical) {
      ja["codes"] = nlohmann::ordered_json::object();
      for (const auto& [value, code] : a.codes) ja["codes"][value] = code;
    } else {
      ja["min"] = a.min ? nlohmann::ordered_json(*a.min) : nlohmann::ordered_json(nullptr);
      ja["max"] = a.max ? nlohmann::ordered_json(*a.max) : nlohmann::ordered_json(nullptr);
    }
    attrs.push_back(std::move(ja));
  }
  return j;
}

/// CSV with header id,x0,..,x{n-1} and shortest round-trip numbers; load_csv reads it back.
inline void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  const unsigned n = cloud.dimension();
  out << "id";
  for (unsigned c = 0; c < n; ++c) out << ",x" << c;
  out << '\n';
  char buffer[32];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << cloud.id(i);
    for (double x : cloud.point(i)) {
      const auto r = std::to_chars(buffer, buffer + sizeof buffer, x);
      out << ',' << std::string_view(buffer, static_cast<std::size_t>(r.ptr - buffer));
    }
    out << '\n';
  }
}

}  // namespace ghindex
