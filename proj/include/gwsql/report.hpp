#pragma once

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwsql/oracle.hpp"

// Table serialization shared by the CLI and its tests: CSV (RFC 4180 quoting)
// and JSON (array of row objects keyed by the CSV headers). Numbers are
// emitted as shortest round-trip decimals so re-parsing recovers the exact
// double and golden files stay platform-stable.

namespace gwsql::report {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> headers;  // e.g. "t[s]", "theta_g[-]"
  std::vector<std::vector<double>> rows;
};

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (size_t i = 0; i < t.headers.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(t.headers[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.headers.size())
      throw std::invalid_argument("to_csv: row width does not match header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : t.rows) {
    if (row.size() != t.headers.size())
      throw std::invalid_argument("to_json: row width does not match header");
    nlohmann::json obj = nlohmann::json::object();
    for (size_t i = 0; i < row.size(); ++i) obj[t.headers[i]] = row[i];
    arr.push_back(obj);
  }
  return arr;
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}
}  // namespace detail

inline Table parse_csv(const std::string& text) {
  Table t;
  size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (first) {
      t.headers = fields;
      first = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{})
        throw std::invalid_argument("parse_csv: bad numeric field '" + f + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline nlohmann::json checks_to_json(const std::vector<oracle::VerificationCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"check", c.name},
                   {"expected", c.expected},
                   {"actual", c.actual},
                   {"abs_err", c.abs_err},
                   {"rel_err", c.rel_err},
                   {"tol", c.tol},
                   {"pass", c.pass}});
  }
  return arr;
}

}  // namespace gwsql::report
