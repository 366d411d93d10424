#include "uscqed/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "uscqed/format.hpp"
#include "uscqed/types.hpp"

namespace uscqed::io {

namespace {

// Error messages may contain anything; CSV flattens the cell separators and
// line structure, JSON escapes per RFC 8259.
std::string csv_safe(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// One cell: the shared 12-digit convention, or empty/null when the value is
// not a finite number (failed points are never emitted as NaN text).
std::string csv_cell(double v) { return std::isfinite(v) ? format_number(v) : ""; }
std::string json_cell(double v) { return std::isfinite(v) ? format_number(v) : "null"; }

}  // namespace

std::string timestamp_utc() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0')
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  else
    t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_csv(const sweep::SweepTable& table, const Provenance& envelope) {
  std::string out;
  for (const auto& [key, value] : envelope)
    out += "# " + key + "=" + csv_safe(value) + "\n";
  for (const auto& [key, value] : table.provenance)
    out += "# " + key + "=" + csv_safe(value) + "\n";

  out += table.axis_name;
  for (const auto& c : table.columns) out += "," + c;
  out += ",error\n";

  for (const auto& row : table.rows) {
    out += format_number(row.axis);
    for (const double v : row.values) out += "," + csv_cell(v);
    out += "," + csv_safe(row.error) + "\n";
  }
  return out;
}

std::string to_json(const sweep::SweepTable& table, const Provenance& envelope) {
  std::string out = "{\n  \"provenance\": {";
  bool first = true;
  auto emit_kv = [&](const std::string& key, const std::string& value) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    \"" + json_escape(key) + "\": \"" + json_escape(value) + "\"";
  };
  for (const auto& [key, value] : envelope) emit_kv(key, value);
  for (const auto& [key, value] : table.provenance) emit_kv(key, value);
  out += "\n  },\n";

  out += "  \"axis\": \"" + json_escape(table.axis_name) + "\",\n";
  out += "  \"columns\": [";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + json_escape(table.columns[i]) + "\"";
  }
  out += "],\n  \"rows\": [";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out += (i ? ",\n" : "\n");
    out += "    {\"axis\": " + format_number(row.axis) + ", \"values\": [";
    for (std::size_t j = 0; j < row.values.size(); ++j) {
      if (j) out += ", ";
      out += json_cell(row.values[j]);
    }
    out += "], \"error\": \"" + json_escape(row.error) + "\"}";
  }
  out += "\n  ]\n}\n";
  return out;
}

std::string serialize(const sweep::SweepTable& table, const Provenance& envelope, Format f) {
  return f == Format::Csv ? to_csv(table, envelope) : to_json(table, envelope);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace uscqed::io
