#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace uscqed {

// 12-significant-digit formatting: the print convention for every table
// cell, so repeated runs are byte-identical.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Shortest decimal string that parses back to exactly the same double.
// Provenance values use this so a re-run from the echoed configuration
// reproduces the output bit for bit.
inline std::string format_exact(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace uscqed
