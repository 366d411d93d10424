#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uscqed/sweep.hpp"

// Table serialization with a provenance envelope. Both formats carry the same
// information cell for cell, print every number through the shared
// 12-significant-digit convention, use '.' decimals, LF line ends and UTF-8,
// and are byte-identical across runs of the same build and inputs (the
// timestamp honors SOURCE_DATE_EPOCH so golden files can pin it).
//
// CSV: `# key=value` provenance lines, one header line (axis, columns,
// error), then one line per row. Failed cells are empty; the error column
// carries the row's message with commas and line breaks flattened.
//
// JSON: {"provenance": {...}, "axis": ..., "columns": [...], "rows":
// [{"axis": ..., "values": [...], "error": ...}]} with null for failed cells.

namespace uscqed::io {

enum class Format { Csv, Json };

// Envelope entries prepended to the table's own parameter echo: code version,
// generation timestamp, the invoking command, resolved options.
using Provenance = std::vector<std::pair<std::string, std::string>>;

// ISO 8601 UTC, seconds resolution. SOURCE_DATE_EPOCH (seconds) wins over the
// wall clock so repeated runs can be made bit-identical.
std::string timestamp_utc();

std::string to_csv(const sweep::SweepTable& table, const Provenance& envelope);
std::string to_json(const sweep::SweepTable& table, const Provenance& envelope);
std::string serialize(const sweep::SweepTable& table, const Provenance& envelope, Format f);

// Whole-file helpers; failures throw IoError naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace uscqed::io
