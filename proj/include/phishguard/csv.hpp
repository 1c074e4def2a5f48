#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace phishguard {

using CsvRow = std::vector<std::string>;

/// RFC-4180 style parsing: quoted fields may contain the delimiter, quotes
/// (doubled) and line breaks. CRLF and LF line endings are accepted; blank
/// lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view text, char delimiter = ',');

/// Quotes a field when it contains the delimiter, a quote or a line break.
std::string csv_escape(std::string_view field, char delimiter = ',');

}  // namespace phishguard
