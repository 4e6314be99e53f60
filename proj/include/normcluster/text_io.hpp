#pragma once

// Small helpers shared by the TSV/JSONL emitters.

#include <string>
#include <string_view>
#include <vector>

namespace normcluster {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Rounds half-to-even to two decimals and prints without trailing zeros,
/// e.g. 0.6666 -> "0.67", 1.0 -> "1", 0.5 -> "0.5".
std::string format_two_decimals(double v);

double round_two_decimals(double v);

/// Escapes backslash, tab, CR and LF so a field fits on one TSV line.
std::string tsv_escape(std::string_view field);
std::string tsv_unescape(std::string_view field);

/// Splits one TSV line on tabs (no unescaping).
std::vector<std::string> split_tsv(std::string_view line);

/// Strips a trailing '\r' (CRLF tolerance).
std::string_view chomp(std::string_view line);

}  // namespace normcluster
