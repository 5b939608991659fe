#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "irtid/irf.hpp"
#include "irtid/responses.hpp"

namespace irtid::cli {

/// Model file: one item per line, `family a b c d` separated by whitespace.
/// `#` starts a comment; blank lines are skipped; c and d may be omitted for
/// normal ogive items. Errors carry the 1-based line number. With
/// `validate` false only the syntax is checked.
std::vector<ItemParams> parse_model(std::istream& in, bool validate = true);
std::vector<ItemParams> read_model_file(const std::string& path, bool validate = true);
void write_model(std::ostream& out, const std::vector<ItemParams>& items);

/// Header-less CSV of 0/1 values, respondents as rows.
ResponseMatrix parse_responses(std::istream& in);
ResponseMatrix read_responses_file(const std::string& path);
void write_responses(std::ostream& out, const ResponseMatrix& responses);

/// Shortest text with 17 significant digits, '.' separator, locale-free.
std::string format_double(double value);

/// Comma-separated list of positive integers, e.g. "25,50,100".
std::vector<std::size_t> parse_size_list(std::string_view text);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace irtid::cli
