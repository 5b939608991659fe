#include "irtid_cli/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "irtid/errors.hpp"

namespace irtid::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ValidationError("line " + std::to_string(line) + ": not a number: '" +
                          std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::vector<ItemParams> parse_model(std::istream& in, bool validate) {
  std::vector<ItemParams> items;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto start = text.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      const auto end = text.find_first_of(" \t", start);
      fields.push_back(text.substr(start, end - start));
      pos = end == std::string_view::npos ? text.size() : end;
    }

    const auto family = parse_family(fields[0]);
    if (!family) {
      throw ValidationError("line " + std::to_string(line) + ": unknown family '" +
                            std::string(fields[0]) + "'");
    }
    const bool ogive = *family == Family::NormalOgive;
    if (fields.size() != 5 && !(ogive && fields.size() == 3)) {
      throw ValidationError("line " + std::to_string(line) +
                            ": expected `family a b c d` (c d optional for normal_ogive)");
    }
    ItemParams p;
    p.family = *family;
    p.a = parse_double(fields[1], line);
    p.b = parse_double(fields[2], line);
    p.c = fields.size() == 5 ? parse_double(fields[3], line) : 0.0;
    p.d = fields.size() == 5 ? parse_double(fields[4], line) : 1.0;
    try {
      if (validate) p.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + e.what(),
                            static_cast<long>(items.size()));
    }
    items.push_back(p);
  }
  if (items.empty()) throw ValidationError("model file contains no items");
  return items;
}

std::vector<ItemParams> read_model_file(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  return parse_model(in, validate);
}

void write_model(std::ostream& out, const std::vector<ItemParams>& items) {
  for (const auto& p : items) {
    out << to_string(p.family) << ' ' << format_double(p.a) << ' ' << format_double(p.b) << ' '
        << format_double(p.c) << ' ' << format_double(p.d) << '\n';
  }
}

ResponseMatrix parse_responses(std::istream& in) {
  std::vector<std::uint8_t> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
      const auto comma = text.find(',', pos);
      const std::string_view cell =
          trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
      if (cell != "0" && cell != "1") {
        throw ValidationError("line " + std::to_string(line) + ": responses must be 0 or 1, got '" +
                              std::string(cell) + "'");
      }
      values.push_back(cell == "1" ? 1 : 0);
      ++count;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ValidationError("line " + std::to_string(line) + ": expected " +
                            std::to_string(cols) + " columns, got " + std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw ValidationError("response file is empty");
  ResponseMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = values[r * cols + c];
  }
  return out;
}

ResponseMatrix read_responses_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open response file: " + path);
  return parse_responses(in);
}

void write_responses(std::ostream& out, const ResponseMatrix& responses) {
  std::string line;
  for (std::size_t r = 0; r < responses.rows(); ++r) {
    line.clear();
    const auto row = responses.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line.push_back(',');
      line.push_back(row[c] ? '1' : '0');
    }
    line.push_back('\n');
    out << line;
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string_view cell =
        trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || value == 0) {
      throw ValidationError("expected a comma-separated list of positive integers, got '" +
                            std::string(text) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace irtid::cli
