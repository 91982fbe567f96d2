#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dre/geometry.hpp"

namespace dre::config {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

// Flat `key = value` text. Blank lines and lines starting with '#' are
// skipped; surrounding whitespace is trimmed. Throws std::runtime_error on a
// line without '=' or with an empty key.
std::vector<Entry> parse_key_values(std::istream& in);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Strict scalar parsers; throw std::invalid_argument naming `what`.
double parse_double(std::string_view s, std::string_view what);
std::int64_t parse_int(std::string_view s, std::string_view what);
std::uint64_t parse_uint(std::string_view s, std::string_view what);
bool parse_bool(std::string_view s, std::string_view what);
// Comma separated reals, e.g. "0.0,0.3,0.6".
std::vector<double> parse_double_list(std::string_view s, std::string_view what);
// Whitespace separated "x:y" pairs.
std::vector<Cell> parse_cell_list(std::string_view s, std::string_view what);

// Shortest decimal that round-trips.
std::string format_double(double v);

}  // namespace dre::config
