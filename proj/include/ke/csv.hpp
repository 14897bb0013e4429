#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace ke::csv {

// Shortest decimal representation that parses back to the same double
// (std::to_chars round-trip form); keeps emitted reports byte-stable.
std::string format_double(double value);

std::string format_bool(bool value);

// RFC-4180 style quoting: fields containing comma, quote, CR or LF are
// quoted with embedded quotes doubled.
std::string escape(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

// Parses one logical CSV record starting at the stream's current position,
// honoring quoted fields that may span lines. Returns false at EOF.
bool read_record(std::istream& in, std::vector<std::string>& fields);

double parse_double(const std::string& text);      // throws ke::Error(schema)
std::int64_t parse_int(const std::string& text);   // throws ke::Error(schema)

}  // namespace ke::csv
