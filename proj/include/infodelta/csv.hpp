#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infodelta::csv {

// Splits one RFC 4180 record. Quoted fields may contain commas and doubled quotes.
// Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split(std::string_view line);

// Quotes a field when it holds a comma, quote or newline.
std::string escape(std::string_view field);

// Reads the next line, dropping a trailing '\r'.
bool read_line(std::istream& in, std::string& line);

std::optional<double> parse_double(std::string_view text);

std::string trim(std::string_view text);
std::string lower(std::string_view text);

}  // namespace infodelta::csv
