#pragma once

#include <map>
#include <string>
#include <string_view>

namespace cloudcast {

/// Flat `key = value` text. Blank lines and anything after '#' are ignored;
/// keys and values are trimmed; a repeated key keeps its last value.
/// Lines without '=' or with an empty key throw InvalidInput naming the line.
std::map<std::string, std::string> parse_key_values(std::string_view text);

double parse_double(const std::string& key, const std::string& value);
long long parse_integer(const std::string& key, const std::string& value);

}  // namespace cloudcast
