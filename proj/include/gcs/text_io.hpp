#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gcs::text {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// Flat "key = value" text; '#' starts a comment. Later keys override earlier.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace gcs::text
