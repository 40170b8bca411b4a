#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace malstat {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string lower_ascii(std::string s);
bool iequals(std::string_view a, std::string_view b);

/// Shortest decimal form that parses back to the identical binary64 value.
std::string format_double(double v);
/// Strict full-string parse; returns false on trailing junk or non-finite.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

/// Percent-encodes whitespace, '%' and control bytes so a token survives
/// line/space-delimited text formats.
std::string encode_token(std::string_view s);
std::string decode_token(std::string_view s);

}  // namespace malstat
