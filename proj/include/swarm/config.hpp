#pragma once

#include <string>
#include <vector>

namespace swarm {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Parses `key = value` (or `key=value`) lines. Blank lines and `#` comments
/// are skipped; a line without '=' is a ParseError.
std::vector<KeyValue> parse_key_values(const std::string& text);

/// Strict decimal/scientific parse; `what` names the field in the error.
double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);

/// Shortest representation that round-trips (17 significant digits at most).
std::string format_double(double value);

/// printf("%.17g"): full precision, used for snapshot data.
std::string format_double17(double value);

std::string read_text_file(const std::string& path);

std::string trim(const std::string& s);

}  // namespace swarm
