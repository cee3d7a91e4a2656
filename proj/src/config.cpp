#include "swarm/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "swarm/model.hpp"

namespace swarm {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<KeyValue> parse_key_values(const std::string& text) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value, got '" + line + "'");
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (kv.key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  if (s.empty()) throw ParseError("empty value for '" + what + "'");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError("malformed number '" + s + "' for '" + what + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("malformed integer '" + s + "' for '" + what + "'");
  return v;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string format_double17(double value) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace swarm
