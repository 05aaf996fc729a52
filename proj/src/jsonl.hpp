#pragma once

// Shared helpers for the line-delimited JSON formats. Internal header.

#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tele/error.hpp"

namespace tele::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string header_line(std::string_view schema, int version) {
  ordered_json h;
  h["schema"] = schema;
  h["version"] = version;
  return h.dump();
}

inline std::string line_prefix(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

/// Reads the next non-blank line. Returns false at end of stream; throws
/// Error(io) when the stream fails for any other reason.
inline bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  if (in.bad()) {
    throw Error(Errc::io, "stream became unreadable after line " +
                              std::to_string(line_no));
  }
  return false;
}

inline json parse_json_line(const std::string& line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, line_prefix(line_no) + "malformed record at byte " +
                                 std::to_string(e.byte) + ": " + e.what());
  }
}

/// Consumes the schema header line and checks schema name and version.
inline void expect_header(std::istream& in, std::string_view schema,
                          int version, std::size_t& line_no) {
  std::string line;
  if (!next_line(in, line, line_no)) {
    throw Error(Errc::parse, "missing header line for schema '" +
                                 std::string(schema) + "'");
  }
  json h = parse_json_line(line, line_no);
  if (!h.is_object() || !h.contains("schema") || !h["schema"].is_string() ||
      h["schema"].get<std::string>() != schema) {
    throw Error(Errc::parse, line_prefix(line_no) + "expected header with schema '" +
                                 std::string(schema) + "'");
  }
  if (!h.contains("version") || !h["version"].is_number_integer() ||
      h["version"].get<int>() != version) {
    throw Error(Errc::parse, line_prefix(line_no) + "unsupported " +
                                 std::string(schema) + " version");
  }
}

inline std::string require_string(const json& j, const char* field,
                                  std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw Error(Errc::parse, line_prefix(line_no) + "field '" + field +
                                 "' missing or not a string");
  }
  return it->get<std::string>();
}

inline std::optional<std::string> optional_string(const json& j,
                                                  const char* field,
                                                  std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(Errc::parse,
                line_prefix(line_no) + "field '" + field + "' not a string");
  }
  return it->get<std::string>();
}

}  // namespace tele::detail
