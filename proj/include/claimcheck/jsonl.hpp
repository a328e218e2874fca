#pragma once

#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "claimcheck/errors.hpp"

namespace claimcheck {

// Streams one JSON object per non-blank line. Parse failures are rethrown as
// ParseError carrying the path and 1-based line number.
inline void for_each_jsonl(
    const std::string& path,
    const std::function<void(std::size_t line_no, const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      fn(line_no, obj);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace claimcheck
