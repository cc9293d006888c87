#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

namespace edgesim {

// Serializes a JSON value with byte-deterministic output: object keys in
// lexicographic order (nlohmann objects already iterate sorted) and floats
// printed with exactly 6 decimal places. Integers print as integers.
std::string dump_deterministic(const nlohmann::json& j);

// Append-only JSON Lines file: one deterministic object per line.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);

  void write(const nlohmann::json& j);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace edgesim
