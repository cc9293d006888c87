#include "edgesim/jsonl.hpp"

#include <cstdio>
#include <stdexcept>

#include "edgesim/errors.hpp"

namespace edgesim {

namespace {

void append_value(const nlohmann::json& j, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (j.type()) {
    case value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        append_value(it.value(), out);
      }
      out += '}';
      break;
    }
    case value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        append_value(v, out);
      }
      out += ']';
      break;
    }
    case value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
      break;
  }
}

}  // namespace

std::string dump_deterministic(const nlohmann::json& j) {
  std::string out;
  append_value(j, out);
  return out;
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path, std::ios::trunc) {
  if (!out_) throw Error("cannot open for writing: " + path);
}

void JsonlWriter::write(const nlohmann::json& j) {
  out_ << dump_deterministic(j) << '\n';
}

}  // namespace edgesim
