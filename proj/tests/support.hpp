#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "gdsl/ops.hpp"
#include "gdsl/serialize.hpp"

namespace gdsl::test {

inline std::string fixture_path(const std::string& name) { return std::string(GDSL_TEST_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<Operation> load_ops(const std::string& name) {
  return operations_from_json(parse_json(read_text(fixture_path("fixtures/" + name))));
}

// Applies a fixture script to an empty document.
inline GlyphDocument build(const std::string& ops_file, std::uint64_t seed = 0) {
  GlyphDocument doc;
  doc.rng_seed = seed;
  for (const auto& op : load_ops(ops_file)) doc = gdsl::apply(doc, op);
  return doc;
}

}  // namespace gdsl::test
