#include <algorithm>
#include <cctype>

#include "gdsl/core.hpp"

namespace gdsl {

namespace {

bool is_hex_digit(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& basic_color_names() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"black", "#000000"},  {"silver", "#c0c0c0"}, {"gray", "#808080"},
      {"white", "#ffffff"},  {"maroon", "#800000"}, {"red", "#ff0000"},
      {"purple", "#800080"}, {"fuchsia", "#ff00ff"}, {"green", "#008000"},
      {"lime", "#00ff00"},   {"olive", "#808000"},  {"yellow", "#ffff00"},
      {"navy", "#000080"},   {"blue", "#0000ff"},   {"teal", "#008080"},
      {"aqua", "#00ffff"},
  };
  return table;
}

bool is_valid_color(std::string_view s) {
  if (s == "none") return true;
  if (s.size() != 7 && s.size() != 9) return false;
  if (s[0] != '#') return false;
  return std::all_of(s.begin() + 1, s.end(), is_hex_digit);
}

std::optional<std::string> normalize_color(std::string_view s) {
  std::string v = lower(s);
  if (v == "none") return v;
  if (v == "grey") v = "gray";
  for (const auto& [name, hex] : basic_color_names()) {
    if (name == v) return hex;
  }
  if (v.size() == 4 && v[0] == '#' && std::all_of(v.begin() + 1, v.end(), is_hex_digit)) {
    return std::string{'#', v[1], v[1], v[2], v[2], v[3], v[3]};
  }
  if (is_valid_color(v)) return v;
  return std::nullopt;
}

}  // namespace gdsl
