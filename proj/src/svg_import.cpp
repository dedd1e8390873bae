#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/infer.hpp"

namespace gdsl {

namespace pt = boost::property_tree;

namespace {

struct Style {
  std::optional<std::string> fill, stroke;
  std::optional<double> stroke_width;
  double opacity = 1.0;
  bool has_opacity = false;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_length(const std::string& raw, const std::string& what) {
  std::string s = trim(raw);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, "px") == 0) s.resize(s.size() - 2);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::MalformedInput, "bad number '" + raw + "' for " + what, what);
  }
  return v;
}

// Numbers separated by commas and/or whitespace.
std::vector<double> parse_number_list(std::string_view s, const std::string& what) {
  std::vector<double> out;
  std::string buf(s);
  for (char& c : buf) {
    if (c == ',') c = ' ';
  }
  const char* p = buf.c_str();
  while (true) {
    while (*p && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (!*p) break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p || !std::isfinite(v)) {
      throw Error(ErrorCode::MalformedInput, "bad number list for " + what, what);
    }
    out.push_back(v);
    p = end;
  }
  return out;
}

AffineMatrix parse_transform(std::string_view s) {
  AffineMatrix m;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
  };
  while (true) {
    skip();
    if (i >= s.size()) break;
    std::size_t name_start = i;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    const std::string name(s.substr(name_start, i - name_start));
    skip();
    if (i >= s.size() || s[i] != '(') {
      throw Error(ErrorCode::MalformedInput, "bad transform '" + std::string(s) + "'", "transform");
    }
    const std::size_t close = s.find(')', i);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::MalformedInput, "unterminated transform", "transform");
    }
    const auto args = parse_number_list(s.substr(i + 1, close - i - 1), "transform");
    i = close + 1;
    auto arity = [&](std::initializer_list<std::size_t> ok) {
      for (std::size_t n : ok) {
        if (args.size() == n) return;
      }
      throw Error(ErrorCode::MalformedInput, "wrong argument count for " + name, "transform");
    };
    AffineMatrix t;
    if (name == "matrix") {
      arity({6});
      t = {args[0], args[1], args[2], args[3], args[4], args[5]};
    } else if (name == "translate") {
      arity({1, 2});
      t = AffineMatrix::translation({args[0], args.size() > 1 ? args[1] : 0.0});
    } else if (name == "scale") {
      arity({1, 2});
      t = AffineMatrix::scaling(args[0], args.size() > 1 ? args[1] : args[0]);
    } else if (name == "rotate") {
      arity({1, 3});
      t = AffineMatrix::rotation_deg(args[0], args.size() > 1 ? Vec2{args[1], args[2]} : Vec2{});
    } else {
      throw Error(ErrorCode::UnsupportedElement, "unsupported transform '" + name + "'", "transform");
    }
    m = compose(m, t);
  }
  return m;
}

std::string color_value(const std::string& raw) {
  const std::string s = trim(raw);
  if (auto c = normalize_color(s)) return *c;
  // rgb(r, g, b)
  if (s.rfind("rgb(", 0) == 0 && s.back() == ')') {
    const auto v = parse_number_list(s.substr(4, s.size() - 5), "color");
    if (v.size() == 3) {
      char buf[8];
      auto clamp = [](double x) { return static_cast<int>(std::lround(std::fmin(255.0, std::fmax(0.0, x)))); };
      std::snprintf(buf, sizeof buf, "#%02x%02x%02x", clamp(v[0]), clamp(v[1]), clamp(v[2]));
      return buf;
    }
  }
  throw Error(ErrorCode::MalformedInput, "unsupported color '" + raw + "'", "color");
}

class Importer {
 public:
  std::vector<FlatElement> out;

  void element(const std::string& tag, const pt::ptree& node, const AffineMatrix& parent, Style style) {
    const pt::ptree* attrs = nullptr;
    if (auto a = node.get_child_optional("<xmlattr>")) attrs = &*a;
    auto attr = [&](const char* name) -> std::optional<std::string> {
      if (!attrs) return std::nullopt;
      if (auto v = attrs->get_optional<std::string>(name)) return *v;
      return std::nullopt;
    };

    AffineMatrix m = parent;
    if (auto t = attr("transform")) m = compose(parent, parse_transform(*t));
    read_style(style, attr);

    if (tag == "svg" || tag == "g") {
      for (const auto& [child_tag, child] : node) children(child_tag, child, m, style);
      return;
    }

    Primitive p;
    auto num = [&](const char* svg_name, const char* name, std::optional<double> fallback = std::nullopt) {
      if (auto v = attr(svg_name)) {
        p.attrs[name] = parse_length(*v, svg_name);
      } else if (fallback) {
        p.attrs[name] = *fallback;
      } else {
        throw Error(ErrorCode::MalformedInput, "<" + tag + "> missing '" + svg_name + "'", svg_name);
      }
    };
    if (tag == "rect" || tag == "image") {
      p.kind = tag == "rect" ? PrimitiveKind::rect : PrimitiveKind::image;
      num("x", "x", 0.0);
      num("y", "y", 0.0);
      num("width", "width");
      num("height", "height");
      if (p.kind == PrimitiveKind::image) {
        auto href = attr("href");
        if (!href) href = attr("xlink:href");
        p.attrs["href"] = href.value_or("");
      }
    } else if (tag == "circle") {
      p.kind = PrimitiveKind::circle;
      num("cx", "cx", 0.0);
      num("cy", "cy", 0.0);
      num("r", "r");
    } else if (tag == "line") {
      p.kind = PrimitiveKind::line;
      num("x1", "x1", 0.0);
      num("y1", "y1", 0.0);
      num("x2", "x2", 0.0);
      num("y2", "y2", 0.0);
    } else if (tag == "polygon") {
      p.kind = PrimitiveKind::polygon;
      const auto v = parse_number_list(attr("points").value_or(""), "points");
      if (v.size() < 2 || v.size() % 2 != 0) {
        throw Error(ErrorCode::MalformedInput, "<polygon> needs an even number of coordinates", "points");
      }
      Points pts;
      for (std::size_t i = 0; i + 1 < v.size(); i += 2) pts.push_back({v[i], v[i + 1]});
      p.attrs["points"] = pts;
    } else if (tag == "path") {
      p.kind = PrimitiveKind::path;
      auto d = attr("d");
      if (!d) throw Error(ErrorCode::MalformedInput, "<path> missing 'd'", "d");
      p.attrs["d"] = trim(*d);
    } else if (tag == "text") {
      p.kind = PrimitiveKind::text;
      num("x", "x", 0.0);
      num("y", "y", 0.0);
      num("font-size", "fontSize", 16.0);
      const std::string content = trim(node.data());
      p.attrs["content"] = content;
      // Stored start-anchored; a middle anchor shifts by half the estimated width.
      if (attr("text-anchor").value_or("") == "middle") {
        const double w = 0.6 * p.number("fontSize") * static_cast<double>(content.size());
        p.attrs["x"] = p.number("x") - w / 2;
      }
    } else {
      throw Error(ErrorCode::UnsupportedElement, "unsupported element <" + tag + ">", tag);
    }

    if (p.kind != PrimitiveKind::image) {
      if (style.fill) p.attrs["fill"] = *style.fill;
      if (style.stroke) p.attrs["stroke"] = *style.stroke;
      if (style.stroke_width) p.attrs["strokeWidth"] = *style.stroke_width;
    }
    if (style.has_opacity) p.attrs["opacity"] = style.opacity;

    FlatElement e{std::move(p), m, std::nullopt};
    if (auto id = attr("data-container-id")) e.source_id = *id;
    else if (auto id2 = attr("id")) e.source_id = *id2;
    out.push_back(std::move(e));
  }

  void children(const std::string& tag, const pt::ptree& node, const AffineMatrix& m, const Style& style) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>" || tag == "title" || tag == "desc" || tag == "metadata") {
      return;
    }
    element(tag, node, m, style);
  }

 private:
  template <class Attr>
  static void read_style(Style& style, Attr&& attr) {
    std::vector<std::pair<std::string, std::string>> decls;
    for (const char* name : {"fill", "stroke", "stroke-width", "opacity"}) {
      if (auto v = attr(name)) decls.emplace_back(name, *v);
    }
    // `style` declarations override presentation attributes.
    if (auto s = attr("style")) {
      std::stringstream ss(*s);
      std::string decl;
      while (std::getline(ss, decl, ';')) {
        const auto colon = decl.find(':');
        if (colon == std::string::npos) continue;
        decls.emplace_back(trim(decl.substr(0, colon)), trim(decl.substr(colon + 1)));
      }
    }
    for (const auto& [k, v] : decls) {
      if (k == "fill") style.fill = color_value(v);
      else if (k == "stroke") style.stroke = color_value(v);
      else if (k == "stroke-width") style.stroke_width = parse_length(v, k);
      else if (k == "opacity") {
        style.opacity *= parse_length(v, k);
        style.has_opacity = true;
      }
    }
  }
};

}  // namespace

std::vector<FlatElement> import_svg(std::string_view svg) {
  if (trim(svg).empty()) throw Error(ErrorCode::EmptyInput, "empty SVG input");
  pt::ptree tree;
  try {
    std::istringstream in{std::string(svg)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedInput, std::string("XML: ") + e.message(), {}, e.line());
  }
  auto root = tree.get_child_optional("svg");
  if (!root) throw Error(ErrorCode::MalformedInput, "root element is not <svg>");
  Importer imp;
  imp.element("svg", *root, AffineMatrix::identity(), {});
  if (imp.out.empty()) throw Error(ErrorCode::EmptyInput, "SVG contains no drawable elements");
  return std::move(imp.out);
}

std::vector<FlatElement> flatten_scene(const SceneNode& scene) {
  std::vector<FlatElement> out;
  for (const auto& wl : world_leaves(scene)) {
    Primitive p = wl.node->primitive;
    if (wl.node->text_middle && p.kind == PrimitiveKind::text) {
      const double w = 0.6 * p.number("fontSize") * static_cast<double>(p.string("content").size());
      p.attrs["x"] = p.number("x") - w / 2;
    }
    out.push_back({std::move(p), wl.world, wl.node->name.empty() ? std::nullopt : std::optional(wl.node->name)});
  }
  return out;
}

}  // namespace gdsl
