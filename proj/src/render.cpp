#include "gdsl/render.hpp"

#include <algorithm>
#include <map>

#include "gdsl/error.hpp"

namespace gdsl {

namespace {

using Attrs = std::map<std::string, std::string>;

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

class Writer {
 public:
  explicit Writer(const SvgConfig& cfg) : cfg_(cfg), decimals_(std::clamp(cfg.decimals, 0, 8)) {}

  std::string num(double x) const { return format_number(x, decimals_); }

  std::string matrix(const AffineMatrix& m) const {
    return "matrix(" + num(m.a) + "," + num(m.b) + "," + num(m.c) + "," + num(m.d) + "," + num(m.e) +
           "," + num(m.f) + ")";
  }

  void open(std::string_view tag, const Attrs& attrs, int depth, bool self_close) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += '<';
    out_ += tag;
    for (const auto& [k, v] : attrs) out_ += " " + k + "=\"" + escape(v) + "\"";
    out_ += self_close ? "/>\n" : ">\n";
  }

  void close(std::string_view tag, int depth) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }

  void node(const SceneNode& n, int depth) {
    if (n.is_leaf()) {
      leaf(n, depth);
      return;
    }
    Attrs attrs;
    if (!n.matrix.is_identity()) attrs["transform"] = matrix(n.matrix);
    if (cfg_.annotate && !n.name.empty()) attrs["data-container-id"] = n.name;
    if (n.children.empty()) {
      open("g", attrs, depth, true);
      return;
    }
    open("g", attrs, depth, false);
    for (const auto& c : n.children) node(c, depth + 1);
    close("g", depth);
  }

  void leaf(const SceneNode& n, int depth) {
    const Primitive& p = n.primitive;
    Attrs attrs;
    auto number = [&](const char* svg_name, const char* attr) {
      attrs[svg_name] = num(p.number(attr));
    };
    switch (p.kind) {
      case PrimitiveKind::rect:
      case PrimitiveKind::image:
        number("x", "x");
        number("y", "y");
        number("width", "width");
        number("height", "height");
        if (p.kind == PrimitiveKind::image) attrs["href"] = p.string("href");
        break;
      case PrimitiveKind::circle:
        number("cx", "cx");
        number("cy", "cy");
        number("r", "r");
        break;
      case PrimitiveKind::polygon: {
        std::string pts;
        if (const Points* ps = p.points("points")) {
          for (const auto& q : *ps) {
            if (!pts.empty()) pts += ' ';
            pts += num(q.x) + "," + num(q.y);
          }
        }
        attrs["points"] = pts;
        break;
      }
      case PrimitiveKind::line:
        number("x1", "x1");
        number("y1", "y1");
        number("x2", "x2");
        number("y2", "y2");
        break;
      case PrimitiveKind::path:
        attrs["d"] = p.string("d");
        break;
      case PrimitiveKind::text:
        number("x", "x");
        number("y", "y");
        number("font-size", "fontSize");
        if (n.text_middle) attrs["text-anchor"] = "middle";
        break;
    }
    for (const char* style : {"fill", "stroke"}) {
      if (p.attrs.count(style)) attrs[style] = p.string(style);
    }
    if (p.attrs.count("strokeWidth")) attrs["stroke-width"] = num(p.number("strokeWidth"));
    if (p.attrs.count("opacity")) attrs["opacity"] = num(p.number("opacity"));
    if (!n.matrix.is_identity()) attrs["transform"] = matrix(n.matrix);
    if (cfg_.annotate && !n.name.empty()) attrs["data-container-id"] = n.name;

    const char* tag = to_string(p.kind).data();
    if (p.kind == PrimitiveKind::text) {
      out_.append(static_cast<std::size_t>(depth) * 2, ' ');
      out_ += "<text";
      for (const auto& [k, v] : attrs) out_ += " " + k + "=\"" + escape(v) + "\"";
      out_ += ">" + escape(p.string("content")) + "</text>\n";
      return;
    }
    open(tag, attrs, depth, true);
  }

  std::string finish(const SceneNode* scene) {
    Attrs root{{"height", num(cfg_.height)},
               {"version", "1.1"},
               {"width", num(cfg_.width)},
               {"xmlns", "http://www.w3.org/2000/svg"}};
    std::optional<std::array<double, 4>> vb = cfg_.view_box;
    if (!vb && cfg_.fit && scene) {
      const BBox b = node_bbox(*scene);
      if (b.valid) {
        const double pad = std::max({b.width(), b.height(), 1.0}) * 0.05;
        vb = std::array<double, 4>{b.min_x - pad, b.min_y - pad, b.width() + 2 * pad, b.height() + 2 * pad};
      }
    }
    if (vb) root["viewBox"] = num((*vb)[0]) + " " + num((*vb)[1]) + " " + num((*vb)[2]) + " " + num((*vb)[3]);

    std::string body;
    std::swap(body, out_);
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    const bool empty = !scene && !cfg_.background;
    open("svg", root, 0, empty);
    if (empty) return out_;
    if (cfg_.background) {
      open("rect", {{"fill", *cfg_.background}, {"height", "100%"}, {"width", "100%"},
                    {"x", vb ? num((*vb)[0]) : "0"}, {"y", vb ? num((*vb)[1]) : "0"}},
           1, true);
    }
    out_ += body;
    close("svg", 0);
    return out_;
  }

 private:
  const SvgConfig& cfg_;
  int decimals_;
  std::string out_;
};

}  // namespace

std::string render_svg(const SceneNode& scene, const SvgConfig& cfg) {
  Writer w(cfg);
  w.node(scene, 1);
  return w.finish(&scene);
}

std::string render_document(const GlyphDocument& doc, const SvgConfig& cfg, const LayoutOptions& layout,
                            std::vector<std::string>* warnings) {
  if (!doc.root) {
    Writer w(cfg);
    return w.finish(nullptr);
  }
  return render_svg(instantiate(doc, layout, warnings), cfg);
}

}  // namespace gdsl
