#include "gdsl/path.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "gdsl/error.hpp"
#include "gdsl/format.hpp"

namespace gdsl {

namespace {

class PathLexer {
 public:
  explicit PathLexer(std::string_view d) : d_(d) {}

  void skip_separators() {
    while (pos_ < d_.size() && (std::isspace(static_cast<unsigned char>(d_[pos_])) || d_[pos_] == ',')) {
      ++pos_;
    }
  }

  bool at_end() {
    skip_separators();
    return pos_ >= d_.size();
  }

  bool next_is_command() {
    skip_separators();
    return pos_ < d_.size() && std::isalpha(static_cast<unsigned char>(d_[pos_])) &&
           d_[pos_] != 'e' && d_[pos_] != 'E';
  }

  bool next_is_number() {
    skip_separators();
    if (pos_ >= d_.size()) return false;
    const char c = d_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }

  char command() {
    skip_separators();
    return d_[pos_++];
  }

  double number() {
    skip_separators();
    const std::size_t start = pos_;
    if (pos_ < d_.size() && (d_[pos_] == '-' || d_[pos_] == '+')) ++pos_;
    bool digits = false;
    while (pos_ < d_.size() && std::isdigit(static_cast<unsigned char>(d_[pos_]))) {
      ++pos_;
      digits = true;
    }
    if (pos_ < d_.size() && d_[pos_] == '.') {
      ++pos_;
      while (pos_ < d_.size() && std::isdigit(static_cast<unsigned char>(d_[pos_]))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) fail("expected a number");
    if (pos_ < d_.size() && (d_[pos_] == 'e' || d_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < d_.size() && (d_[pos_] == '-' || d_[pos_] == '+')) ++pos_;
      if (pos_ < d_.size() && std::isdigit(static_cast<unsigned char>(d_[pos_]))) {
        while (pos_ < d_.size() && std::isdigit(static_cast<unsigned char>(d_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    const std::string lexeme(d_.substr(start, pos_ - start));
    const double v = std::strtod(lexeme.c_str(), nullptr);
    if (!std::isfinite(v)) fail("number out of range");
    return v;
  }

  // Arc flags may be written without separators ("a1 1 0 0110 10").
  bool flag() {
    skip_separators();
    if (pos_ < d_.size() && (d_[pos_] == '0' || d_[pos_] == '1')) return d_[pos_++] == '1';
    fail("expected an arc flag");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::MalformedInput,
                "path data: " + msg + " at offset " + std::to_string(pos_), "d");
  }

 private:
  std::string_view d_;
  std::size_t pos_ = 0;
};

Vec2 reflect(Vec2 control, Vec2 about) { return about * 2.0 - control; }

struct ArcCenter {
  Vec2 center;
  double rx, ry, phi, theta1, dtheta;
  Vec2 point(double t) const {
    const double cp = std::cos(phi), sp = std::sin(phi);
    return {center.x + rx * cp * std::cos(t) - ry * sp * std::sin(t),
            center.y + rx * sp * std::cos(t) + ry * cp * std::sin(t)};
  }
};

double vector_angle(double ux, double uy, double vx, double vy) {
  return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
}

// Endpoint to center parameterization per the SVG implementation notes.
std::optional<ArcCenter> arc_center(const PathSegment& s) {
  double rx = std::abs(s.rx), ry = std::abs(s.ry);
  if (rx == 0 || ry == 0 || s.start == s.end) return std::nullopt;
  const double phi = s.x_axis_rotation * std::numbers::pi / 180.0;
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double dx = (s.start.x - s.end.x) / 2, dy = (s.start.y - s.end.y) / 2;
  const double x1 = cp * dx + sp * dy;
  const double y1 = -sp * dx + cp * dy;
  const double lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
  if (lambda > 1) {
    rx *= std::sqrt(lambda);
    ry *= std::sqrt(lambda);
  }
  const double num = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
  const double den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
  double coef = std::sqrt(std::max(0.0, num / den));
  if (s.large_arc == s.sweep) coef = -coef;
  const double cx1 = coef * rx * y1 / ry;
  const double cy1 = -coef * ry * x1 / rx;
  ArcCenter a;
  a.center = {cp * cx1 - sp * cy1 + (s.start.x + s.end.x) / 2,
              sp * cx1 + cp * cy1 + (s.start.y + s.end.y) / 2};
  a.rx = rx;
  a.ry = ry;
  a.phi = phi;
  a.theta1 = vector_angle(1, 0, (x1 - cx1) / rx, (y1 - cy1) / ry);
  a.dtheta = vector_angle((x1 - cx1) / rx, (y1 - cy1) / ry, (-x1 - cx1) / rx, (-y1 - cy1) / ry);
  if (!s.sweep && a.dtheta > 0) a.dtheta -= 2 * std::numbers::pi;
  if (s.sweep && a.dtheta < 0) a.dtheta += 2 * std::numbers::pi;
  return a;
}

Vec2 eval_segment(const PathSegment& s, double t) {
  const double u = 1 - t;
  switch (s.kind) {
    case PathSegment::Kind::quad:
      return s.start * (u * u) + s.c1 * (2 * u * t) + s.end * (t * t);
    case PathSegment::Kind::cubic:
      return s.start * (u * u * u) + s.c1 * (3 * u * u * t) + s.c2 * (3 * u * t * t) +
             s.end * (t * t * t);
    case PathSegment::Kind::arc:
      if (auto a = arc_center(s)) return a->point(a->theta1 + a->dtheta * t);
      [[fallthrough]];
    default:
      return s.start + (s.end - s.start) * t;
  }
}

// Arc split into pieces of at most 90 degrees, each as a cubic.
std::vector<PathSegment> arc_to_cubics(const PathSegment& s) {
  std::vector<PathSegment> out;
  auto a = arc_center(s);
  if (!a) {
    PathSegment line = s;
    line.kind = PathSegment::Kind::line;
    out.push_back(line);
    return out;
  }
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(a->dtheta) / (std::numbers::pi / 2) - 1e-9)));
  const double delta = a->dtheta / pieces;
  const double k = 4.0 / 3.0 * std::tan(delta / 4);
  const double cp = std::cos(a->phi), sp = std::sin(a->phi);
  auto map = [&](double ux, double uy) {
    return Vec2{a->center.x + a->rx * cp * ux - a->ry * sp * uy,
                a->center.y + a->rx * sp * ux + a->ry * cp * uy};
  };
  Vec2 current = s.start;
  for (int i = 0; i < pieces; ++i) {
    const double t0 = a->theta1 + delta * i, t1 = t0 + delta;
    PathSegment c;
    c.kind = PathSegment::Kind::cubic;
    c.start = current;
    c.c1 = map(std::cos(t0) - k * std::sin(t0), std::sin(t0) + k * std::cos(t0));
    c.c2 = map(std::cos(t1) + k * std::sin(t1), std::sin(t1) - k * std::cos(t1));
    c.end = i + 1 == pieces ? s.end : map(std::cos(t1), std::sin(t1));
    current = c.end;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<PathSegment> parse_path(std::string_view d) {
  PathLexer lex(d);
  std::vector<PathSegment> out;
  Vec2 current, subpath_start;
  Vec2 last_cubic_ctrl, last_quad_ctrl;
  char prev = 0;
  char cmd = 0;
  bool have_move = false;

  while (!lex.at_end()) {
    if (lex.next_is_command()) {
      cmd = lex.command();
    } else if (cmd == 0) {
      lex.fail("path must start with a command");
    } else if (cmd == 'M' || cmd == 'm') {
      cmd = cmd == 'M' ? 'L' : 'l';  // implicit lineto after moveto
    } else if (cmd == 'Z' || cmd == 'z') {
      lex.fail("unexpected number after closepath");
    }

    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    auto point = [&]() {
      Vec2 p{lex.number(), 0};
      p.y = lex.number();
      return rel ? current + p : p;
    };

    if (up != 'M' && up != 'Z' && !have_move) lex.fail("path must start with moveto");

    PathSegment seg;
    seg.start = current;
    switch (up) {
      case 'M':
        seg.kind = PathSegment::Kind::move;
        seg.end = point();
        subpath_start = seg.end;
        have_move = true;
        break;
      case 'L':
        seg.kind = PathSegment::Kind::line;
        seg.end = point();
        break;
      case 'H': {
        seg.kind = PathSegment::Kind::line;
        const double x = lex.number();
        seg.end = {rel ? current.x + x : x, current.y};
        break;
      }
      case 'V': {
        seg.kind = PathSegment::Kind::line;
        const double y = lex.number();
        seg.end = {current.x, rel ? current.y + y : y};
        break;
      }
      case 'C':
        seg.kind = PathSegment::Kind::cubic;
        seg.c1 = point();
        seg.c2 = point();
        seg.end = point();
        break;
      case 'S': {
        seg.kind = PathSegment::Kind::cubic;
        const char p = static_cast<char>(std::toupper(static_cast<unsigned char>(prev)));
        seg.c1 = (p == 'C' || p == 'S') ? reflect(last_cubic_ctrl, current) : current;
        seg.c2 = point();
        seg.end = point();
        break;
      }
      case 'Q':
        seg.kind = PathSegment::Kind::quad;
        seg.c1 = point();
        seg.end = point();
        break;
      case 'T': {
        seg.kind = PathSegment::Kind::quad;
        const char p = static_cast<char>(std::toupper(static_cast<unsigned char>(prev)));
        seg.c1 = (p == 'Q' || p == 'T') ? reflect(last_quad_ctrl, current) : current;
        seg.end = point();
        break;
      }
      case 'A':
        seg.kind = PathSegment::Kind::arc;
        seg.rx = lex.number();
        seg.ry = lex.number();
        seg.x_axis_rotation = lex.number();
        seg.large_arc = lex.flag();
        seg.sweep = lex.flag();
        seg.end = point();
        break;
      case 'Z':
        seg.kind = PathSegment::Kind::close;
        seg.end = subpath_start;
        break;
      default:
        lex.fail(std::string("unknown command '") + cmd + "'");
    }

    if (seg.kind == PathSegment::Kind::cubic) last_cubic_ctrl = seg.c2;
    if (seg.kind == PathSegment::Kind::quad) last_quad_ctrl = seg.c1;
    current = seg.end;
    prev = up == 'Z' ? 'Z' : cmd;
    out.push_back(seg);
    if (up == 'Z' && lex.next_is_number()) lex.fail("unexpected number after closepath");
  }
  return out;
}

std::vector<std::vector<Vec2>> sample_path(const std::vector<PathSegment>& segments, int samples) {
  std::vector<std::vector<Vec2>> out;
  if (samples < 1) samples = 1;
  for (const auto& s : segments) {
    if (s.kind == PathSegment::Kind::move) {
      out.push_back({s.end});
      continue;
    }
    if (out.empty()) out.push_back({s.start});
    // Straight pieces are sampled too so outlines stay evenly weighted.
    auto& poly = out.back();
    for (int k = 1; k <= samples; ++k) poly.push_back(eval_segment(s, static_cast<double>(k) / samples));
  }
  return out;
}

std::string transform_path(std::string_view d, const AffineMatrix& m) {
  std::string out;
  auto put = [&](char c, std::initializer_list<Vec2> pts) {
    if (!out.empty()) out.push_back(' ');
    out.push_back(c);
    for (const Vec2& p : pts) {
      const Vec2 q = m.apply(p);
      out += ' ' + format_number(q.x, 6) + ' ' + format_number(q.y, 6);
    }
  };
  for (const auto& s : parse_path(d)) {
    switch (s.kind) {
      case PathSegment::Kind::move: put('M', {s.end}); break;
      case PathSegment::Kind::line: put('L', {s.end}); break;
      case PathSegment::Kind::quad: put('Q', {s.c1, s.end}); break;
      case PathSegment::Kind::cubic: put('C', {s.c1, s.c2, s.end}); break;
      case PathSegment::Kind::arc:
        for (const auto& c : arc_to_cubics(s)) {
          if (c.kind == PathSegment::Kind::line) {
            put('L', {c.end});
          } else {
            put('C', {c.c1, c.c2, c.end});
          }
        }
        break;
      case PathSegment::Kind::close:
        if (!out.empty()) out.push_back(' ');
        out.push_back('Z');
        break;
    }
  }
  return out;
}

}  // namespace gdsl
