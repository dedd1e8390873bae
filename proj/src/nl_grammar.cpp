// Command templates for the five operations. Each matcher works on the
// lowercased sentence; noun phrases are resolved against container ids,
// the selection and primitive kinds.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>

#include "gdsl/core.hpp"
#include "gdsl/format.hpp"
#include "nl_internal.hpp"

namespace gdsl::nl {

namespace {

const std::string kNum =
    R"((-?\d+(?:\.\d+)?|-?\.\d+|zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|nineteen|twenty|a dozen|dozen))";

std::optional<double> parse_num(const std::string& s) {
  static const std::map<std::string, double> words{
      {"zero", 0},     {"one", 1},        {"two", 2},        {"three", 3},     {"four", 4},
      {"five", 5},     {"six", 6},        {"seven", 7},      {"eight", 8},     {"nine", 9},
      {"ten", 10},     {"eleven", 11},    {"twelve", 12},    {"thirteen", 13}, {"fourteen", 14},
      {"fifteen", 15}, {"sixteen", 16},   {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
      {"twenty", 20},  {"a dozen", 12},   {"dozen", 12},     {"once", 1},      {"twice", 2},
      {"thrice", 3}};
  if (auto it = words.find(s); it != words.end()) return it->second;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n,");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n,");
  return s.substr(a, b - a + 1);
}

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += c;
    }
  }
  return trim(out);
}

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

std::string sanitize_id(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ' ';
    out += ok ? c : '-';
  }
  out = trim(out);
  return out.empty() ? "item" : out;
}

std::string unique_id(const std::string& base, const GlyphDocument& doc) {
  const std::string b = sanitize_id(base);
  if (!doc.find(ContainerId(b))) return b;
  for (int n = 2;; ++n) {
    const std::string cand = b + "-" + std::to_string(n);
    if (!doc.find(ContainerId(cand))) return cand;
  }
}

std::vector<std::string> singulars(const std::string& w) {
  std::vector<std::string> out{w};
  if (w.size() > 3 && w.ends_with("ies")) out.push_back(w.substr(0, w.size() - 3) + "y");
  if (w.size() > 2 && w.ends_with("es")) out.push_back(w.substr(0, w.size() - 2));
  if (w.size() > 1 && w.ends_with("s")) out.push_back(w.substr(0, w.size() - 1));
  return out;
}

bool has_word(const std::string& text, const std::string& word) {
  std::size_t pos = 0;
  while ((pos = text.find(word, pos)) != std::string::npos) {
    const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
    const std::size_t e = pos + word.size();
    const bool right = e == text.size() || !std::isalnum(static_cast<unsigned char>(text[e]));
    if (left && right) return true;
    ++pos;
  }
  return false;
}

// --- noun phrases -------------------------------------------------------------

struct Resolved {
  std::string id;
  bool found = false;
  bool each = false;
};

const Container* parent_repeater(const GlyphDocument& doc, const ContainerId& id) {
  const auto parents = parent_map(doc);
  auto it = parents.find(id);
  while (it != parents.end()) {
    const Container* p = doc.find(it->second);
    if (p && p->is_repeater()) return p;
    it = parents.find(it->second);
  }
  return nullptr;
}

std::optional<PrimitiveKind> shape_kind(const std::string& w, int* points) {
  static const std::map<std::string, std::pair<PrimitiveKind, int>> shapes{
      {"circle", {PrimitiveKind::circle, 0}},   {"dot", {PrimitiveKind::circle, 0}},
      {"disc", {PrimitiveKind::circle, 0}},     {"rect", {PrimitiveKind::rect, 0}},
      {"rectangle", {PrimitiveKind::rect, 0}},  {"square", {PrimitiveKind::rect, -1}},
      {"bar", {PrimitiveKind::rect, 0}},        {"box", {PrimitiveKind::rect, 0}},
      {"triangle", {PrimitiveKind::polygon, 3}}, {"diamond", {PrimitiveKind::polygon, 4}},
      {"hexagon", {PrimitiveKind::polygon, 6}}, {"pentagon", {PrimitiveKind::polygon, 5}},
      {"polygon", {PrimitiveKind::polygon, 0}}, {"star", {PrimitiveKind::polygon, 0}},
      {"line", {PrimitiveKind::line, 0}},       {"path", {PrimitiveKind::path, 0}},
      {"curve", {PrimitiveKind::path, 0}},      {"text", {PrimitiveKind::text, 0}},
      {"label", {PrimitiveKind::text, 0}},      {"image", {PrimitiveKind::image, 0}},
      {"picture", {PrimitiveKind::image, 0}},   {"icon", {PrimitiveKind::image, 0}}};
  for (const auto& s : singulars(w)) {
    if (auto it = shapes.find(s); it != shapes.end()) {
      *points = it->second.second;
      return it->second.first;
    }
  }
  return std::nullopt;
}

Resolved resolve(std::string phrase, const GlyphDocument& doc, const std::optional<ContainerId>& selection) {
  Resolved r;
  phrase = squash(lower(phrase));
  if (phrase.ends_with("'s")) phrase.resize(phrase.size() - 2);
  phrase += ' ';
  bool demonstrative = false;
  for (bool again = true; again;) {
    again = false;
    for (const char* det : {"the ", "a ", "an ", "this ", "that ", "these ", "those ", "each ", "every ", "all ",
                            "its ", "my ", "our ", "of "}) {
      if (phrase.rfind(det, 0) == 0) {
        const std::string d(det);
        if (d == "each " || d == "every " || d == "all ") r.each = true;
        if (d == "this " || d == "that " || d == "these " || d == "those ") demonstrative = true;
        phrase = phrase.substr(d.size());
        again = true;
      }
    }
  }
  phrase = trim(phrase);
  static const std::vector<std::string> pronouns{"it", "this", "that", "them", "these", "those", "selection",
                                                 "selected", "the selection", "selected shape", "current shape",
                                                 "shape", "the shape"};
  const bool pronoun = phrase.empty() || std::find(pronouns.begin(), pronouns.end(), phrase) != pronouns.end();
  if ((pronoun || demonstrative) && selection && doc.find(*selection)) {
    r.id = selection->str();
    r.found = true;
    return r;
  }
  if (pronoun) {
    r.id = selection ? selection->str() : phrase;
    return r;
  }

  const auto cands = singulars(phrase);
  for (const auto& cand : cands) {
    for (const auto& [id, c] : doc.containers) {
      if (lower(id.str()) == cand) {
        r.id = id.str();
        r.found = true;
        return r;
      }
    }
  }
  // Whole-word containment, shortest id first.
  std::vector<std::string> hits;
  for (const auto& cand : cands) {
    for (const auto& [id, c] : doc.containers) {
      if (has_word(lower(id.str()), cand)) hits.push_back(id.str());
    }
    if (!hits.empty()) break;
  }
  if (!hits.empty()) {
    std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    r.id = hits.front();
    r.found = true;
    return r;
  }
  // A shape word picks a basic container of that kind.
  const std::string head = phrase.substr(phrase.find_last_of(' ') == std::string::npos ? 0 : phrase.find_last_of(' ') + 1);
  int points = 0;
  if (auto kind = shape_kind(head, &points)) {
    const Container* best = nullptr;
    for (const auto& [id, c] : doc.containers) {
      const auto* b = std::get_if<BasicBody>(&c.body);
      if (!b || b->primitive.kind != *kind) continue;
      bool exact = false;
      if (points > 0) {
        const Points* ps = b->primitive.points("points");
        exact = ps && static_cast<int>(ps->size()) == points;
      } else if (points < 0) {
        exact = b->primitive.number("width") == b->primitive.number("height");
      }
      if (!best || exact) {
        best = &c;
        if (exact) break;
      }
    }
    if (best) {
      r.id = best->id.str();
      r.found = true;
      return r;
    }
  }
  r.id = sanitize_id(phrase);
  return r;
}

// --- attributes -----------------------------------------------------------------

enum class AttrClass { scale, primitive, count, rotation };

struct AttrSpec {
  AttrClass cls = AttrClass::primitive;
  std::string name;  // primitive attribute name
};

std::optional<AttrSpec> attr_spec(const std::string& word) {
  static const std::map<std::string, AttrSpec> table{
      {"size", {AttrClass::scale, ""}},          {"scale", {AttrClass::scale, ""}},
      {"fill", {AttrClass::primitive, "fill"}},  {"color", {AttrClass::primitive, "fill"}},
      {"colour", {AttrClass::primitive, "fill"}}, {"fill color", {AttrClass::primitive, "fill"}},
      {"stroke", {AttrClass::primitive, "stroke"}}, {"outline", {AttrClass::primitive, "stroke"}},
      {"border", {AttrClass::primitive, "stroke"}}, {"stroke color", {AttrClass::primitive, "stroke"}},
      {"stroke width", {AttrClass::primitive, "strokeWidth"}}, {"line width", {AttrClass::primitive, "strokeWidth"}},
      {"thickness", {AttrClass::primitive, "strokeWidth"}}, {"opacity", {AttrClass::primitive, "opacity"}},
      {"width", {AttrClass::primitive, "width"}}, {"height", {AttrClass::primitive, "height"}},
      {"radius", {AttrClass::primitive, "r"}},   {"radii", {AttrClass::primitive, "r"}},
      {"font size", {AttrClass::primitive, "fontSize"}}, {"text", {AttrClass::primitive, "content"}},
      {"content", {AttrClass::primitive, "content"}}, {"label", {AttrClass::primitive, "content"}},
      {"name", {AttrClass::primitive, "content"}}, {"x", {AttrClass::primitive, "x"}},
      {"y", {AttrClass::primitive, "y"}},        {"count", {AttrClass::count, ""}},
      {"number", {AttrClass::count, ""}},        {"copies", {AttrClass::count, ""}},
      {"repetitions", {AttrClass::count, ""}},   {"angle", {AttrClass::rotation, ""}},
      {"rotation", {AttrClass::rotation, ""}},   {"orientation", {AttrClass::rotation, ""}}};
  for (const auto& s : singulars(word)) {
    if (auto it = table.find(s); it != table.end()) return it->second;
  }
  if (word == "radii") return table.at("radii");
  return std::nullopt;
}

// Splits "X's A", "A of X", "X A" (A a known attribute word, one or two
// words) or a bare attribute. Returns {noun, attribute word}.
std::pair<std::string, std::string> split_attr_phrase(std::string phrase) {
  phrase = squash(phrase);
  if (auto p = phrase.find("'s "); p != std::string::npos) return {phrase.substr(0, p), phrase.substr(p + 3)};
  if (auto p = phrase.find("' "); p != std::string::npos) return {phrase.substr(0, p), phrase.substr(p + 2)};
  if (auto p = phrase.find(" of "); p != std::string::npos) {
    std::string attr = phrase.substr(0, p);
    for (const char* det : {"the ", "a ", "an "}) {
      if (attr.rfind(det, 0) == 0) attr = attr.substr(std::string(det).size());
    }
    return {phrase.substr(p + 4), attr};
  }
  const auto words = [&] {
    std::vector<std::string> w;
    std::size_t pos = 0;
    while (pos < phrase.size()) {
      const auto e = phrase.find(' ', pos);
      w.push_back(phrase.substr(pos, e - pos));
      if (e == std::string::npos) break;
      pos = e + 1;
    }
    return w;
  }();
  auto join = [&](std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t i = from; i < to; ++i) s += (i > from ? " " : "") + words[i];
    return s;
  };
  const std::size_t n = words.size();
  if (n >= 2 && attr_spec(join(n - 2, n))) return {join(0, n - 2), join(n - 2, n)};
  if (n >= 1 && attr_spec(words[n - 1])) return {join(0, n - 1), words[n - 1]};
  return {phrase, ""};
}

std::optional<std::string> color_value(const std::string& v) {
  return normalize_color(trim(v));
}

const Container* first_basic(const GlyphDocument& doc, const Container* c) {
  while (c) {
    if (c->is_basic()) return c;
    if (const auto* r = std::get_if<RepeaterBody>(&c->body)) {
      c = doc.find(r->child);
    } else {
      const auto& comp = std::get<CompositorBody>(c->body);
      if (comp.children.empty()) return nullptr;
      c = doc.find(comp.children.front());
    }
  }
  return nullptr;
}

bool supports_attr(const Container& basic, const std::string& name) {
  const auto& p = std::get<BasicBody>(basic.body).primitive;
  return primitive_attr_type(p.kind, name).has_value();
}

Slot target_slot(const std::string& id, const Resolved& r, const GlyphDocument& doc) {
  return {id, SlotKind::targetId, r.id, all_ids(doc), false};
}

Slot number_slot(const std::string& id, double v, bool defaulted = false) {
  return {id, SlotKind::number, v, {}, defaulted};
}

Slot text_slot(const std::string& id, const std::string& v) { return {id, SlotKind::freeString, v, {}, false}; }

// --- templates --------------------------------------------------------------------

std::optional<Proposal> encode(const std::string& noun, const std::string& attr_word, DataSource data,
                               std::optional<std::pair<double, double>> range, const GlyphDocument& doc,
                               const std::optional<ContainerId>& selection) {
  const auto spec = attr_word.empty() ? std::optional<AttrSpec>() : attr_spec(attr_word);
  if (!spec || spec->cls == AttrClass::count) return std::nullopt;
  Resolved who = resolve(noun, doc, selection);
  if (!who.found && who.id.empty() && spec->name == "content") who = resolve("text", doc, selection);

  // The repeater whose instances vary, and the container inside it.
  const Container* c = doc.find(ContainerId(who.id));
  const Container* rep = nullptr;
  const Container* inner = nullptr;
  if (c && c->is_repeater()) {
    rep = c;
    inner = first_basic(doc, doc.find(std::get<RepeaterBody>(c->body).child));
  } else if (c) {
    rep = parent_repeater(doc, c->id);
    inner = c->is_basic() ? c : first_basic(doc, c);
  }

  std::string field;
  switch (spec->cls) {
    case AttrClass::scale: field = "scale.sx+sy"; break;
    case AttrClass::rotation: field = "rotate.angleDeg"; break;
    default: {
      std::string name = spec->name;
      // Heights and widths of shapes without such attributes scale instead.
      if (inner && !supports_attr(*inner, name)) {
        if (name == "height") field = "scale.sy";
        else if (name == "width") field = "scale.sx";
      }
      if (field.empty()) field = "primitive." + name;
    }
  }

  std::string target = who.id, path;
  const bool placement = field.rfind("scale.", 0) == 0 || field.rfind("rotate.", 0) == 0;
  if (rep) {
    target = rep->id.str();
    const ContainerId child = std::get<RepeaterBody>(rep->body).child;
    const Container* sub = placement ? (c && !c->is_repeater() ? c : nullptr) : inner;
    if (!sub || sub->id == child) {
      path = "instance." + field;
    } else if (placement) {
      path = "instance[" + sub->id.str() + "].transform." + (field == "scale.sx+sy" ? "scale.sy" : field);
    } else {
      path = "instance[" + sub->id.str() + "]." + field;
    }
  } else {
    path = placement ? "transform." + (field == "scale.sx+sy" ? std::string("scale.sx") : field) : field;
  }

  Proposal p;
  EncodeData op;
  op.target = ContainerId(target);
  op.path = path;
  op.data = std::move(data);
  p.operation = op;
  Resolved t = who;
  t.id = target;
  p.slots.push_back(target_slot("target", t, doc));
  p.slots.push_back(text_slot("path", path));
  if (range) {
    p.slots.push_back(number_slot("lo", range->first));
    p.slots.push_back(number_slot("hi", range->second));
    p.hints["data"] = "random";
    p.explanation = "Bind {{path}} of {{target}} to a random value between {{lo}} and {{hi}}.";
  } else {
    std::string joined;
    for (const auto& v : std::get<ValueList>(op.data).values) {
      if (!joined.empty()) joined += ", ";
      if (const auto* d = std::get_if<double>(&v)) joined += format_number(*d, 6);
      else joined += std::get<std::string>(v);
    }
    p.slots.push_back(text_slot("values", joined));
    p.explanation = "Bind {{path}} of {{target}} to the values {{values}}.";
  }
  rebuild(p, doc);
  return p;
}

ValueList list_values(const std::string& original) {
  std::string s = trim(original);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  // "A, B and C" -> "A, B, C"
  static const std::regex and_re(R"(,?\s+and\s+)", std::regex::icase);
  s = std::regex_replace(s, and_re, ", ");
  ValueList out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto e = s.find(',', pos);
    const std::string item = unquote(s.substr(pos, e == std::string::npos ? std::string::npos : e - pos));
    if (!item.empty()) {
      if (auto v = parse_num(lower(item))) out.values.emplace_back(*v);
      else out.values.emplace_back(item);
    }
    if (e == std::string::npos) break;
    pos = e + 1;
  }
  return out;
}

std::optional<Proposal> randomize(const std::string& low, const GlyphDocument& doc,
                                  const std::optional<ContainerId>& selection) {
  static const std::regex r1("^randomi[sz]e\\s+(.+?)\\s+(?:between|from)\\s+" + kNum + "\\s+(?:and|to)\\s+" + kNum + "$");
  static const std::regex r2(
      "^(?:give|assign)\\s+(.+?)\\s+(?:a\\s+|an\\s+)?(?:different|random|varying|randomly varying)\\s+(.+?),?\\s+"
      "(?:randomly\\s+)?(?:varying\\s+|ranging\\s+|distributed\\s+)?(?:between|from)\\s+" +
      kNum + "\\s+(?:and|to)\\s+" + kNum + "$");
  std::smatch m;
  std::string noun, attr;
  std::optional<double> lo, hi;
  if (std::regex_match(low, m, r1)) {
    std::tie(noun, attr) = split_attr_phrase(m[1]);
    lo = parse_num(m[2]);
    hi = parse_num(m[3]);
  } else if (std::regex_match(low, m, r2)) {
    noun = m[1];
    attr = m[2];
    lo = parse_num(m[3]);
    hi = parse_num(m[4]);
  } else {
    return std::nullopt;
  }
  if (!lo || !hi || attr.empty()) return std::nullopt;
  return encode(noun, attr, Expression{random_expression(*lo, *hi)}, std::pair{*lo, *hi}, doc, selection);
}

std::optional<Proposal> compose(const std::string& low, const GlyphDocument& doc,
                                const std::optional<ContainerId>& selection) {
  static const std::regex re("^(?:add|place|put|position|move|attach)\\s+(.+?)\\s+(?:" + kNum +
                             "\\s+(?:units?|px|pixels?)\\s+)?(above|on top of|over|below|under|beneath|underneath|"
                             "to the left of|left of|on the left of|to the right of|right of|on the right of|"
                             "at the center of|in the center of|in the middle of|centered on|inside|on)\\s+(.+)$");
  std::smatch m;
  if (!std::regex_match(low, m, re)) return std::nullopt;
  const std::string rel = m[3];
  RelType type = RelType::top;
  if (rel == "above" || rel == "on top of" || rel == "over" || rel == "on") type = RelType::top;
  else if (rel == "below" || rel == "under" || rel == "beneath" || rel == "underneath") type = RelType::bottom;
  else if (rel.find("left") != std::string::npos) type = RelType::left;
  else if (rel.find("right") != std::string::npos) type = RelType::right;
  else type = RelType::center;
  const double dist = m[2].matched ? parse_num(m[2]).value_or(0.0) : 0.0;

  const Resolved src = resolve(m[1], doc, selection);
  Resolved dst = resolve(m[4], doc, std::nullopt);
  // "above each curve": compose inside the repeater, with its child.
  if (dst.found && dst.each) {
    if (const Container* c = doc.find(ContainerId(dst.id)); c && c->is_repeater()) {
      dst.id = std::get<RepeaterBody>(c->body).child.str();
    }
  }

  Proposal p;
  CreateCompositor op;
  const std::string rel_word = type == RelType::top      ? "above"
                               : type == RelType::bottom ? "below"
                               : type == RelType::left   ? "left of"
                               : type == RelType::right  ? "right of"
                                                         : "on";
  op.id = ContainerId(unique_id(src.id + " " + rel_word + " " + dst.id, doc));
  op.children = {ContainerId(src.id), ContainerId(dst.id)};
  op.relations = {SpatialRelation{ContainerId(src.id), ContainerId(dst.id), type, {}}};
  p.operation = op;
  p.slots.push_back(text_slot("newId", op.id.str()));
  p.slots.push_back(target_slot("source", src, doc));
  p.slots.push_back(target_slot("target", dst, doc));
  if (type != RelType::center) p.slots.push_back(number_slot("distance", dist, !m[2].matched));
  p.explanation = explain(p.operation);
  rebuild(p, doc);
  return p;
}

std::optional<Proposal> duplicate(const std::string& low, const GlyphDocument& doc,
                                  const std::optional<ContainerId>& selection) {
  static const std::regex verbs(R"(\b(duplicate|duplicates|copy|copies|repeat|replicate|clone)\b)");
  if (!std::regex_search(low, verbs)) return std::nullopt;
  std::string rest = " " + low + " ";
  auto take = [&](const std::regex& re) -> std::optional<std::smatch> {
    std::smatch m;
    if (!std::regex_search(rest, m, re)) return std::nullopt;
    std::smatch copy = m;
    rest = m.prefix().str() + " " + m.suffix().str();
    return copy;
  };
  auto grab = [&](const std::regex& re) {
    auto m = take(re);
    return m ? std::optional<std::string>((*m)[1].str()) : std::nullopt;
  };

  static const std::regex angle_re("(?:every|by|at|with|of)\\s+" + kNum + "\\s*(?:degrees?|deg|°)");
  static const std::regex angle_re2(kNum + "\\s*(?:degrees?|deg|°)(?:\\s+apart)?");
  static const std::regex spacing_re(kNum + "\\s+(?:units?|px|pixels?)(?:\\s+apart)?");
  static const std::regex spacing_re2("(?:spacing|gap|step|distance)\\s+(?:of\\s+)?" + kNum);
  static const std::regex count_re(kNum + "\\s+(?:times|copies|instances|repetitions)");
  static const std::regex count_re2(R"(\b(once|twice|thrice)\b)");
  static const std::regex polar_re(
      R"(\b(rotate|rotating|rotated|around(?: a| the)?(?: center| circle)?|radially|rotationally|in a (?:circle|ring)|circularly)\b)");
  static const std::regex vertical_re(R"(\b(vertically|vertical|downward|downwards|in a column)\b)");
  static const std::regex horizontal_re(R"(\b(horizontally|horizontal|sideways|in a row)\b)");

  auto angle = grab(angle_re);
  if (!angle) angle = grab(angle_re2);
  auto spacing = grab(spacing_re);
  if (!spacing) spacing = grab(spacing_re2);
  auto count = grab(count_re);
  if (!count) count = grab(count_re2);
  const bool polar = take(polar_re).has_value() || angle.has_value();
  const bool vertical = take(vertical_re).has_value();
  (void)take(horizontal_re);

  static const std::regex filler(R"(\b(duplicate|duplicates|copy|copies|repeat|replicate|clone|and|make|create|please|of|it's)\b)");
  std::string target_phrase = squash(std::regex_replace(rest, filler, " "));
  // "make 5 copies of the star": the number sits before "copies".
  if (!count) {
    static const std::regex lead("^" + kNum + "\\s+(.*)$");
    std::smatch m;
    if (std::regex_match(target_phrase, m, lead)) {
      count = m[1].str();
      target_phrase = m[2].str();
    }
  }
  const Resolved who = resolve(target_phrase, doc, selection);
  const double n = count ? parse_num(*count).value_or(2.0) : 2.0;
  if (n < 1 || n != std::floor(n)) return std::nullopt;

  Proposal p;
  CreateRepeater op;
  op.id = ContainerId(unique_id(who.id + (polar ? " ring" : " copies"), doc));
  op.target = ContainerId(who.id);
  op.coord_kind = polar ? CoordKind::polar : CoordKind::cartesian;
  op.count = static_cast<int>(n);
  op.arrangement.mode = ArrangementMode::uniform;
  p.slots.push_back(text_slot("newId", op.id.str()));
  p.slots.push_back(target_slot("target", who, doc));
  p.slots.push_back(number_slot("count", n, !count));
  if (polar) {
    const double a = angle ? parse_num(*angle).value_or(0.0) : 360.0 / n;
    op.arrangement.delta_angle_deg = a;
    p.slots.push_back(number_slot("angle", a, !angle));
  } else {
    p.hints["axis"] = vertical ? "y" : "x";
    op.arrangement.step = Vec2{};
    p.slots.push_back(number_slot("step", spacing ? parse_num(*spacing).value_or(0.0) : 0.0, !spacing));
  }
  p.operation = op;
  rebuild(p, doc);
  p.explanation = explain(p.operation);
  return p;
}

std::optional<Proposal> modify_or_list(const std::string& low, const std::string& original, const GlyphDocument& doc,
                                       const std::optional<ContainerId>& selection) {
  static const std::regex set_re(R"(^(?:change|set|update|make|turn|modify|alter)\s+(.+?)\s+(?:to|into|=|as)\s+(.+)$)");
  static const std::regex paint_re(R"(^(?:make|color|colour|paint|fill)\s+(.+?)\s+(#[0-9a-f]{3,8}|[a-z]+)$)");
  static const std::regex encode_re(R"(^(?:encode|map|bind)\s+(.+?)\s+(?:to|with|as|using)\s+(?:the\s+)?(?:values?\s+)?(.+)$)");
  std::smatch m;
  std::string lhs, value_low;
  std::size_t value_pos = 0;
  bool force_list = false;
  bool paint = false;
  if (std::regex_match(low, m, encode_re)) {
    force_list = true;
  } else if (!std::regex_match(low, m, set_re)) {
    if (!std::regex_match(low, m, paint_re) || !color_value(m[2])) return std::nullopt;
    paint = true;
  }
  lhs = m[1];
  value_low = m[2];
  value_pos = static_cast<std::size_t>(m.position(2));
  const std::string value_text = original.substr(value_pos, value_low.size());

  std::string noun, attr_word;
  if (paint) {
    noun = lhs;
    attr_word = "fill";
  } else {
    std::tie(noun, attr_word) = split_attr_phrase(lhs);
  }
  if (attr_word.empty()) return std::nullopt;

  const ValueList list = list_values(value_text);
  if (force_list || list.values.size() >= 2) {
    if (list.values.empty()) return std::nullopt;
    return encode(noun, attr_word, list, std::nullopt, doc, selection);
  }

  const auto spec = attr_spec(attr_word);
  Resolved who = resolve(noun, doc, selection);
  if (!who.found && who.id.empty() && spec && spec->name == "content") who = resolve("text", doc, selection);
  const Container* c = doc.find(ContainerId(who.id));

  std::string param;
  SlotKind kind = SlotKind::freeString;
  Scalar value = unquote(value_text);
  if (!spec) {
    param = "primitive." + attr_word;
  } else if (spec->cls == AttrClass::count) {
    if (c && !c->is_repeater()) {
      if (const Container* r = parent_repeater(doc, c->id)) who.id = r->id.str();
    }
    param = "body.count";
  } else if (spec->cls == AttrClass::rotation) {
    param = c && c->is_repeater() ? "arrangement.deltaAngleDeg" : "transform.rotate.angleDeg";
  } else if (spec->cls == AttrClass::scale) {
    param = "transform.scale.sx";
  } else {
    // Primitive attributes live on the basic container.
    if (c && !c->is_basic()) {
      if (const Container* b = first_basic(doc, c)) who.id = b->id.str();
      c = doc.find(ContainerId(who.id));
    }
    std::string name = spec->name;
    if (c && c->is_basic() && !supports_attr(*c, name)) {
      if (name == "height") param = "transform.scale.sy";
      else if (name == "width") param = "transform.scale.sx";
    }
    if (param.empty()) param = "primitive." + name;
  }

  const bool color_param = param == "primitive.fill" || param == "primitive.stroke";
  if (color_param) {
    if (auto col = color_value(value_low)) {
      value = *col;
      kind = SlotKind::color;
    }
  } else if (param != "primitive.content") {
    if (auto v = parse_num(trim(value_low))) {
      value = *v;
      kind = SlotKind::number;
    } else if (param.rfind("primitive.", 0) != 0) {
      return std::nullopt;
    }
  }

  Proposal p;
  ModifyParams op;
  op.target = ContainerId(who.id);
  p.operation = op;
  p.slots.push_back(target_slot("target", who, doc));
  p.slots.push_back(text_slot("attr", param));
  p.slots.push_back({"value", kind, value, {}, false});
  p.explanation = "Set {{attr}} of {{target}} to {{value}}.";
  rebuild(p, doc);
  return p;
}

}  // namespace

std::optional<Proposal> grammar_parse(const std::string& sentence, const GlyphDocument& doc,
                                      const std::optional<ContainerId>& selection) {
  std::string s = sentence;
  // Typographic apostrophes and quotes.
  for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"\xE2\x80\x99", "'"}, {"\xE2\x80\x98", "'"}, {"\xE2\x80\x9C", "\""}, {"\xE2\x80\x9D", "\""}}) {
    for (std::size_t pos; (pos = s.find(from)) != std::string::npos;) s.replace(pos, from.size(), to);
  }
  s = squash(s);
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) s.pop_back();
  s = trim(s);
  if (s.empty()) return std::nullopt;
  const std::string low = lower(s);

  if (auto p = randomize(low, doc, selection)) return p;
  if (auto p = compose(low, doc, selection)) return p;
  if (auto p = duplicate(low, doc, selection)) return p;
  if (auto p = modify_or_list(low, s, doc, selection)) return p;
  return std::nullopt;
}

}  // namespace gdsl::nl
