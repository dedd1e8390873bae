#include "gdsl/nlcmd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>

#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/format.hpp"
#include "gdsl/layout.hpp"
#include "nl_internal.hpp"

namespace gdsl {

using namespace json_read;

std::string_view to_string(SlotKind k) {
  switch (k) {
    case SlotKind::targetId: return "targetId";
    case SlotKind::number: return "number";
    case SlotKind::color: return "color";
    case SlotKind::freeString: return "freeString";
  }
  return "freeString";
}

namespace {

std::optional<SlotKind> parse_slot_kind(std::string_view s) {
  for (auto k : {SlotKind::targetId, SlotKind::number, SlotKind::color, SlotKind::freeString}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

Slot* find_slot(Proposal& p, std::string_view id) {
  for (auto& s : p.slots) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::string slot_string(const Slot& s) {
  if (const auto* str = std::get_if<std::string>(&s.value)) return *str;
  return format_number(std::get<double>(s.value), 6);
}

double slot_number(const Slot& s) {
  if (const auto* d = std::get_if<double>(&s.value)) return *d;
  return std::strtod(std::get<std::string>(s.value).c_str(), nullptr);
}

std::optional<double> numeric(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Comma-separated values; numeric items become numbers.
ValueList split_values(const std::string& text) {
  ValueList out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    item = item.substr(a, b - a + 1);
    if (auto v = numeric(item)) out.values.emplace_back(*v);
    else out.values.emplace_back(item);
  }
  return out;
}

std::string join_values(const ValueList& l) {
  std::string out;
  for (const auto& v : l.values) {
    if (!out.empty()) out += ", ";
    if (const auto* d = std::get_if<double>(&v)) out += format_number(*d, 6);
    else out += std::get<std::string>(v);
  }
  return out;
}

AttrValue attr_value_for(const std::string&, const Slot& s) {
  if (s.kind == SlotKind::number) return slot_number(s);
  if (s.kind == SlotKind::color) return slot_string(s);
  if (const auto* d = std::get_if<double>(&s.value)) return *d;
  return std::get<std::string>(s.value);
}

Vec2 relation_distance(RelType t, double d) {
  switch (t) {
    case RelType::top: return {0, -d};
    case RelType::bottom: return {0, d};
    case RelType::left: return {-d, 0};
    case RelType::right: return {d, 0};
    case RelType::center: return {0, 0};
  }
  return {};
}

double relation_magnitude(const SpatialRelation& r) {
  switch (r.type) {
    case RelType::top: return -r.distance.y;
    case RelType::bottom: return r.distance.y;
    case RelType::left: return -r.distance.x;
    case RelType::right: return r.distance.x;
    case RelType::center: return 0;
  }
  return 0;
}

std::string_view rel_phrase(RelType t) {
  switch (t) {
    case RelType::top: return "above";
    case RelType::bottom: return "below";
    case RelType::left: return "to the left of";
    case RelType::right: return "to the right of";
    case RelType::center: return "at the center of";
  }
  return "";
}

Slot target_slot(const std::string& id, const std::string& value, const GlyphDocument& doc) {
  return {id, SlotKind::targetId, value, nl::all_ids(doc), false};
}

bool is_color_attr(std::string_view name) {
  return name == "fill" || name == "stroke" || name.ends_with(".fill") || name.ends_with(".stroke");
}

// True for a 2-child compositor whose relation (if any) links exactly them.
bool pairwise(const CreateCompositor& o) {
  if (o.children.size() != 2 || o.relations.size() > 1) return false;
  if (o.relations.empty()) return false;
  const auto& r = o.relations.front();
  return r.source == o.children[0] && r.target == o.children[1];
}

}  // namespace

namespace nl {

std::vector<std::string> all_ids(const GlyphDocument& doc) {
  std::vector<std::string> ids;
  for (const auto& [id, c] : doc.containers) ids.push_back(id.str());
  return ids;
}

std::string random_expression(double lo, double hi) {
  return format_number(lo, 6) + " + random() * " + format_number(hi - lo, 6);
}

void rebuild(Proposal& p, const GlyphDocument& doc) {
  auto str = [&](const char* id) -> std::optional<std::string> {
    if (const Slot* s = find_slot(p, id)) return slot_string(*s);
    return std::nullopt;
  };
  auto num = [&](const char* id) -> std::optional<double> {
    if (const Slot* s = find_slot(p, id)) return slot_number(*s);
    return std::nullopt;
  };

  std::visit(
      [&](auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, CreateRepeater>) {
          if (auto v = str("newId")) o.id = ContainerId(*v);
          if (auto v = str("target")) o.target = ContainerId(*v);
          if (auto v = num("count")) o.count = static_cast<int>(std::lround(*v));
          if (Slot* a = find_slot(p, "angle")) {
            if (a->defaulted && o.count > 0) a->value = 360.0 / o.count;
            o.arrangement.delta_angle_deg = slot_number(*a);
          }
          if (Slot* s = find_slot(p, "step")) {
            const bool vertical = p.hints["axis"] == "y";
            if (s->defaulted) {
              double extent = 0;
              if (doc.find(o.target)) {
                try {
                  const BBox b = container_bbox(doc, o.target);
                  extent = vertical ? b.height() : b.width();
                } catch (const Error&) {
                }
              }
              s->value = extent;
            }
            const double d = slot_number(*s);
            o.arrangement.step = vertical ? Vec2{0, d} : Vec2{d, 0};
          }
        } else if constexpr (std::is_same_v<T, CreateCompositor>) {
          if (auto v = str("newId")) o.id = ContainerId(*v);
          if (find_slot(p, "source")) {
            const ContainerId src(*str("source")), dst(*str("target"));
            o.children = {src, dst};
            if (!o.relations.empty()) {
              auto& r = o.relations.front();
              r.source = src;
              r.target = dst;
              if (auto d = num("distance")) r.distance = relation_distance(r.type, *d);
            }
          } else {
            for (std::size_t i = 0; i < o.children.size(); ++i) {
              if (auto v = str(("child:" + std::to_string(i)).c_str())) o.children[i] = ContainerId(*v);
            }
          }
        } else if constexpr (std::is_same_v<T, ModifyParams>) {
          if (auto v = str("target")) o.target = ContainerId(*v);
          if (const Slot* value = find_slot(p, "value")) {
            const std::string attr = str("attr").value_or(o.params.empty() ? "" : o.params.begin()->first);
            o.params.clear();
            o.params[attr] = attr_value_for(attr, *value);
          } else {
            for (auto& [name, v] : o.params) {
              if (const Slot* s = find_slot(p, "value:" + name)) v = attr_value_for(name, *s);
            }
          }
        } else if constexpr (std::is_same_v<T, EncodeData>) {
          if (auto v = str("target")) o.target = ContainerId(*v);
          if (auto v = str("path")) o.path = *v;
          if (auto lo = num("lo"), hi = num("hi"); lo && hi) o.data = Expression{random_expression(*lo, *hi)};
          else if (auto v = str("values")) o.data = split_values(*v);
          else if (auto v = str("expression")) o.data = Expression{*v};
        } else if constexpr (std::is_same_v<T, CreateBasic>) {
          if (auto v = str("newId")) o.id = ContainerId(*v);
          for (auto& [name, v] : o.params) {
            if (const Slot* s = find_slot(p, "param:" + name)) v = attr_value_for(name, *s);
          }
        }
      },
      p.operation);
}

}  // namespace nl

std::vector<Slot> slots_for(const Operation& op, const GlyphDocument& doc) {
  std::vector<Slot> slots;
  auto text = [](const std::string& id, const std::string& v) { return Slot{id, SlotKind::freeString, v, {}, false}; };
  auto number = [](const std::string& id, double v) { return Slot{id, SlotKind::number, v, {}, false}; };
  auto value_slot = [&](const std::string& id, const std::string& name, const AttrValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return number(id, *d);
    if (const auto* s = std::get_if<std::string>(&v)) {
      return Slot{id, is_color_attr(name) ? SlotKind::color : SlotKind::freeString, *s, {}, false};
    }
    return text(id, to_json(v).dump());
  };
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, CreateRepeater>) {
          slots.push_back(text("newId", o.id.str()));
          slots.push_back(target_slot("target", o.target.str(), doc));
          slots.push_back(number("count", o.count));
          if (o.coord_kind == CoordKind::polar) {
            slots.push_back(number("angle", o.arrangement.delta_angle_deg.value_or(360.0 / std::max(1, o.count))));
          } else if (o.arrangement.step) {
            const Vec2 s = *o.arrangement.step;
            slots.push_back(number("step", std::abs(s.y) > std::abs(s.x) ? s.y : s.x));
          }
        } else if constexpr (std::is_same_v<T, CreateCompositor>) {
          slots.push_back(text("newId", o.id.str()));
          if (pairwise(o)) {
            slots.push_back(target_slot("source", o.children[0].str(), doc));
            slots.push_back(target_slot("target", o.children[1].str(), doc));
            if (o.relations.front().type != RelType::center) {
              slots.push_back(number("distance", relation_magnitude(o.relations.front())));
            }
          } else {
            for (std::size_t i = 0; i < o.children.size(); ++i) {
              slots.push_back(target_slot("child:" + std::to_string(i), o.children[i].str(), doc));
            }
          }
        } else if constexpr (std::is_same_v<T, ModifyParams>) {
          slots.push_back(target_slot("target", o.target.str(), doc));
          if (o.params.size() == 1) {
            slots.push_back(text("attr", o.params.begin()->first));
            slots.push_back(value_slot("value", o.params.begin()->first, o.params.begin()->second));
          } else {
            for (const auto& [name, v] : o.params) slots.push_back(value_slot("value:" + name, name, v));
          }
        } else if constexpr (std::is_same_v<T, EncodeData>) {
          slots.push_back(target_slot("target", o.target.str(), doc));
          slots.push_back(text("path", o.path));
          if (const auto* e = std::get_if<Expression>(&o.data)) slots.push_back(text("expression", e->text));
          else slots.push_back(text("values", join_values(std::get<ValueList>(o.data))));
        } else if constexpr (std::is_same_v<T, CreateBasic>) {
          slots.push_back(text("newId", o.id.str()));
          for (const auto& [name, v] : o.params) slots.push_back(value_slot("param:" + name, name, v));
        }
      },
      op);
  return slots;
}

std::string explain(const Operation& op) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, CreateRepeater>) {
          if (o.coord_kind == CoordKind::polar) {
            return "Repeat {{target}} {{count}} times around a center, every {{angle}} degrees.";
          }
          if (o.arrangement.step) {
            const Vec2 s = *o.arrangement.step;
            return std::string("Repeat {{target}} {{count}} times ") +
                   (std::abs(s.y) > std::abs(s.x) ? "vertically" : "horizontally") + ", {{step}} units apart.";
          }
          return "Repeat {{target}} {{count}} times.";
        } else if constexpr (std::is_same_v<T, CreateCompositor>) {
          if (pairwise(o)) {
            const auto t = o.relations.front().type;
            if (t == RelType::center) return "Center {{source}} on {{target}}.";
            return "Place {{source}} {{distance}} units " + std::string(rel_phrase(t)) + " {{target}}.";
          }
          std::string s = "Group ";
          for (std::size_t i = 0; i < o.children.size(); ++i) {
            if (i) s += ", ";
            s += "{{child:" + std::to_string(i) + "}}";
          }
          return s + " into {{newId}}.";
        } else if constexpr (std::is_same_v<T, ModifyParams>) {
          if (o.params.size() == 1) return "Set {{attr}} of {{target}} to {{value}}.";
          std::string s = "Set ";
          bool first = true;
          for (const auto& [name, v] : o.params) {
            if (!first) s += ", ";
            first = false;
            s += name + " to {{value:" + name + "}}";
          }
          return s + " on {{target}}.";
        } else if constexpr (std::is_same_v<T, EncodeData>) {
          if (const auto* e = std::get_if<Expression>(&o.data)) {
            return "Bind {{path}} of {{target}} to the expression \"" + e->text + "\".";
          }
          return "Bind {{path}} of {{target}} to the values {{values}}.";
        } else {
          return "Create a " + std::string(to_string(o.kind)) + " named {{newId}}.";
        }
      },
      op);
}

Suggestion default_suggestion() {
  return {"I can only build glyphs with the five editing operations. Try 'replicate the shape five times' instead.",
          {"replicate the shape five times", "rotate and copy the petal 12 times",
           "place the circle 10 units above the rectangle", "change the circle's fill to blue",
           "randomize petal sizes between 1 and 1.5"}};
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  static const std::regex boundary(R"([.!?]+(\s+|$))");
  auto push = [&](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return;
    const auto b = s.find_last_not_of(" \t\r\n");
    out.push_back(s.substr(a, b - a + 1));
  };
  std::size_t pos = 0;
  for (std::sregex_iterator it(text.begin(), text.end(), boundary), end; it != end; ++it) {
    push(text.substr(pos, static_cast<std::size_t>(it->position()) - pos));
    pos = static_cast<std::size_t>(it->position() + it->length());
  }
  if (pos < text.size()) push(text.substr(pos));
  return out;
}

namespace {

ParseResult suggestion() {
  ParseResult r;
  r.suggestion = default_suggestion();
  return r;
}

// Backend output: a ParseResult or {"operation": ..., "explanation"?}. The
// operation must apply cleanly to the document.
std::optional<Proposal> validate_backend(const Json& j, const GlyphDocument& doc) {
  try {
    if (!j.is_object()) return std::nullopt;
    const Json* op_json = nullptr;
    if (j.contains("proposal") && j["proposal"].is_object()) op_json = j["proposal"].contains("operation") ? &j["proposal"]["operation"] : nullptr;
    else if (j.contains("operation")) op_json = &j["operation"];
    if (!op_json) return std::nullopt;
    Proposal p;
    p.operation = operation_from_json(*op_json, "/operation");
    (void)gdsl::apply(doc, p.operation);
    p.slots = slots_for(p.operation, doc);
    p.explanation = explain(p.operation);
    return p;
  } catch (const Error&) {
    return std::nullopt;
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

ParseResult parse_command(const std::string& text, const GlyphDocument& doc,
                          const std::optional<ContainerId>& selection, LlmBackend* backend) {
  const auto sentences = split_sentences(text);
  const std::string sentence = sentences.empty() ? std::string() : sentences.front();
  if (!sentence.empty()) {
    if (auto p = nl::grammar_parse(sentence, doc, selection)) {
      ParseResult r;
      r.proposal = std::move(*p);
      return r;
    }
  }
  if (backend && !sentence.empty()) {
    std::optional<Json> answer;
    try {
      answer = backend->translate(sentence, summarize_document(doc));
    } catch (const std::exception&) {
      answer.reset();
    }
    if (answer) {
      if (auto p = validate_backend(*answer, doc)) {
        ParseResult r;
        r.proposal = std::move(*p);
        return r;
      }
    }
  }
  return suggestion();
}

std::vector<ParseResult> parse_commands(const std::string& text, const GlyphDocument& doc,
                                        const std::optional<ContainerId>& selection, LlmBackend* backend) {
  std::vector<ParseResult> out;
  for (const auto& s : split_sentences(text)) out.push_back(parse_command(s, doc, selection, backend));
  if (out.empty()) out.push_back(suggestion());
  return out;
}

ParseResult fill_slot(const ParseResult& result, const std::string& slot_id, const Scalar& value,
                      const GlyphDocument& doc) {
  if (!result.proposal) throw Error(ErrorCode::NotAProposal, "only proposals have slots");
  ParseResult out = result;
  Proposal& p = *out.proposal;
  Slot* s = find_slot(p, slot_id);
  if (!s) throw Error(ErrorCode::UnknownSlot, "no slot '" + slot_id + "'", slot_id);

  switch (s->kind) {
    case SlotKind::targetId: {
      const auto* id = std::get_if<std::string>(&value);
      if (!id) throw Error(ErrorCode::TypeMismatch, "slot '" + slot_id + "' expects a container id", slot_id);
      if (!doc.find(ContainerId(*id))) {
        throw Error(ErrorCode::InvalidTarget, "no container '" + *id + "' in the document", slot_id);
      }
      s->value = *id;
      break;
    }
    case SlotKind::number: {
      std::optional<double> v;
      if (const auto* d = std::get_if<double>(&value)) v = *d;
      else v = numeric(std::get<std::string>(value));
      if (!v || !std::isfinite(*v)) throw Error(ErrorCode::TypeMismatch, "slot '" + slot_id + "' expects a number", slot_id);
      if (slot_id == "count" && (*v < 1 || *v != std::floor(*v))) {
        throw Error(ErrorCode::TypeMismatch, "count must be a positive integer", slot_id);
      }
      s->value = *v;
      break;
    }
    case SlotKind::color: {
      const auto* str = std::get_if<std::string>(&value);
      auto c = str ? normalize_color(*str) : std::nullopt;
      if (!c) throw Error(ErrorCode::TypeMismatch, "slot '" + slot_id + "' expects a color", slot_id);
      s->value = *c;
      break;
    }
    case SlotKind::freeString:
      if (const auto* d = std::get_if<double>(&value)) s->value = format_number(*d, 6);
      else s->value = std::get<std::string>(value);
      break;
  }
  s->defaulted = false;
  nl::rebuild(p, doc);
  return out;
}

std::string summarize_document(const GlyphDocument& doc) {
  if (doc.containers.empty()) return "(empty)";
  std::string out;
  for (const auto& [id, c] : doc.containers) {
    std::string line = id.str() + ": " + std::string(kind_name(c));
    if (const auto* b = std::get_if<BasicBody>(&c.body)) {
      line += " " + std::string(to_string(b->primitive.kind));
      std::string attrs;
      for (const auto& [k, v] : b->primitive.attrs) {
        if (!attrs.empty()) attrs += ", ";
        if (const auto* d = std::get_if<double>(&v)) attrs += k + "=" + format_number(*d, 6);
        else if (const auto* s = std::get_if<std::string>(&v)) attrs += k + "=" + *s;
        else attrs += k + "=[" + std::to_string(std::get<Points>(v).size()) + " points]";
      }
      line += " (" + attrs + ")";
    } else if (const auto* r = std::get_if<RepeaterBody>(&c.body)) {
      line += " " + std::string(to_string(c.coord.kind)) + " x" + std::to_string(r->count) + " " +
              std::string(to_string(r->arrangement.mode)) + " of " + r->child.str();
    } else {
      const auto& comp = std::get<CompositorBody>(c.body);
      line += " of [";
      for (std::size_t i = 0; i < comp.children.size(); ++i) line += (i ? ", " : "") + comp.children[i].str();
      line += "]";
      if (!comp.relations.empty()) line += " with " + std::to_string(comp.relations.size()) + " relation(s)";
    }
    if (!c.bindings.empty()) line += ", " + std::to_string(c.bindings.size()) + " binding(s)";
    if (doc.root && *doc.root == id) line += " [root]";
    out += line + "\n";
  }
  return out;
}

Json to_json(const Slot& s) {
  Json j = {{"slotId", s.id}, {"kind", std::string(to_string(s.kind))}, {"value", to_json(s.value)},
            {"defaulted", s.defaulted}};
  if (!s.choices.empty()) j["choices"] = s.choices;
  return j;
}

Json to_json(const ParseResult& r) {
  if (r.proposal) {
    Json slots = Json::array();
    for (const auto& s : r.proposal->slots) slots.push_back(to_json(s));
    Json p = {{"operation", to_json(r.proposal->operation)},
              {"slots", slots},
              {"explanation", r.proposal->explanation},
              {"hints", r.proposal->hints}};
    return {{"outcome", "proposal"}, {"proposal", p}};
  }
  const Suggestion s = r.suggestion.value_or(default_suggestion());
  return {{"outcome", "suggestion"}, {"suggestion", {{"message", s.message}, {"exampleCommands", s.example_commands}}}};
}

ParseResult parse_result_from_json(const Json& j) {
  object(j, "");
  const std::string outcome = string(required(j, "outcome", ""), "/outcome");
  ParseResult r;
  if (outcome == "suggestion") {
    const Json& s = object(required(j, "suggestion", ""), "/suggestion");
    Suggestion sg;
    sg.message = string(required(s, "message", "/suggestion"), "/suggestion/message");
    if (auto* ex = optional(s, "exampleCommands")) {
      if (!ex->is_array()) fail("/suggestion/exampleCommands", "expected an array");
      for (std::size_t i = 0; i < ex->size(); ++i) {
        sg.example_commands.push_back(string((*ex)[i], "/suggestion/exampleCommands/" + std::to_string(i)));
      }
    }
    r.suggestion = sg;
    return r;
  }
  if (outcome != "proposal") fail("/outcome", "expected \"proposal\" or \"suggestion\"");
  const Json& pj = object(required(j, "proposal", ""), "/proposal");
  Proposal p;
  p.operation = operation_from_json(required(pj, "operation", "/proposal"), "/proposal/operation");
  if (auto* e = optional(pj, "explanation")) p.explanation = string(*e, "/proposal/explanation");
  if (auto* h = optional(pj, "hints")) {
    object(*h, "/proposal/hints");
    for (auto it = h->begin(); it != h->end(); ++it) p.hints[it.key()] = string(*it, "/proposal/hints/" + it.key());
  }
  if (auto* sl = optional(pj, "slots")) {
    if (!sl->is_array()) fail("/proposal/slots", "expected an array");
    for (std::size_t i = 0; i < sl->size(); ++i) {
      const std::string ptr = "/proposal/slots/" + std::to_string(i);
      const Json& sj = object((*sl)[i], ptr);
      Slot s;
      s.id = string(required(sj, "slotId", ptr), ptr + "/slotId");
      const std::string kind = string(required(sj, "kind", ptr), ptr + "/kind");
      auto k = parse_slot_kind(kind);
      if (!k) fail(ptr + "/kind", "unknown slot kind '" + kind + "'");
      s.kind = *k;
      s.value = scalar_from_json(required(sj, "value", ptr), ptr + "/value");
      if (auto* d = optional(sj, "defaulted")) {
        if (!d->is_boolean()) fail(ptr + "/defaulted", "expected a boolean");
        s.defaulted = d->get<bool>();
      }
      if (auto* c = optional(sj, "choices")) {
        if (!c->is_array()) fail(ptr + "/choices", "expected an array");
        for (std::size_t n = 0; n < c->size(); ++n) s.choices.push_back(string((*c)[n], ptr + "/choices/" + std::to_string(n)));
      }
      p.slots.push_back(std::move(s));
    }
  }
  r.proposal = std::move(p);
  return r;
}

}  // namespace gdsl
