#pragma once

// Canonical JSON form of documents and of their building blocks. Canonical
// means sorted keys, two-space indentation, numbers rounded to 6 fractional
// digits with integral values printed without a fraction.

#include <string>
#include <string_view>

#include <json.hpp>

#include "gdsl/model.hpp"

namespace gdsl {

using Json = nlohmann::json;

// Rounds to 6 decimals; integral results become JSON integers.
Json canonical_number(double x);

// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& j);

// Parses bytes; throws MalformedInput with the byte offset as index.
Json parse_json(std::string_view bytes);

Json to_json(const GlyphDocument& doc);
Json to_json(const Container& c);  // without the id
Json to_json(const Primitive& p);
Json to_json(const CoordinateSystem& c);
Json to_json(const Transform& t);
Json to_json(const SpatialRelation& r);
Json to_json(const DataBinding& b);
Json to_json(const DataSource& s);
Json to_json(const LinearScale& s);
Json to_json(const Scalar& s);
Json to_json(const AttrValue& v);
Json to_json(Vec2 v);

// Readers throw SchemaViolation with a JSON pointer in `field`. `ptr` is the
// pointer of `j` itself, used as the prefix of error locations.
GlyphDocument document_from_json(const Json& j);
// Containers are keyed by id in the document, so the id is not in `j`.
Container container_from_json(const ContainerId& id, const Json& j, const std::string& ptr);
Primitive primitive_from_json(const Json& j, const std::string& ptr);
CoordinateSystem coord_from_json(const Json& j, const std::string& ptr);
Transform transform_from_json(const Json& j, const std::string& ptr);
SpatialRelation relation_from_json(const Json& j, const std::string& ptr);
DataSource source_from_json(const Json& j, const std::string& ptr);
LinearScale scale_from_json(const Json& j, const std::string& ptr);
Scalar scalar_from_json(const Json& j, const std::string& ptr);
AttrValue attr_value_from_json(const Json& j, const std::string& ptr);
Vec2 vec2_from_json(const Json& j, const std::string& ptr);

// Small typed accessors shared by the other JSON readers.
namespace json_read {
const Json& object(const Json& j, const std::string& ptr);
const Json* optional(const Json& obj, const char* key);
const Json& required(const Json& obj, const char* key, const std::string& ptr);
double number(const Json& j, const std::string& ptr);
std::string string(const Json& j, const std::string& ptr);
std::int64_t integer(const Json& j, const std::string& ptr);
[[noreturn]] void fail(const std::string& ptr, const std::string& msg);
}  // namespace json_read

std::string serialize(const GlyphDocument& doc);
GlyphDocument deserialize(std::string_view bytes);

// deserialize + validate_document; throws InvalidDocument naming the first
// violation.
GlyphDocument load_document(std::string_view bytes);

}  // namespace gdsl
