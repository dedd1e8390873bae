#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gdsl {

enum class ErrorCode {
  DuplicateId,
  UnknownTarget,
  UnknownChild,
  UnknownPath,
  PathKindMismatch,
  TypeMismatch,
  BadPrimitiveParams,
  BadValue,
  WouldCreateCycle,
  ReparentConflict,
  RelationOutsideChildren,
  RelationCycle,
  DuplicateChild,
  EmptyChildren,
  EmptyData,
  BadExpression,
  BadScale,
  SyntaxError,
  UnknownIdentifier,
  DivisionByZero,
  NonFiniteResult,
  DegenerateScale,
  EmptyGeometry,
  DegenerateShape,
  MissingPrevBBox,
  UnsupportedArrangement,
  OverConstrained,
  MalformedInput,
  SchemaViolation,
  ReplayDivergence,
  UnsupportedElement,
  EmptyInput,
  UnknownSlot,
  InvalidTarget,
  NotAProposal,
  InvalidDocument,
  NonFinite,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure the engine reports. `field` names the offending input
// (attribute path, op field, JSON pointer) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {},
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  const std::optional<std::size_t>& index() const noexcept { return index_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string field_;
  std::optional<std::size_t> index_;
  std::string detail_;
};

}  // namespace gdsl
