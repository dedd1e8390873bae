#pragma once

// Natural-language commands to operation proposals with editable slots.

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gdsl/model.hpp"
#include "gdsl/ops.hpp"

namespace gdsl {

enum class SlotKind { targetId, number, color, freeString };
std::string_view to_string(SlotKind k);

struct Slot {
  std::string id;
  SlotKind kind = SlotKind::freeString;
  Scalar value;
  std::vector<std::string> choices;  // targetId: every id in the document
  bool defaulted = false;            // value came from a rule, not the text
  friend bool operator==(const Slot&, const Slot&) = default;
};

struct Proposal {
  Operation operation;
  std::vector<Slot> slots;
  std::string explanation;  // with {{slotId}} markers
  // Rebuild context, e.g. {"axis", "y"} for a vertical duplication.
  std::map<std::string, std::string> hints;
  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct Suggestion {
  std::string message;
  std::vector<std::string> example_commands;
  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct ParseResult {
  std::optional<Proposal> proposal;  // exactly one of proposal / suggestion
  std::optional<Suggestion> suggestion;
  bool is_proposal() const { return proposal.has_value(); }
  friend bool operator==(const ParseResult&, const ParseResult&) = default;
};

// Optional fallback when the grammar does not match. Implementations return
// raw JSON; it is validated before use and anything invalid becomes a
// suggestion.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string name() const = 0;
  // nullopt when the backend has no answer (or timed out).
  virtual std::optional<Json> translate(const std::string& text, const std::string& document_summary) = 0;
};

// Answers from a JSON object mapping command text to a response.
class MockBackend : public LlmBackend {
 public:
  MockBackend() = default;
  explicit MockBackend(Json responses) : responses_(std::move(responses)) {}
  static MockBackend from_file(const std::string& path);  // throws Io / MalformedInput
  std::string name() const override { return "mock"; }
  std::optional<Json> translate(const std::string& text, const std::string& document_summary) override;

 private:
  Json responses_ = Json::object();
};

// POSTs {"model", "text", "document"} to an http:// endpoint with a bearer
// credential and expects a ParseResult or {"operation": ...} back.
class HttpLlmBackend : public LlmBackend {
 public:
  struct Config {
    std::string endpoint;
    std::string api_key;
    std::string model;
    std::chrono::milliseconds timeout{10000};
  };
  explicit HttpLlmBackend(Config cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "http"; }
  std::optional<Json> translate(const std::string& text, const std::string& document_summary) override;

 private:
  Config cfg_;
};

// GDSL_LLM_BACKEND = mock (default) | http | none. The mock reads
// GDSL_LLM_MOCK_FILE when set; http uses GDSL_LLM_ENDPOINT, GDSL_LLM_API_KEY,
// GDSL_LLM_MODEL and GDSL_LLM_TIMEOUT_MS. Returns null for none.
std::unique_ptr<LlmBackend> backend_from_env();

// Grammar first, then the backend, then a suggestion. Deterministic for a
// given backend. A text with several sentences is handled by parse_commands.
ParseResult parse_command(const std::string& text, const GlyphDocument& doc,
                          const std::optional<ContainerId>& selection = std::nullopt,
                          LlmBackend* backend = nullptr);

// Splits on sentence boundaries and parses each sentence in order.
std::vector<ParseResult> parse_commands(const std::string& text, const GlyphDocument& doc,
                                        const std::optional<ContainerId>& selection = std::nullopt,
                                        LlmBackend* backend = nullptr);

std::vector<std::string> split_sentences(const std::string& text);

// Substitutes one slot and rebuilds the operation. Numbers accept numeric
// strings, colors are normalized. Throws NotAProposal, UnknownSlot,
// TypeMismatch and InvalidTarget.
ParseResult fill_slot(const ParseResult& result, const std::string& slot_id, const Scalar& value,
                      const GlyphDocument& doc);

std::string summarize_document(const GlyphDocument& doc);

// Template sentence for any operation, using the slot ids proposals use.
std::string explain(const Operation& op);

// Slots exposing the parameters of an operation (used for backend output).
std::vector<Slot> slots_for(const Operation& op, const GlyphDocument& doc);

// The message and examples given when nothing matches.
Suggestion default_suggestion();

Json to_json(const ParseResult& r);
Json to_json(const Slot& s);
// Throws SchemaViolation.
ParseResult parse_result_from_json(const Json& j);

}  // namespace gdsl
