#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdsl/nlcmd.hpp"

namespace gdsl::nl {

// Regenerates `p.operation` from its slots and hints (filling defaulted
// slots on the way).
void rebuild(Proposal& p, const GlyphDocument& doc);

std::vector<std::string> all_ids(const GlyphDocument& doc);

std::optional<Proposal> grammar_parse(const std::string& sentence, const GlyphDocument& doc,
                                      const std::optional<ContainerId>& selection);

// `start + random() * (hi - lo)` with canonical numbers.
std::string random_expression(double lo, double hi);

}  // namespace gdsl::nl
