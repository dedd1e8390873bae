#pragma once

// Batch entry points. Exit codes: 0 success, 1 invalid input or failed
// operation, 2 I/O or usage error, 3 (parse-nl) the text gave a suggestion.

#include <ostream>
#include <string>
#include <vector>

namespace gdsl {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gdsl
