#pragma once

#include <string>

namespace gdsl {

// Fixed precision with round-half-even, trailing zeros and dot trimmed, and
// "-0" collapsed to "0". Throws NonFinite for NaN/inf.
std::string format_number(double x, int decimals);

}  // namespace gdsl
