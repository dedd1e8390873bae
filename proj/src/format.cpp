#include "gdsl/format.hpp"

#include <cfenv>
#include <cmath>
#include <cstdio>

#include "gdsl/error.hpp"

namespace gdsl {

std::string format_number(double x, int decimals) {
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "cannot format a non-finite number");
  if (decimals < 0) decimals = 0;

  // Round on the scaled value so ties go to even, then print the integer
  // digits back with the decimal point reinserted.
  const double scale = std::pow(10.0, decimals);
  const double scaled = x * scale;
  double rounded;
  if (std::abs(scaled) < 9.0e15) {
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    rounded = std::nearbyint(scaled);
    std::fesetround(saved);
  } else {
    rounded = scaled;  // beyond exact integer range; printf handles it
  }

  char buf[64];
  std::string out;
  if (std::abs(scaled) < 9.0e15) {
    std::snprintf(buf, sizeof buf, "%.0f", std::abs(rounded));
    std::string digits = buf;
    if (decimals > 0) {
      if (digits.size() <= static_cast<std::size_t>(decimals)) {
        digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
      }
      digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
    }
    out = (rounded < 0 ? "-" : "") + digits;
  } else {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    out = buf;
  }

  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "-0") out = "0";
  return out;
}

}  // namespace gdsl
