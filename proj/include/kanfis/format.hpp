#pragma once

#include <string>

namespace kanfis {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Fixed-point text with `digits` decimals; never prints "-0.0000".
std::string format_fixed(double v, int digits);

}  // namespace kanfis
