#pragma once

#include <string>

namespace graspsim {

// Fixed-point rendering with up to 10 decimals, trailing zeros trimmed and
// no exponent, e.g. 6000, 12.5, -0.0000000001. Used for G-code words.
std::string format_number(double value);

// Shortest decimal that parses back to the identical double.
std::string format_exact(double value);

}  // namespace graspsim
