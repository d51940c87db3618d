#pragma once

#include <string>

namespace relsha {

/// Fixed-width numeric rendering used by every writer: 9 significant digits.
std::string format_number(double value);

/// Full round-trip precision (17 significant digits).
std::string format_exact(double value);

}  // namespace relsha
