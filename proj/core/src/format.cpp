#include "relsha/format.hpp"

#include <cmath>
#include <cstdio>

namespace relsha {

namespace {

std::string render(const char* fmt, double value) {
  char buf[64];
  // -0 prints as "-0"; normalise so byte-identical output does not depend on
  // the sign of a zero produced by cancellation.
  if (value == 0.0) value = 0.0;
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

}  // namespace

std::string format_number(double value) { return render("%.9g", value); }

std::string format_exact(double value) { return render("%.17g", value); }

}  // namespace relsha
