#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relsha {

enum class Errc {
  insufficient_data,
  dimension_mismatch,
  not_found,
  duplicate_name,
  invalid_value,
  parse_error,
  empty_selection,
  undefined_metric,
  alignment_error,
  missing_prior,
  invalid_nodal_factor,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (and the grid runner) can classify it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace relsha
