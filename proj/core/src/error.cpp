#include "relsha/error.hpp"

namespace relsha {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::not_found: return "not-found";
    case Errc::duplicate_name: return "duplicate-name";
    case Errc::invalid_value: return "invalid-value";
    case Errc::parse_error: return "parse-error";
    case Errc::empty_selection: return "empty-selection";
    case Errc::undefined_metric: return "undefined-metric";
    case Errc::alignment_error: return "alignment-error";
    case Errc::missing_prior: return "missing-prior";
    case Errc::invalid_nodal_factor: return "invalid-nodal-factor";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace relsha
