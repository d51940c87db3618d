#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace relsha {

/// One tidal constituent. Speeds are angular frequencies in rad/hour and the
/// nodal angle is in radians; degrees only appear at file boundaries.
struct Constituent {
  std::string name;
  double speed = 0.0;         // omega_k, rad/h
  double nodal_factor = 1.0;  // f_k
  double nodal_angle = 0.0;   // u_k, rad in [0, 2pi)

  [[nodiscard]] double period_hours() const;
};

/// Ordered, immutable set of constituents. The order defines the layout of
/// every amplitude, phase and state vector in the library.
class ConstituentCatalog {
 public:
  ConstituentCatalog() = default;

  // Validates names (unique, non-empty), speeds (> 0) and nodal factors
  // (> 0); wraps nodal angles. Throws relsha::Error.
  explicit ConstituentCatalog(std::vector<Constituent> constituents);

  [[nodiscard]] std::size_t size() const noexcept { return constituents_.size(); }
  [[nodiscard]] bool empty() const noexcept { return constituents_.empty(); }
  [[nodiscard]] const Constituent& operator[](std::size_t k) const { return constituents_[k]; }
  [[nodiscard]] const std::vector<Constituent>& constituents() const noexcept { return constituents_; }

  [[nodiscard]] auto begin() const noexcept { return constituents_.begin(); }
  [[nodiscard]] auto end() const noexcept { return constituents_.end(); }

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;

  // True when every constituent has f = 1 and u = 0.
  [[nodiscard]] bool has_unit_nodal_corrections() const noexcept;

 private:
  std::vector<Constituent> constituents_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Number of constituents in the standard catalog shipped in data/noaa37.csv.
inline constexpr std::size_t kStandardConstituentCount = 37;

// Rows: `name, speed_deg_per_hour[, f, u_deg]`. Blank lines, `#` comments and
// an optional header row whose second field is not numeric are skipped.
ConstituentCatalog parse_catalog(std::istream& in);
ConstituentCatalog load_catalog(const std::filesystem::path& path);

// Writes the catalog in the same format with 17 significant digits, so a
// reload reproduces the stored speeds.
void write_catalog(std::ostream& out, const ConstituentCatalog& catalog);

}  // namespace relsha
