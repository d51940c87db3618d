#include "relsha/constituents.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "relsha/angles.hpp"
#include "relsha/error.hpp"
#include "relsha/format.hpp"
#include "text.hpp"

namespace relsha {

double Constituent::period_hours() const { return kTwoPi / speed; }

ConstituentCatalog::ConstituentCatalog(std::vector<Constituent> constituents)
    : constituents_(std::move(constituents)) {
  index_.reserve(constituents_.size());
  for (std::size_t k = 0; k < constituents_.size(); ++k) {
    auto& c = constituents_[k];
    if (c.name.empty()) throw Error(Errc::invalid_value, "constituent " + std::to_string(k) + " has an empty name");
    if (!(c.speed > 0.0) || !std::isfinite(c.speed))
      throw Error(Errc::invalid_value, "constituent " + c.name + ": speed must be positive");
    if (!(c.nodal_factor > 0.0) || !std::isfinite(c.nodal_factor))
      throw Error(Errc::invalid_nodal_factor, "constituent " + c.name + ": nodal factor must be positive");
    if (!std::isfinite(c.nodal_angle))
      throw Error(Errc::invalid_value, "constituent " + c.name + ": nodal angle must be finite");
    c.nodal_angle = wrap_two_pi(c.nodal_angle);
    if (!index_.emplace(c.name, k).second)
      throw Error(Errc::duplicate_name, "duplicate constituent name " + c.name);
  }
}

std::optional<std::size_t> ConstituentCatalog::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool ConstituentCatalog::has_unit_nodal_corrections() const noexcept {
  for (const auto& c : constituents_)
    if (c.nodal_factor != 1.0 || c.nodal_angle != 0.0) return false;
  return true;
}

ConstituentCatalog parse_catalog(std::istream& in) {
  std::vector<Constituent> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto fields = detail::split_fields(line);
    const auto where = "catalog line " + std::to_string(line_no) + ": ";
    if (fields.size() < 2 || fields.size() > 4)
      throw Error(Errc::parse_error, where + "expected `name, speed[, f, u]`");
    const auto speed = detail::parse_double(fields[1]);
    if (!speed) {
      if (first_data_row) {  // header
        first_data_row = false;
        continue;
      }
      throw Error(Errc::parse_error, where + "speed is not a number");
    }
    first_data_row = false;
    if (fields[0].empty()) throw Error(Errc::parse_error, where + "empty constituent name");
    if (!(*speed > 0.0)) throw Error(Errc::invalid_value, where + "speed must be positive");

    Constituent c;
    c.name = std::string(fields[0]);
    c.speed = deg_to_rad(*speed);
    if (fields.size() >= 3 && !fields[2].empty()) {
      const auto f = detail::parse_double(fields[2]);
      if (!f) throw Error(Errc::parse_error, where + "nodal factor is not a number");
      if (!(*f > 0.0)) throw Error(Errc::invalid_nodal_factor, where + "nodal factor must be positive");
      c.nodal_factor = *f;
    }
    if (fields.size() == 4 && !fields[3].empty()) {
      const auto u = detail::parse_double(fields[3]);
      if (!u) throw Error(Errc::parse_error, where + "nodal angle is not a number");
      c.nodal_angle = deg_to_rad(*u);
    }
    rows.push_back(std::move(c));
  }
  return ConstituentCatalog(std::move(rows));
}

ConstituentCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open catalog " + path.string());
  return parse_catalog(in);
}

void write_catalog(std::ostream& out, const ConstituentCatalog& catalog) {
  out << "# name, speed_deg_per_hour, f, u_deg\n";
  for (const auto& c : catalog) {
    out << c.name << ',' << format_exact(rad_to_deg(c.speed)) << ',' << format_exact(c.nodal_factor) << ','
        << format_exact(rad_to_deg(c.nodal_angle)) << '\n';
  }
}

}  // namespace relsha
