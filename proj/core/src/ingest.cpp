#include "relsha/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "relsha/angles.hpp"
#include "relsha/error.hpp"
#include "relsha/format.hpp"
#include "text.hpp"

namespace relsha {

namespace {

using std::chrono::milliseconds;

[[noreturn]] void bad_timestamp(std::string_view text, const std::string& why) {
  throw Error(Errc::parse_error, "invalid timestamp '" + std::string(text) + "': " + why);
}

// Reads exactly `digits` decimal digits at `pos`.
int read_digits(std::string_view s, std::size_t& pos, std::size_t digits, std::string_view whole) {
  if (pos + digits > s.size()) bad_timestamp(whole, "truncated");
  int value = 0;
  for (std::size_t i = 0; i < digits; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') bad_timestamp(whole, "expected a digit");
    value = value * 10 + (c - '0');
  }
  pos += digits;
  return value;
}

void expect(std::string_view s, std::size_t& pos, char c, std::string_view whole) {
  if (pos >= s.size() || s[pos] != c) bad_timestamp(whole, std::string("expected '") + c + "'");
  ++pos;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return in;
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

// A height field that is present but unusable is dropped; anything else that
// fails to parse is an error.
bool is_missing_value(std::string_view field) {
  if (field.empty()) return true;
  std::string lower(field);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "nan" || lower == "na" || lower == "null" || lower == "inf" || lower == "-inf";
}

struct RawRow {
  Timestamp time;
  double value;
};

// First non-comment line must be a header (its first field is not a timestamp).
template <typename RowHandler>
void read_table(std::istream& in, std::size_t columns, const char* what, RowHandler&& handle) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto fields = detail::split_fields(line);
    if (!header_seen) {
      bool looks_like_data = false;
      try {
        const auto probe = columns == 2 ? fields[0] : (fields.size() > 1 ? fields[1] : fields[0]);
        parse_timestamp(probe);
        looks_like_data = true;
      } catch (const Error&) {
      }
      if (fields.size() != columns || looks_like_data)
        throw Error(Errc::parse_error, std::string(what) + " " + at_line(line_no) + "unparseable header");
      header_seen = true;
      continue;
    }
    if (fields.size() != columns)
      throw Error(Errc::parse_error, std::string(what) + " " + at_line(line_no) + "expected " +
                                         std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    handle(fields, line_no);
  }
  if (!header_seen) throw Error(Errc::parse_error, std::string(what) + ": missing header");
}

double parse_height(std::string_view field, std::size_t line_no, const char* what, bool& missing) {
  missing = false;
  if (is_missing_value(field)) {
    missing = true;
    return 0.0;
  }
  const auto v = detail::parse_double(field);
  if (!v) throw Error(Errc::parse_error, std::string(what) + " " + at_line(line_no) + "height is not a number");
  if (!std::isfinite(*v)) missing = true;
  return *v;
}

Timestamp parse_timestamp_at(std::string_view field, std::size_t line_no, const char* what) {
  try {
    return parse_timestamp(field);
  } catch (const Error& e) {
    throw Error(Errc::parse_error, std::string(what) + " " + at_line(line_no) + e.what());
  }
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

Timestamp parse_timestamp(std::string_view raw) {
  const auto s = detail::trim(raw);
  std::size_t pos = 0;
  const int year = read_digits(s, pos, 4, raw);
  expect(s, pos, '-', raw);
  const int month = read_digits(s, pos, 2, raw);
  expect(s, pos, '-', raw);
  const int day = read_digits(s, pos, 2, raw);
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' ')) bad_timestamp(raw, "expected date/time separator");
  ++pos;
  const int hour = read_digits(s, pos, 2, raw);
  expect(s, pos, ':', raw);
  const int minute = read_digits(s, pos, 2, raw);
  int second = 0;
  long long millis = 0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    second = read_digits(s, pos, 2, raw);
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      long long scale = 100;
      std::size_t digits = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        if (digits < 3) millis += (s[pos] - '0') * scale;
        scale /= 10;
        ++digits;
        ++pos;
      }
      if (digits == 0) bad_timestamp(raw, "empty fractional seconds");
    }
  }
  long long offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '+' ? 1 : -1;
      ++pos;
      const int oh = read_digits(s, pos, 2, raw);
      if (pos < s.size() && s[pos] == ':') ++pos;
      const int om = read_digits(s, pos, 2, raw);
      offset_minutes = sign * (oh * 60 + om);
    }
  }
  if (pos != s.size()) bad_timestamp(raw, "trailing characters");

  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) bad_timestamp(raw, "no such date");
  if (hour > 23 || minute > 59 || second > 60) bad_timestamp(raw, "time of day out of range");

  const std::chrono::sys_days days{ymd};
  return Timestamp{days} + std::chrono::hours{hour} + std::chrono::minutes{minute - offset_minutes} +
         std::chrono::seconds{second} + milliseconds{millis};
}

std::string format_timestamp(Timestamp t) {
  const auto days = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{days};
  auto rest = t - days;
  const auto h = std::chrono::duration_cast<std::chrono::hours>(rest);
  rest -= h;
  const auto m = std::chrono::duration_cast<std::chrono::minutes>(rest);
  rest -= m;
  const auto sec = std::chrono::duration_cast<std::chrono::seconds>(rest);
  rest -= sec;
  const auto ms = rest.count();

  char buf[48];
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<int>(sec.count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<int>(sec.count()), static_cast<int>(ms));
  }
  return buf;
}

double hours_between(Timestamp from, Timestamp to) noexcept {
  return static_cast<double>((to - from).count()) / 3'600'000.0;
}

Timestamp add_hours(Timestamp t, double hours) noexcept {
  return t + milliseconds{std::llround(hours * 3'600'000.0)};
}

WaterLevelSeries parse_water_levels(std::istream& in, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::vector<RawRow> rows;
  read_table(in, 2, "water levels", [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    ++rep.rows;
    const Timestamp t = parse_timestamp_at(f[0], line_no, "water levels");
    bool missing = false;
    const double h = parse_height(f[1], line_no, "water levels", missing);
    if (missing) {
      rep.warnings.push_back("water levels " + at_line(line_no) + "missing height, row dropped");
      return;
    }
    rows.push_back({t, h});
  });

  std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) { return a.time < b.time; });
  std::vector<RawRow> unique;
  unique.reserve(rows.size());
  for (const auto& r : rows) {
    if (!unique.empty() && unique.back().time == r.time) {
      rep.warnings.push_back("water levels: duplicate timestamp " + format_timestamp(r.time) + " dropped");
      continue;
    }
    unique.push_back(r);
  }
  if (unique.empty()) throw Error(Errc::insufficient_data, "water levels: no valid rows");

  const Timestamp epoch = unique.front().time;
  std::vector<double> times;
  std::vector<double> heights;
  times.reserve(unique.size());
  heights.reserve(unique.size());
  for (const auto& r : unique) {
    times.push_back(hours_between(epoch, r.time));
    heights.push_back(r.value);
  }
  rep.kept = times.size();
  return {std::move(times), std::move(heights), epoch};
}

WaterLevelSeries load_water_levels(const std::filesystem::path& path, LoadReport* report) {
  auto in = open_input(path);
  return parse_water_levels(in, report);
}

void write_water_levels(std::ostream& out, const WaterLevelSeries& series) {
  out << "timestamp,height_m\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_timestamp(add_hours(series.epoch(), series.times()[i])) << ','
        << format_number(series.heights()[i]) << '\n';
}

AltimetrySeries parse_altimetry(std::istream& in, std::string pass_id, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  AltimetrySeries out;
  out.pass_id = std::move(pass_id);
  read_table(in, 4, "altimetry", [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    ++rep.rows;
    const auto cycle = detail::parse_int(f[0]);
    if (!cycle) throw Error(Errc::parse_error, "altimetry " + at_line(line_no) + "cycle is not an integer");
    const Timestamp t = parse_timestamp_at(f[1], line_no, "altimetry");
    bool missing = false;
    const double ssh = parse_height(f[2], line_no, "altimetry", missing);
    const auto flag = detail::parse_int(f[3]);
    if (!flag) throw Error(Errc::parse_error, "altimetry " + at_line(line_no) + "flag is not an integer");
    if (missing) {
      rep.warnings.push_back("altimetry " + at_line(line_no) + "missing height, row dropped");
      return;
    }
    out.samples.push_back({*cycle, t, ssh, static_cast<int>(*flag)});
  });
  std::stable_sort(out.samples.begin(), out.samples.end(),
                   [](const AltimetrySample& a, const AltimetrySample& b) { return a.time < b.time; });
  if (out.samples.empty()) throw Error(Errc::insufficient_data, "altimetry: no valid rows");
  rep.kept = out.samples.size();
  return out;
}

AltimetrySeries load_altimetry(const std::filesystem::path& path, LoadReport* report) {
  auto in = open_input(path);
  return parse_altimetry(in, path.stem().string(), report);
}

WaterLevelSeries to_series(const AltimetrySeries& altimetry, CycleReduction reduction) {
  std::map<long long, std::vector<const AltimetrySample*>> cycles;
  std::optional<Timestamp> epoch;
  for (const auto& s : altimetry.samples) {
    if (s.flag != 0) continue;
    cycles[s.cycle].push_back(&s);
    if (!epoch || s.time < *epoch) epoch = s.time;
  }
  if (!epoch) throw Error(Errc::insufficient_data, "altimetry: no good-flag samples");

  std::vector<std::pair<double, double>> points;  // (time h, height)
  for (const auto& [cycle, members] : cycles) {
    std::vector<double> times;
    std::vector<double> heights;
    for (const auto* s : members) {
      times.push_back(hours_between(*epoch, s->time));
      heights.push_back(s->ssh);
    }
    const double t_mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
    double h = 0.0;
    switch (reduction) {
      case CycleReduction::median: h = median_of(heights); break;
      case CycleReduction::mean:
        h = std::accumulate(heights.begin(), heights.end(), 0.0) / static_cast<double>(heights.size());
        break;
      case CycleReduction::nearest_midpoint: {
        std::size_t best = 0;
        for (std::size_t i = 1; i < times.size(); ++i)
          if (std::abs(times[i] - t_mean) < std::abs(times[best] - t_mean)) best = i;
        h = heights[best];
        break;
      }
    }
    points.emplace_back(t_mean, h);
  }
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> times;
  std::vector<double> heights;
  for (const auto& [t, h] : points) {
    if (!times.empty() && !(t > times.back())) continue;
    times.push_back(t);
    heights.push_back(h);
  }
  return {std::move(times), std::move(heights), *epoch};
}

const std::string* HarmonicsFile::find_metadata(std::string_view key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return &v;
  return nullptr;
}

HarmonicsFile parse_harmonics(std::istream& in, const ConstituentCatalog& catalog) {
  HarmonicsFile out;
  out.solution = HarmonicSolution::zeros(catalog.size());
  std::vector<bool> seen(catalog.size(), false);
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      const auto body = detail::trim(trimmed.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string_view::npos && colon > 0)
        out.metadata.emplace_back(std::string(detail::trim(body.substr(0, colon))),
                                  std::string(detail::trim(body.substr(colon + 1))));
      continue;
    }
    const auto fields = detail::split_fields(trimmed);
    const auto where = "harmonics " + at_line(line_no);
    if (fields.size() < 2 || fields.size() > 3)
      throw Error(Errc::parse_error, where + "expected `constituent_name, amplitude_m[, phase_deg]`");
    const auto amplitude = detail::parse_double(fields[1]);
    if (first_row) {
      first_row = false;
      if (!amplitude) continue;  // header
    }
    if (!amplitude) throw Error(Errc::parse_error, where + "amplitude is not a number");
    if (!(*amplitude >= 0.0) || !std::isfinite(*amplitude))
      throw Error(Errc::invalid_value, where + "amplitude must be finite and non-negative");
    const auto k = catalog.index_of(fields[0]);
    if (!k) throw Error(Errc::not_found, where + "constituent '" + std::string(fields[0]) + "' is not in the catalog");
    if (seen[*k]) throw Error(Errc::duplicate_name, where + "constituent '" + std::string(fields[0]) + "' repeated");
    seen[*k] = true;
    const auto ki = static_cast<Eigen::Index>(*k);
    out.solution.amplitudes[ki] = *amplitude;
    if (fields.size() == 3 && !fields[2].empty()) {
      const auto phase = detail::parse_double(fields[2]);
      if (!phase || !std::isfinite(*phase)) throw Error(Errc::parse_error, where + "phase is not a number");
      out.solution.phases[ki] = wrap_two_pi(deg_to_rad(*phase));
      out.has_phases = true;
    }
  }
  for (std::size_t k = 0; k < catalog.size(); ++k)
    if (!seen[k]) out.warnings.push_back("constituent " + catalog[k].name + " missing from harmonics; using 0");

  auto numeric_metadata = [&](std::string_view key, double& target) {
    if (const auto* v = out.find_metadata(key)) {
      const auto parsed = detail::parse_double(*v);
      if (!parsed) throw Error(Errc::parse_error, "harmonics: metadata '" + std::string(key) + "' is not a number");
      target = *parsed;
    }
  };
  numeric_metadata("mean_m", out.solution.mean);
  numeric_metadata("trend_m_per_hour", out.solution.trend);
  return out;
}

HarmonicsFile load_harmonics(const std::filesystem::path& path, const ConstituentCatalog& catalog) {
  auto in = open_input(path);
  return parse_harmonics(in, catalog);
}

GaugeHarmonics load_gauge_harmonics(const std::filesystem::path& path, const ConstituentCatalog& catalog) {
  HarmonicsFile file = load_harmonics(path, catalog);
  GaugeHarmonics out;
  const auto* station = file.find_metadata("station");
  out.station = station ? *station : path.stem().string();
  out.harmonics = std::move(file.solution);
  return out;
}

void write_solution(std::ostream& out, const HarmonicSolution& solution, const ConstituentCatalog& catalog,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
  solution.validate(catalog.size());
  out << "# mean_m: " << format_number(solution.mean) << '\n';
  out << "# trend_m_per_hour: " << format_number(solution.trend) << '\n';
  for (const auto& [k, v] : metadata) out << "# " << k << ": " << v << '\n';
  out << "constituent_name,amplitude_m,phase_deg\n";
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    out << catalog[k].name << ',' << format_number(solution.amplitudes[ki]) << ','
        << format_number(rad_to_deg(wrap_two_pi(solution.phases[ki]))) << '\n';
  }
}

}  // namespace relsha
