#include "roadnet/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "roadnet/csv.hpp"
#include "roadnet/errors.hpp"

namespace roadnet {

namespace {

constexpr std::array<std::pair<Network, std::string_view>, 3> kNetworkNames{{
    {Network::RWIS, "RWIS"},
    {Network::MtoCamera, "MTO_CAMERA"},
    {Network::EnvCanada, "ENV_CANADA"},
}};

constexpr std::array<std::pair<Variable, std::string_view>, 3> kVariableNames{{
    {Variable::AirTempC, "air_temp_C"},
    {Variable::WindSpeedKmh, "wind_speed_kmh"},
    {Variable::PressureKPa, "pressure_kPa"},
}};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  return in;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

void expect_header(csv::Reader& reader, std::string_view expected, std::string_view source) {
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw InputError(std::string(source) + ": missing header");
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  if (csv::join(fields) != expected) {
    throw InputError(std::string(source) + ": header must be exactly '" + std::string(expected) +
                     "'");
  }
}

bool is_blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

bool valid_calendar(int year, int month, int day) {
  static constexpr std::array<int, 12> kDays{31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12 || day < 1) return false;
  if (day > kDays[static_cast<std::size_t>(month - 1)]) return false;
  if (month == 2 && day == 29) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap;
  }
  return true;
}

} // namespace

std::string_view to_string(Network n) {
  for (const auto& [value, name] : kNetworkNames)
    if (value == n) return name;
  throw InternalError("unknown network enum");
}

std::optional<Network> parse_network(std::string_view text) {
  for (const auto& [value, name] : kNetworkNames)
    if (name == text) return value;
  return std::nullopt;
}

std::string_view to_string(Variable v) {
  for (const auto& [value, name] : kVariableNames)
    if (value == v) return name;
  throw InternalError("unknown variable enum");
}

std::optional<Variable> parse_variable(std::string_view text) {
  for (const auto& [value, name] : kVariableNames)
    if (name == text) return value;
  return std::nullopt;
}

bool is_iso8601_timestamp(std::string_view text) {
  static const std::regex kPattern(
      R"(^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2})(?::(\d{2})(?:\.\d+)?)?(?:Z|[+-]\d{2}:\d{2})?$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, kPattern)) return false;
  const int year = std::stoi(m[1].str());
  const int month = std::stoi(m[2].str());
  const int day = std::stoi(m[3].str());
  const int hour = std::stoi(m[4].str());
  const int minute = std::stoi(m[5].str());
  const int second = m[6].matched ? std::stoi(m[6].str()) : 0;
  return valid_calendar(year, month, day) && hour <= 23 && minute <= 59 && second <= 60;
}

std::vector<Station> load_stations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_stations(in, path.string());
}

std::vector<Station> read_stations(std::istream& in, std::string_view source) {
  csv::Reader reader(in);
  expect_header(reader, kStationsHeader, source);

  std::vector<Station> stations;
  std::unordered_set<std::string> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (is_blank(f)) continue;
    const auto at = where(source, reader.line());
    if (f.size() != 5) {
      throw InputError(at + "expected 5 fields, found " + std::to_string(f.size()));
    }
    if (f[0].empty()) throw InputError(at + "empty station_id");
    const auto network = parse_network(f[1]);
    if (!network) {
      throw InputError(at + "unknown network '" + f[1] + "' (valid: RWIS, MTO_CAMERA, ENV_CANADA)");
    }
    double lat = 0.0;
    double lon = 0.0;
    if (!csv::parse_double(f[3], lat) || !csv::parse_double(f[4], lon)) {
      throw InputError(at + "unparseable coordinate");
    }
    GeoCoord loc;
    try {
      loc = GeoCoord::checked(lat, lon);
    } catch (const InputError& e) {
      throw InputError(at + "station '" + f[0] + "': " + e.what());
    }
    if (!seen.insert(f[0]).second) throw InputError(at + "duplicate station_id '" + f[0] + "'");
    stations.push_back({f[0], *network, f[2], loc});
  }
  return stations;
}

void write_stations(std::ostream& out, std::span<const Station> stations) {
  out << kStationsHeader << '\n';
  for (const auto& s : stations) {
    out << csv::join({s.id, std::string(to_string(s.network)), s.name,
                      csv::format_double(s.location.lat), csv::format_double(s.location.lon)})
        << '\n';
  }
}

std::vector<ObservationSet> load_observations(const std::filesystem::path& path,
                                              std::span<const Station> registry) {
  auto in = open_input(path);
  const std::vector<Station> copy(registry.begin(), registry.end());
  return read_observations(in, &copy, path.string());
}

std::vector<ObservationSet> load_observations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_observations(in, nullptr, path.string());
}

std::vector<ObservationSet> read_observations(std::istream& in,
                                              const std::vector<Station>* registry,
                                              std::string_view source) {
  csv::Reader reader(in);
  expect_header(reader, kObservationsHeader, source);

  std::unordered_set<std::string> known;
  if (registry) {
    for (const auto& s : *registry) known.insert(s.id);
  }

  std::map<std::pair<std::string, Variable>, ObservationSet> groups;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (is_blank(f)) continue;
    const auto at = where(source, reader.line());
    if (f.size() != 4) {
      throw InputError(at + "expected 4 fields, found " + std::to_string(f.size()));
    }
    const auto& id = f[0];
    if (registry && !known.contains(id)) throw InputError(at + "unknown station_id '" + id + "'");
    if (!is_iso8601_timestamp(f[1])) throw InputError(at + "unparseable timestamp '" + f[1] + "'");
    const auto variable = parse_variable(f[2]);
    if (!variable) {
      throw InputError(at + "unknown variable '" + f[2] +
                       "' (valid: air_temp_C, wind_speed_kmh, pressure_kPa)");
    }
    double value = 0.0;
    if (!csv::parse_double(f[3], value) || !std::isfinite(value)) {
      throw InputError(at + "value is not a finite number");
    }
    if (*variable == Variable::PressureKPa && value <= 0.0) {
      throw InputError(at + "pressure must be positive");
    }
    if (*variable == Variable::WindSpeedKmh && value < 0.0) {
      throw InputError(at + "wind speed must be non-negative");
    }
    auto& set = groups[{f[1], *variable}];
    set.variable = *variable;
    set.timestamp = f[1];
    if (!set.readings.emplace(id, value).second) {
      throw InputError(at + "duplicate reading for station '" + id + "', " + f[2] + " at " + f[1]);
    }
  }

  std::vector<ObservationSet> out;
  out.reserve(groups.size());
  for (auto& [key, set] : groups) out.push_back(std::move(set));
  return out;
}

void write_observations(std::ostream& out, std::span<const ObservationSet> sets) {
  out << kObservationsHeader << '\n';
  for (const auto& set : sets) {
    for (const auto& [id, value] : set.readings) {
      out << csv::join({id, set.timestamp, std::string(to_string(set.variable)),
                        csv::format_double(value)})
          << '\n';
    }
  }
}

namespace {

std::vector<GeoCoord> parse_ring(const nlohmann::json& ring, const std::string& name) {
  if (!ring.is_array()) throw InputError("region '" + name + "': ring is not an array");
  std::vector<GeoCoord> out;
  for (const auto& pos : ring) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw InputError("region '" + name + "': malformed position");
    }
    // RFC 7946 positions are [lon, lat].
    out.push_back(GeoCoord::checked(pos[1].get<double>(), pos[0].get<double>()));
  }
  return out;
}

RegionPolygon parse_polygon(const nlohmann::json& coords, const std::string& name) {
  if (!coords.is_array() || coords.empty()) {
    throw InputError("region '" + name + "': polygon has no rings");
  }
  std::vector<std::vector<GeoCoord>> rings;
  for (const auto& ring : coords) rings.push_back(parse_ring(ring, name));
  return RegionPolygon(name, std::move(rings));
}

} // namespace

std::vector<RegionPolygon> load_regions(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_regions(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<RegionPolygon> parse_regions(std::string_view geojson) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(geojson);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw InputError("expected a GeoJSON FeatureCollection");
  }

  std::vector<RegionPolygon> regions;
  std::size_t index = 0;
  for (const auto& feature : doc["features"]) {
    const auto label = "feature " + std::to_string(index++);
    const auto props = feature.find("properties");
    if (props == feature.end() || !props->is_object() || !props->contains("name") ||
        !(*props)["name"].is_string()) {
      throw InputError(label + ": missing string property 'name'");
    }
    const auto name = (*props)["name"].get<std::string>();
    const auto geom = feature.find("geometry");
    if (geom == feature.end() || !geom->is_object()) {
      throw InputError(label + " ('" + name + "'): missing geometry");
    }
    const auto type = geom->value("type", "");
    const auto coords = geom->find("coordinates");
    if (type == "Polygon" && coords != geom->end()) {
      regions.push_back(parse_polygon(*coords, name));
    } else if (type == "MultiPolygon" && coords != geom->end() && coords->is_array()) {
      for (const auto& part : *coords) regions.push_back(parse_polygon(part, name));
    } else {
      throw InputError(label + " ('" + name + "'): unsupported geometry type '" + type +
                       "' (expected Polygon or MultiPolygon)");
    }
  }
  return regions;
}

std::vector<Station> merge_networks(std::span<const std::vector<Station>> registries) {
  std::unordered_map<std::string, std::size_t> registries_per_id;
  for (const auto& reg : registries) {
    std::unordered_set<std::string> ids;
    for (const auto& s : reg) ids.insert(s.id);
    for (const auto& id : ids) ++registries_per_id[id];
  }

  std::vector<Station> merged;
  std::unordered_set<std::string> used;
  for (const auto& reg : registries) {
    for (Station s : reg) {
      if (registries_per_id[s.id] > 1) s.id = std::string(to_string(s.network)) + ":" + s.id;
      // Same id and same network in two registries: append an ordinal.
      if (used.contains(s.id)) {
        const auto base = s.id;
        for (int k = 2; used.contains(s.id); ++k) s.id = base + "#" + std::to_string(k);
      }
      used.insert(s.id);
      merged.push_back(std::move(s));
    }
  }
  return merged;
}

std::vector<Station> dedupe_within_radius(std::span<const Station> stations, double radius_km) {
  if (!(radius_km >= 0.0)) throw InputError("dedupe radius must be non-negative");
  std::vector<Station> kept;
  for (const auto& s : stations) {
    const bool close = std::any_of(kept.begin(), kept.end(), [&](const Station& k) {
      return haversine_km(k.location, s.location) <= radius_km;
    });
    if (!close) kept.push_back(s);
  }
  return kept;
}

std::vector<Station> filter_network(std::span<const Station> stations, Network network) {
  std::vector<Station> out;
  std::copy_if(stations.begin(), stations.end(), std::back_inserter(out),
               [&](const Station& s) { return s.network == network; });
  return out;
}

std::vector<GeoCoord> locations(std::span<const Station> stations) {
  std::vector<GeoCoord> out;
  out.reserve(stations.size());
  for (const auto& s : stations) out.push_back(s.location);
  return out;
}

} // namespace roadnet
