#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roadnet/geo.hpp"

namespace roadnet {

enum class Network { RWIS, MtoCamera, EnvCanada };

/// Wire names: RWIS, MTO_CAMERA, ENV_CANADA.
std::string_view to_string(Network n);
std::optional<Network> parse_network(std::string_view text);

enum class Variable { AirTempC, WindSpeedKmh, PressureKPa };

/// Wire names: air_temp_C, wind_speed_kmh, pressure_kPa.
std::string_view to_string(Variable v);
std::optional<Variable> parse_variable(std::string_view text);

struct Station {
  std::string id;
  Network network = Network::RWIS;
  std::string name;
  GeoCoord location;
};

/// One variable at one timestamp across many stations. Readings are keyed by
/// station id; stations without a reading are simply absent.
struct ObservationSet {
  Variable variable = Variable::AirTempC;
  std::string timestamp;
  std::map<std::string, double> readings;
};

inline constexpr std::string_view kStationsHeader = "station_id,network,name,lat,lon";
inline constexpr std::string_view kObservationsHeader = "station_id,timestamp,variable,value";

std::vector<Station> load_stations(const std::filesystem::path& path);
std::vector<Station> read_stations(std::istream& in, std::string_view source = "<stream>");
void write_stations(std::ostream& out, std::span<const Station> stations);

/// Loads observations and resolves every station id against `registry`.
/// Sets are ordered by (timestamp, variable).
std::vector<ObservationSet> load_observations(const std::filesystem::path& path,
                                              std::span<const Station> registry);
/// Same, without resolving station ids (used when no registry is at hand).
std::vector<ObservationSet> load_observations(const std::filesystem::path& path);
std::vector<ObservationSet> read_observations(std::istream& in,
                                              const std::vector<Station>* registry,
                                              std::string_view source = "<stream>");
void write_observations(std::ostream& out, std::span<const ObservationSet> sets);

/// ISO-8601 date-time: YYYY-MM-DDTHH:MM[:SS[.fff]][Z|±HH:MM].
bool is_iso8601_timestamp(std::string_view text);

/// GeoJSON FeatureCollection of Polygon / MultiPolygon features with a string
/// `name` property. MultiPolygons yield one region per part.
std::vector<RegionPolygon> load_regions(const std::filesystem::path& path);
std::vector<RegionPolygon> parse_regions(std::string_view geojson);

/// Plain union of registries. Ids that occur in more than one registry are
/// prefixed with their network name ("RWIS:17").
std::vector<Station> merge_networks(std::span<const std::vector<Station>> registries);

/// Greedy thinning: keeps a station only if no already-kept station lies
/// within `radius_km`. Input order decides which of a close pair survives.
std::vector<Station> dedupe_within_radius(std::span<const Station> stations, double radius_km);

std::vector<Station> filter_network(std::span<const Station> stations, Network network);

std::vector<GeoCoord> locations(std::span<const Station> stations);

} // namespace roadnet
