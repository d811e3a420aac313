#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roadnet/geo.hpp"
#include "roadnet/ingest.hpp"

namespace roadnet {

struct BoundingBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

/// Planar region (km) over which a point pattern is observed and CSR
/// realizations are drawn.
class StudyWindow {
public:
  enum class Kind { BoundingBox, Polygon };

  static StudyWindow box(const BoundingBox& bounds);
  /// Simple polygon, open or closed, at least 3 vertices.
  static StudyWindow polygon(std::vector<PlanarPoint> vertices);

  Kind kind() const { return kind_; }
  double area() const { return area_; }
  const BoundingBox& bounds() const { return bounds_; }
  const std::vector<PlanarPoint>& vertices() const { return vertices_; }
  double shorter_side() const { return std::min(bounds_.width(), bounds_.height()); }

  bool contains(const PlanarPoint& p) const;

  /// Uniform draw; rejection sampling against the bounding box for polygons.
  PlanarPoint sample(std::mt19937_64& gen) const;

private:
  Kind kind_ = Kind::BoundingBox;
  BoundingBox bounds_;
  std::vector<PlanarPoint> vertices_;
  double area_ = 0.0;
};

/// Bounding box of `points` with each side grown so the box is `expand`
/// (fractionally) wider and taller, centered on the original box.
StudyWindow default_window(std::span<const PlanarPoint> points, double expand = 0.05);

/// `bins` evenly spaced distances d_k = k·D/bins, k = 1..bins, with D one
/// quarter of the window's shorter side.
std::vector<double> default_distance_grid(const StudyWindow& window, std::size_t bins = 40);

/// Distance from each point to its nearest other point (great-circle km).
std::vector<double> nearest_neighbor_distances(std::span<const GeoCoord> points);
double mean_nn_distance(std::span<const GeoCoord> points);
double mean_nn_distance(std::span<const Station> stations);

/// Ripley's K without edge correction:
/// K(d) = A / (n(n-1)) · Σ_{i≠j} 1[d_ij <= d].
std::vector<double> ripley_k(std::span<const PlanarPoint> points, const StudyWindow& window,
                             std::span<const double> distances);

/// L(d) = sqrt(K(d)/π).
std::vector<double> ripley_l(std::span<const double> k_values);

struct Envelope {
  std::vector<double> low;
  std::vector<double> high;
};

inline constexpr std::size_t kDefaultSimulations = 9;

/// L curves of `n_sims` independent CSR realizations of `n_points` points.
/// Simulation i draws from substream(seed, i); `threads` = 0 picks the
/// hardware concurrency. Output is independent of the thread count.
std::vector<std::vector<double>> simulate_csr_l(std::size_t n_points, const StudyWindow& window,
                                                std::span<const double> distances,
                                                std::size_t n_sims, std::uint64_t seed,
                                                unsigned threads = 1);

/// Pointwise min/max over curves.
Envelope envelope_of(const std::vector<std::vector<double>>& curves);

Envelope csr_envelope(std::size_t n_points, const StudyWindow& window,
                      std::span<const double> distances, std::size_t n_sims = kDefaultSimulations,
                      std::uint64_t seed = 42, unsigned threads = 1);

struct LFunctionResult {
  std::vector<double> distances;
  std::vector<double> l_observed;
  std::vector<double> envelope_low;
  std::vector<double> envelope_high;
  std::size_t n_simulations = 0;
  std::uint64_t seed = 0;
};

LFunctionResult analyze_l_function(std::span<const PlanarPoint> points, const StudyWindow& window,
                                   std::span<const double> distances,
                                   std::size_t n_sims = kDefaultSimulations,
                                   std::uint64_t seed = 42, unsigned threads = 1);

enum class Verdict { Clustered, Random, Dispersed };
std::string_view to_string(Verdict v);

/// Clustered above the envelope, Dispersed below, Random otherwise.
std::vector<Verdict> cluster_verdict(const LFunctionResult& result);

// Coverage ---------------------------------------------------------------

struct NetworkRegistry {
  std::string label;
  std::vector<Station> stations;
};

struct CoverageRow {
  std::string label;
  std::vector<std::size_t> members; ///< indices into the input registries
  std::size_t count_total = 0;
  double mean_nn_km = 0.0;
  std::vector<std::size_t> counts_per_region; ///< aligned with CoverageReport::region_names
  std::size_t count_in_regions = 0;           ///< inside at least one listed region

  bool combined() const { return members.size() > 1; }
};

struct CoverageReport {
  std::vector<std::string> region_names;
  std::vector<CoverageRow> rows;
};

/// Unions pairing the first registry with each of the others:
/// {0,1}, {0,2}, ...
std::vector<std::vector<std::size_t>> base_unions(std::size_t n_registries);

/// One row per registry followed by one row per union. Regions sharing a name
/// (MultiPolygon parts) are counted together.
CoverageReport coverage_report(std::span<const NetworkRegistry> registries,
                               std::span<const RegionPolygon> regions,
                               std::span<const std::vector<std::size_t>> unions);

/// count_in_regions(combined) / count_in_regions(base). Throws InputError
/// when the base count is zero.
double regional_growth(const CoverageRow& combined, const CoverageRow& base);

} // namespace roadnet
