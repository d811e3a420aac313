#include "roadnet/point_pattern.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "roadnet/errors.hpp"
#include "roadnet/random.hpp"

namespace roadnet {

namespace {

bool on_planar_segment(const PlanarPoint& p, const PlanarPoint& a, const PlanarPoint& b) {
  constexpr double kTol = 1e-9;
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (std::abs(cross) > kTol * std::max(1.0, len)) return false;
  return p.x >= std::min(a.x, b.x) - kTol && p.x <= std::max(a.x, b.x) + kTol &&
         p.y >= std::min(a.y, b.y) - kTol && p.y <= std::max(a.y, b.y) + kTol;
}

bool in_planar_ring(const PlanarPoint& p, const std::vector<PlanarPoint>& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    if (on_planar_segment(p, ring[i], ring[j])) return true;
    if ((ring[i].y > p.y) != (ring[j].y > p.y)) {
      const double x_cross =
          ring[j].x + (p.y - ring[j].y) * (ring[i].x - ring[j].x) / (ring[i].y - ring[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::vector<double> sorted_pair_distances(std::span<const PlanarPoint> points) {
  std::vector<double> d;
  d.reserve(points.size() * (points.size() - 1) / 2);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) d.push_back(planar_distance(points[i], points[j]));
  std::sort(d.begin(), d.end());
  return d;
}

void check_distances(std::span<const double> distances, const StudyWindow& window) {
  if (distances.empty()) throw InputError("distance grid is empty");
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (!std::isfinite(distances[i]) || distances[i] < 0.0) {
      throw InputError("distances must be finite and non-negative");
    }
    if (i > 0 && !(distances[i] > distances[i - 1])) {
      throw InputError("distances must be strictly increasing");
    }
  }
  const double cap = 0.5 * window.shorter_side();
  if (distances.back() > cap) {
    throw InputError("distance " + std::to_string(distances.back()) +
                     " km exceeds half the window's shorter side (" + std::to_string(cap) + " km)");
  }
}

} // namespace

StudyWindow StudyWindow::box(const BoundingBox& bounds) {
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw InputError("study window must have positive width and height");
  }
  StudyWindow w;
  w.kind_ = Kind::BoundingBox;
  w.bounds_ = bounds;
  w.area_ = bounds.width() * bounds.height();
  return w;
}

StudyWindow StudyWindow::polygon(std::vector<PlanarPoint> vertices) {
  if (vertices.size() >= 2 && vertices.front() == vertices.back()) vertices.pop_back();
  if (vertices.size() < 3) throw InputError("polygon window needs at least 3 vertices");
  double twice_area = 0.0;
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
    twice_area += vertices[j].x * vertices[i].y - vertices[i].x * vertices[j].y;
    b.xmin = std::min(b.xmin, vertices[i].x);
    b.xmax = std::max(b.xmax, vertices[i].x);
    b.ymin = std::min(b.ymin, vertices[i].y);
    b.ymax = std::max(b.ymax, vertices[i].y);
  }
  const double area = std::abs(twice_area) / 2.0;
  if (!(area > 0.0)) throw InputError("polygon window has zero area");
  StudyWindow w;
  w.kind_ = Kind::Polygon;
  w.bounds_ = b;
  w.vertices_ = std::move(vertices);
  w.area_ = area;
  return w;
}

bool StudyWindow::contains(const PlanarPoint& p) const {
  if (p.x < bounds_.xmin || p.x > bounds_.xmax || p.y < bounds_.ymin || p.y > bounds_.ymax) {
    return false;
  }
  return kind_ == Kind::BoundingBox || in_planar_ring(p, vertices_);
}

PlanarPoint StudyWindow::sample(std::mt19937_64& gen) const {
  for (;;) {
    const double x = bounds_.xmin + uniform01(gen) * bounds_.width();
    const double y = bounds_.ymin + uniform01(gen) * bounds_.height();
    if (kind_ == Kind::BoundingBox || in_planar_ring({x, y}, vertices_)) return {x, y};
  }
}

StudyWindow default_window(std::span<const PlanarPoint> points, double expand) {
  if (points.empty()) throw InputError("cannot build a window around zero points");
  BoundingBox b{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const auto& p : points) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  const double gx = 0.5 * expand * b.width();
  const double gy = 0.5 * expand * b.height();
  return StudyWindow::box({b.xmin - gx, b.ymin - gy, b.xmax + gx, b.ymax + gy});
}

std::vector<double> default_distance_grid(const StudyWindow& window, std::size_t bins) {
  if (bins == 0) throw InputError("distance grid needs at least one band");
  const double top = 0.25 * window.shorter_side();
  std::vector<double> d(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    d[k] = top * static_cast<double>(k + 1) / static_cast<double>(bins);
  }
  return d;
}

std::vector<double> nearest_neighbor_distances(std::span<const GeoCoord> points) {
  if (points.size() < 2) throw InputError("nearest-neighbor distance needs at least 2 points");
  std::vector<double> nn(points.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = haversine_km(points[i], points[j]);
      nn[i] = std::min(nn[i], d);
      nn[j] = std::min(nn[j], d);
    }
  }
  return nn;
}

double mean_nn_distance(std::span<const GeoCoord> points) {
  const auto nn = nearest_neighbor_distances(points);
  double sum = 0.0;
  for (double d : nn) sum += d;
  return sum / static_cast<double>(nn.size());
}

double mean_nn_distance(std::span<const Station> stations) {
  const auto locs = locations(stations);
  return mean_nn_distance(std::span<const GeoCoord>(locs));
}

std::vector<double> ripley_k(std::span<const PlanarPoint> points, const StudyWindow& window,
                             std::span<const double> distances) {
  if (points.size() < 2) throw InputError("Ripley's K needs at least 2 points");
  for (const auto& p : points) {
    if (!window.contains(p)) throw InputError("point lies outside the study window");
  }
  check_distances(distances, window);

  const auto pairs = sorted_pair_distances(points);
  const auto n = static_cast<double>(points.size());
  const double scale = window.area() / (n * (n - 1.0));
  std::vector<double> k;
  k.reserve(distances.size());
  for (double d : distances) {
    const auto count = std::upper_bound(pairs.begin(), pairs.end(), d) - pairs.begin();
    // Each unordered pair contributes twice to the ordered sum over i != j.
    k.push_back(scale * 2.0 * static_cast<double>(count));
  }
  return k;
}

std::vector<double> ripley_l(std::span<const double> k_values) {
  std::vector<double> l;
  l.reserve(k_values.size());
  for (double k : k_values) {
    if (!(k >= 0.0)) throw InternalError("negative or NaN K value");
    l.push_back(std::sqrt(k / std::numbers::pi));
  }
  return l;
}

std::vector<std::vector<double>> simulate_csr_l(std::size_t n_points, const StudyWindow& window,
                                                std::span<const double> distances,
                                                std::size_t n_sims, std::uint64_t seed,
                                                unsigned threads) {
  if (n_sims < 1) throw InputError("at least one simulation is required");
  if (n_points < 2) throw InputError("CSR simulation needs at least 2 points");
  check_distances(distances, window);

  std::vector<std::vector<double>> curves(n_sims);
  auto run = [&](std::size_t i) {
    auto gen = substream(seed, i);
    std::vector<PlanarPoint> pts(n_points);
    for (auto& p : pts) p = window.sample(gen);
    curves[i] = ripley_l(ripley_k(pts, window, distances));
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = std::min<std::size_t>(threads, n_sims);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_sims; ++i) run(i);
    return curves;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n_sims; i += workers) run(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return curves;
}

Envelope envelope_of(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw InputError("envelope of zero curves");
  Envelope env{curves[0], curves[0]};
  for (const auto& c : curves) {
    if (c.size() != env.low.size()) throw InternalError("curve length mismatch");
    for (std::size_t b = 0; b < c.size(); ++b) {
      env.low[b] = std::min(env.low[b], c[b]);
      env.high[b] = std::max(env.high[b], c[b]);
    }
  }
  return env;
}

Envelope csr_envelope(std::size_t n_points, const StudyWindow& window,
                      std::span<const double> distances, std::size_t n_sims, std::uint64_t seed,
                      unsigned threads) {
  return envelope_of(simulate_csr_l(n_points, window, distances, n_sims, seed, threads));
}

LFunctionResult analyze_l_function(std::span<const PlanarPoint> points, const StudyWindow& window,
                                   std::span<const double> distances, std::size_t n_sims,
                                   std::uint64_t seed, unsigned threads) {
  LFunctionResult r;
  r.distances.assign(distances.begin(), distances.end());
  r.l_observed = ripley_l(ripley_k(points, window, distances));
  auto env = csr_envelope(points.size(), window, distances, n_sims, seed, threads);
  r.envelope_low = std::move(env.low);
  r.envelope_high = std::move(env.high);
  r.n_simulations = n_sims;
  r.seed = seed;
  return r;
}

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::Clustered: return "Clustered";
  case Verdict::Random: return "Random";
  case Verdict::Dispersed: return "Dispersed";
  }
  throw InternalError("unknown verdict");
}

std::vector<Verdict> cluster_verdict(const LFunctionResult& result) {
  const auto n = result.distances.size();
  if (result.l_observed.size() != n || result.envelope_low.size() != n ||
      result.envelope_high.size() != n) {
    throw InputError("L-function result has mismatched column lengths");
  }
  std::vector<Verdict> out(n, Verdict::Random);
  for (std::size_t b = 0; b < n; ++b) {
    if (result.l_observed[b] > result.envelope_high[b]) {
      out[b] = Verdict::Clustered;
    } else if (result.l_observed[b] < result.envelope_low[b]) {
      out[b] = Verdict::Dispersed;
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> base_unions(std::size_t n_registries) {
  std::vector<std::vector<std::size_t>> u;
  for (std::size_t i = 1; i < n_registries; ++i) u.push_back({0, i});
  return u;
}

CoverageReport coverage_report(std::span<const NetworkRegistry> registries,
                               std::span<const RegionPolygon> regions,
                               std::span<const std::vector<std::size_t>> unions) {
  CoverageReport report;
  std::map<std::string, std::size_t> name_index;
  for (const auto& r : regions) {
    if (name_index.emplace(r.name(), report.region_names.size()).second) {
      report.region_names.push_back(r.name());
    }
  }

  auto make_row = [&](std::string label, std::vector<std::size_t> members) {
    std::vector<Station> pooled;
    for (auto m : members) {
      if (m >= registries.size()) throw InputError("union references an unknown registry");
      const auto& s = registries[m].stations;
      pooled.insert(pooled.end(), s.begin(), s.end());
    }
    CoverageRow row;
    row.label = std::move(label);
    row.members = std::move(members);
    row.count_total = pooled.size();
    row.mean_nn_km = mean_nn_distance(std::span<const Station>(pooled));
    row.counts_per_region.assign(report.region_names.size(), 0);
    for (const auto& st : pooled) {
      std::vector<bool> hit(report.region_names.size(), false);
      for (const auto& r : regions) {
        if (point_in_polygon(st.location, r)) hit[name_index.at(r.name())] = true;
      }
      bool any = false;
      for (std::size_t k = 0; k < hit.size(); ++k) {
        if (hit[k]) {
          ++row.counts_per_region[k];
          any = true;
        }
      }
      if (any) ++row.count_in_regions;
    }
    return row;
  };

  for (std::size_t i = 0; i < registries.size(); ++i) {
    if (registries[i].stations.empty()) {
      throw InputError("registry '" + registries[i].label + "' is empty");
    }
    report.rows.push_back(make_row(registries[i].label, {i}));
  }
  for (const auto& u : unions) {
    std::string label;
    for (auto m : u) {
      if (m >= registries.size()) throw InputError("union references an unknown registry");
      if (!label.empty()) label += " + ";
      label += registries[m].label;
    }
    report.rows.push_back(make_row(label, u));
  }
  return report;
}

double regional_growth(const CoverageRow& combined, const CoverageRow& base) {
  if (base.count_in_regions == 0) throw InputError("base row has no stations inside the regions");
  return static_cast<double>(combined.count_in_regions) /
         static_cast<double>(base.count_in_regions);
}

} // namespace roadnet
