#pragma once

// Synthetic data shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "roadnet/evaluate.hpp"
#include "roadnet/ingest.hpp"
#include "roadnet/interpolate.hpp"
#include "roadnet/point_pattern.hpp"
#include "roadnet/random.hpp"

namespace roadnet::testing {

inline constexpr GeoCoord kOntario{44.0, -79.0};

inline double normal01(std::mt19937_64& gen) {
  // Box-Muller on the library's portable uniform draw.
  const double u1 = 1.0 - uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline std::string station_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
  return buf;
}

/// n locations uniform in a square of side `side_km` centered on `ref`.
inline std::vector<GeoCoord> uniform_locations(std::size_t n, double side_km, std::mt19937_64& gen,
                                               GeoCoord ref = kOntario) {
  std::vector<GeoCoord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PlanarPoint p{(uniform01(gen) - 0.5) * side_km, (uniform01(gen) - 0.5) * side_km};
    out.push_back(unproject(p, ref));
  }
  return out;
}

inline std::vector<Station> make_registry(Network network, std::size_t n, std::mt19937_64& gen,
                                          double side_km = 400.0, const char* prefix = "S") {
  std::vector<Station> out;
  const auto locs = uniform_locations(n, side_km, gen);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({station_id(prefix, i), network, "station " + std::to_string(i), locs[i]});
  }
  return out;
}

inline std::vector<PlanarPoint> uniform_points(std::size_t n, const StudyWindow& w,
                                               std::mt19937_64& gen) {
  std::vector<PlanarPoint> out(n);
  for (auto& p : out) p = w.sample(gen);
  return out;
}

/// Thomas process: uniform parents, Gaussian-displaced offspring kept inside
/// the window by redrawing.
inline std::vector<PlanarPoint> thomas_points(std::size_t parents, std::size_t offspring,
                                              double spread_km, const StudyWindow& w,
                                              std::mt19937_64& gen) {
  std::vector<PlanarPoint> out;
  for (std::size_t k = 0; k < parents; ++k) {
    const auto c = w.sample(gen);
    for (std::size_t j = 0; j < offspring; ++j) {
      PlanarPoint p;
      do {
        p = {c.x + spread_km * normal01(gen), c.y + spread_km * normal01(gen)};
      } while (!w.contains(p));
      out.push_back(p);
    }
  }
  return out;
}

inline std::vector<Sample> samples_at(const std::vector<GeoCoord>& locs) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < locs.size(); ++i) out.push_back({station_id("S", i), locs[i], 0.0});
  return out;
}

/// Zero-mean, unit-variance Gaussian process with covariance
/// exp(-h²/(2ℓ²)) on great-circle distance.
inline void fill_gaussian_process(std::vector<Sample>& samples, double length_km,
                                  std::mt19937_64& gen) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = haversine_km(samples[static_cast<std::size_t>(i)].location,
                                    samples[static_cast<std::size_t>(j)].location);
      c(i, j) = std::exp(-h * h / (2.0 * length_km * length_km)) + (i == j ? 1e-8 : 0.0);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal01(gen);
  const Eigen::VectorXd f = llt.matrixL() * z;
  for (Eigen::Index i = 0; i < n; ++i) samples[static_cast<std::size_t>(i)].value = f(i);
}

inline std::vector<Station> stations_for(const std::vector<Sample>& samples,
                                         Network network = Network::RWIS) {
  std::vector<Station> out;
  for (const auto& s : samples) out.push_back({s.id, network, s.id, s.location});
  return out;
}

inline ObservationSet observations_for(const std::vector<Sample>& samples, Variable v,
                                       std::string timestamp) {
  ObservationSet obs{v, std::move(timestamp), {}};
  for (const auto& s : samples) obs.readings[s.id] = s.value;
  return obs;
}

/// Icosahedron vertices ("V*") plus face centers ("F*") on the sphere. Every
/// vertex has its five nearest stations (the surrounding face centers) at one
/// common distance, so IDW with max 5 neighbors predicts a vertex identically
/// for every power. Face-center values are set to the fixed point of IDW with
/// `power` over their own leave-one-out neighbors, so their LOOCV error
/// vanishes exactly at `power` and nowhere else.
inline std::vector<Sample> icosahedral_idw_field(double power, std::mt19937_64& gen,
                                                 const NeighborPolicy& policy) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double v[12][3] = {{-1, phi, 0},  {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                           {0, -1, phi},  {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                           {phi, 0, -1},  {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  auto to_geo = [](double x, double y, double z) {
    const double r = std::sqrt(x * x + y * y + z * z);
    return GeoCoord{std::asin(z / r) * 180.0 / std::numbers::pi,
                    std::atan2(y, x) * 180.0 / std::numbers::pi};
  };
  auto sq = [](double a) { return a * a; };
  const double edge2 = 4.0; // squared edge length of this icosahedron
  std::vector<Sample> out;
  for (int i = 0; i < 12; ++i) {
    out.push_back({station_id("V", static_cast<std::size_t>(i)), to_geo(v[i][0], v[i][1], v[i][2]),
                   10.0 * uniform01(gen)});
  }
  std::size_t faces = 0;
  for (int a = 0; a < 12; ++a)
    for (int b = a + 1; b < 12; ++b)
      for (int c = b + 1; c < 12; ++c) {
        auto d2 = [&](int p, int q) {
          return sq(v[p][0] - v[q][0]) + sq(v[p][1] - v[q][1]) + sq(v[p][2] - v[q][2]);
        };
        if (std::abs(d2(a, b) - edge2) > 1e-9 || std::abs(d2(a, c) - edge2) > 1e-9 ||
            std::abs(d2(b, c) - edge2) > 1e-9) {
          continue;
        }
        out.push_back({station_id("F", faces++),
                       to_geo(v[a][0] + v[b][0] + v[c][0], v[a][1] + v[b][1] + v[c][1],
                              v[a][2] + v[b][2] + v[c][2]),
                       5.0});
      }
  // Jacobi iteration on the face-center values; converges because every face
  // center draws weight from at least one fixed vertex value.
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<double> next(out.size());
    for (std::size_t i = 12; i < out.size(); ++i) {
      std::vector<Sample> rest;
      for (std::size_t j = 0; j < out.size(); ++j)
        if (j != i) rest.push_back(out[j]);
      next[i] = idw_predict(rest, out[i].location, power, policy);
    }
    for (std::size_t i = 12; i < out.size(); ++i) out[i].value = next[i];
  }
  return out;
}

/// Readings with exactly the given sample mean and sample standard deviation
/// (up to round-off).
inline std::vector<double> readings_with_moments(std::size_t n, double mean, double sd,
                                                 std::mt19937_64& gen) {
  std::vector<double> u(n);
  double m = 0.0;
  for (auto& x : u) {
    x = normal01(gen);
    m += x;
  }
  m /= static_cast<double>(n);
  double ss = 0.0;
  for (auto& x : u) {
    x -= m;
    ss += x * x;
  }
  const double s = std::sqrt(ss / static_cast<double>(n - 1));
  for (auto& x : u) x = mean + sd * x / s;
  return u;
}

/// Non-negative readings with the given sample mean and standard deviation:
/// zeros, k copies of a, and one b, with (a, b) solving the two moment
/// equations for the smallest workable k. Order is shuffled.
inline std::vector<double> nonnegative_readings_with_moments(std::size_t n, double mean, double sd,
                                                             std::mt19937_64& gen) {
  const double nn = static_cast<double>(n);
  const double s = nn * mean;
  const double q = (nn - 1.0) * sd * sd + nn * mean * mean;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double kk = static_cast<double>(k);
    const double disc = s * s * kk * kk - kk * (kk + 1.0) * (s * s - q);
    if (disc < 0.0) continue;
    for (double sign : {1.0, -1.0}) {
      const double a = (s * kk + sign * std::sqrt(disc)) / (kk * (kk + 1.0));
      const double b = s - kk * a;
      if (a < 0.0 || b < 0.0) continue;
      std::vector<double> out(n, 0.0);
      for (std::size_t i = 0; i < k; ++i) out[i] = a;
      out[k] = b;
      std::shuffle(out.begin(), out.end(), gen);
      return out;
    }
  }
  return {};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("roadnet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace roadnet::testing
