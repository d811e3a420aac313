#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roadnet/geo.hpp"

namespace roadnet {

/// A measured value at a station. `id` orders distance ties.
struct Sample {
  std::string id;
  GeoCoord location;
  double value = 0.0;
};

struct NeighborPolicy {
  std::size_t min_neighbors = 3;
  std::size_t max_neighbors = 6;

  void validate() const;
};

/// Targets closer than this to a sample are treated as coincident with it.
inline constexpr double kCoincidenceKm = 1e-9;

struct Neighbor {
  const Sample* sample = nullptr;
  double distance_km = 0.0;
};

/// The policy.max_neighbors nearest samples (fewer if not available), sorted
/// by ascending great-circle distance, ties broken by ascending id.
/// Throws InputError if fewer than policy.min_neighbors samples exist.
std::vector<Neighbor> select_neighbors(std::span<const Sample> samples, const GeoCoord& target,
                                       const NeighborPolicy& policy);

// Inverse distance weighting -------------------------------------------------

/// Σ d_i^{-p} z_i / Σ d_i^{-p} over the selected neighbors. A neighbor within
/// kCoincidenceKm of the target returns that sample's value exactly.
double idw_predict(std::span<const Sample> samples, const GeoCoord& target, double power,
                   const NeighborPolicy& policy = {});

// Completely regularized spline ------------------------------------------------

/// φ(r) = -[γ + ln x + E1(x)] with x = (σr/2)²; φ(0) = 0.
double crs_basis(double r_km, double sigma);

/// Interpolant Σ w_i φ(d_i) + b, where [Φ 1; 1ᵀ 0][w; b] = [z; 0] over the
/// selected neighbors. Throws NumericalError naming the samples when two
/// neighbors share a location.
double rbf_predict(std::span<const Sample> samples, const GeoCoord& target, double sigma,
                   const NeighborPolicy& policy = {});

// Variogram -------------------------------------------------------------------

struct VariogramModel {
  double nugget = 0.0;
  double partial_sill = 1.0;
  double range_km = 100.0;

  void validate() const;
  double sill() const { return nugget + partial_sill; }
};

/// γ(0) = 0; γ(h) = c0 + c·(1 - exp(-3h²/a²)) for h > 0 (effective range).
double gaussian_variogram(double h_km, const VariogramModel& model);

struct VariogramLag {
  double h_lo = 0.0;
  double h_hi = 0.0;
  double mean_h = 0.0;    ///< mean pair separation in the bin; 0 when empty
  double gamma_hat = 0.0; ///< 0 when empty
  std::size_t pair_count = 0;

  bool occupied() const { return pair_count > 0; }
};

struct EmpiricalVariogram {
  double lag_size_km = 10.0;
  std::size_t n_lags = 20;
  std::vector<VariogramLag> lags;

  std::size_t occupied_bins() const;
};

/// Classical (Matheron) estimator over bins (k·lag, (k+1)·lag]. Pairs at zero
/// separation or beyond lag·n_lags are ignored.
EmpiricalVariogram empirical_variogram(std::span<const Sample> samples, double lag_size_km = 10.0,
                                       std::size_t n_lags = 20);

/// Nugget and partial sill by pair-count-weighted least squares with the range
/// held fixed; both constrained to be non-negative. Needs >= 2 occupied bins.
VariogramModel fit_variogram(const EmpiricalVariogram& emp, double range_km = 100.0);

// Trend -----------------------------------------------------------------------

/// z ≈ β0 + β1·x + β2·y on planar km about `ref`.
struct TrendSurface {
  GeoCoord ref;
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;

  double at(const GeoCoord& p) const;
};

struct Detrended {
  TrendSurface trend;
  std::vector<Sample> residuals;
};

/// Ordinary least squares plane through the samples (projected about their
/// centroid). Throws NumericalError for fewer than 3 or collinear locations.
Detrended detrend_first_order(std::span<const Sample> samples);

// Ordinary kriging ------------------------------------------------------------

struct KrigingSystem {
  std::vector<Neighbor> neighbors;
  std::vector<double> weights;
  double lagrange = 0.0;
};

/// Solves [Γ 1; 1ᵀ 0][λ; μ] = [γ(d_i0); 1] over the selected neighbors.
/// The system is solved on the variogram rescaled to unit sill (weights are
/// scale invariant); a model with zero sill is replaced by its unit-sill
/// Gaussian shape.
KrigingSystem ok_system(std::span<const Sample> samples, const GeoCoord& target,
                        const VariogramModel& model, const NeighborPolicy& policy = {});

double ok_predict(std::span<const Sample> samples, const GeoCoord& target,
                  const VariogramModel& model, const NeighborPolicy& policy = {});

// Methods ---------------------------------------------------------------------

enum class Method { IDW, RBF, OK };

/// "IDW", "RBF", "OK".
std::string_view to_string(Method m);
/// Case-insensitive: idw, rbf, ok.
std::optional<Method> parse_method(std::string_view text);

struct MethodParams {
  double idw_power = 2.0;
  double rbf_sigma = 0.1; ///< 1/km
  VariogramModel variogram{};
  double lag_size_km = 10.0;
  std::size_t n_lags = 20;
  NeighborPolicy neighbors{};

  void validate() const;
};

/// Trend removal, residual variogram fit (range fixed at params.variogram.range_km),
/// kriging of residuals, trend added back at the target.
double ok_full_predict(std::span<const Sample> samples, const GeoCoord& target,
                       const MethodParams& params);

/// Dispatches to idw_predict, rbf_predict, or ok_full_predict.
double predict(Method method, std::span<const Sample> samples, const GeoCoord& target,
               const MethodParams& params);

} // namespace roadnet
