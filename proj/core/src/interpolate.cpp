#include "roadnet/interpolate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <Eigen/LU>

#include "roadnet/errors.hpp"
#include "roadnet/special_functions.hpp"

namespace roadnet {

namespace {

void check_distinct(const std::vector<Neighbor>& nb) {
  for (std::size_t i = 0; i < nb.size(); ++i) {
    for (std::size_t j = i + 1; j < nb.size(); ++j) {
      if (haversine_km(nb[i].sample->location, nb[j].sample->location) < kCoincidenceKm) {
        throw NumericalError("singular system: samples '" + nb[i].sample->id + "' and '" +
                             nb[j].sample->id + "' share a location");
      }
    }
  }
}

// Solves the bordered system [A 1; 1ᵀ 0] x = rhs.
Eigen::VectorXd solve_bordered(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs,
                               std::string_view what) {
  const Eigen::Index k = a.rows();
  Eigen::MatrixXd m(k + 1, k + 1);
  m.topLeftCorner(k, k) = a;
  m.col(k).head(k).setOnes();
  m.row(k).head(k).setOnes();
  m(k, k) = 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw NumericalError(std::string(what) + " system is singular");
  return lu.solve(rhs);
}

} // namespace

void NeighborPolicy::validate() const {
  if (min_neighbors < 1 || min_neighbors > max_neighbors) {
    throw InputError("neighbor policy requires 1 <= min <= max");
  }
}

std::vector<Neighbor> select_neighbors(std::span<const Sample> samples, const GeoCoord& target,
                                       const NeighborPolicy& policy) {
  policy.validate();
  if (samples.size() < policy.min_neighbors) {
    throw InputError("need at least " + std::to_string(policy.min_neighbors) +
                     " samples, have " + std::to_string(samples.size()));
  }
  std::vector<Neighbor> all;
  all.reserve(samples.size());
  for (const auto& s : samples) all.push_back({&s, haversine_km(s.location, target)});
  const auto keep = std::min(policy.max_neighbors, all.size());
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
    return a.sample->id < b.sample->id;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), closer);
  all.resize(keep);
  return all;
}

double idw_predict(std::span<const Sample> samples, const GeoCoord& target, double power,
                   const NeighborPolicy& policy) {
  if (!(power > 0.0) || !std::isfinite(power)) throw InputError("IDW power must be > 0");
  const auto nb = select_neighbors(samples, target, policy);
  const double anchor = nb.front().sample->value;
  if (nb.front().distance_km < kCoincidenceKm) return anchor;
  // Weighted mean of offsets from the nearest value: constants come out exact.
  double num = 0.0;
  double den = 0.0;
  for (const auto& n : nb) {
    const double w = std::pow(n.distance_km, -power);
    num += w * (n.sample->value - anchor);
    den += w;
  }
  return anchor + num / den;
}

double crs_basis(double r_km, double sigma) {
  if (r_km <= 0.0) return 0.0;
  const double half = sigma * r_km / 2.0;
  return -expint_ein(half * half);
}

double rbf_predict(std::span<const Sample> samples, const GeoCoord& target, double sigma,
                   const NeighborPolicy& policy) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("RBF sigma must be > 0");
  const auto nb = select_neighbors(samples, target, policy);
  check_distinct(nb);

  const double anchor = nb.front().sample->value;
  const auto k = static_cast<Eigen::Index>(nb.size());
  Eigen::MatrixXd phi(k, k);
  Eigen::VectorXd rhs(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    phi(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double v = crs_basis(
          haversine_km(nb[static_cast<std::size_t>(i)].sample->location,
                       nb[static_cast<std::size_t>(j)].sample->location),
          sigma);
      phi(i, j) = v;
      phi(j, i) = v;
    }
    rhs(i) = nb[static_cast<std::size_t>(i)].sample->value - anchor;
  }
  rhs(k) = 0.0;
  const Eigen::VectorXd sol = solve_bordered(phi, rhs, "RBF");

  double out = sol(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out += sol(i) * crs_basis(nb[static_cast<std::size_t>(i)].distance_km, sigma);
  }
  return anchor + out;
}

KrigingSystem ok_system(std::span<const Sample> samples, const GeoCoord& target,
                        const VariogramModel& model, const NeighborPolicy& policy) {
  model.validate();
  auto nb = select_neighbors(samples, target, policy);
  check_distinct(nb);

  VariogramModel unit = model;
  if (model.sill() > 0.0) {
    unit.nugget = model.nugget / model.sill();
    unit.partial_sill = model.partial_sill / model.sill();
  } else {
    unit.nugget = 0.0;
    unit.partial_sill = 1.0;
  }

  const auto k = static_cast<Eigen::Index>(nb.size());
  Eigen::MatrixXd gamma(k, k);
  Eigen::VectorXd rhs(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& si = *nb[static_cast<std::size_t>(i)].sample;
    gamma(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const auto& sj = *nb[static_cast<std::size_t>(j)].sample;
      const double v = gaussian_variogram(haversine_km(si.location, sj.location), unit);
      gamma(i, j) = v;
      gamma(j, i) = v;
    }
    rhs(i) = gaussian_variogram(nb[static_cast<std::size_t>(i)].distance_km, unit);
  }
  rhs(k) = 1.0;
  const Eigen::VectorXd sol = solve_bordered(gamma, rhs, "kriging");

  KrigingSystem sys;
  sys.neighbors = std::move(nb);
  sys.weights.assign(sol.data(), sol.data() + k);
  sys.lagrange = sol(k) * model.sill();
  return sys;
}

double ok_predict(std::span<const Sample> samples, const GeoCoord& target,
                  const VariogramModel& model, const NeighborPolicy& policy) {
  const auto sys = ok_system(samples, target, model, policy);
  // Σλ = 1, so Σλz = z_0 + Σλ(z - z_0); the offset form keeps constants exact.
  const double anchor = sys.neighbors.front().sample->value;
  double out = 0.0;
  for (std::size_t i = 0; i < sys.weights.size(); ++i) {
    out += sys.weights[i] * (sys.neighbors[i].sample->value - anchor);
  }
  return anchor + out;
}

std::string_view to_string(Method m) {
  switch (m) {
  case Method::IDW: return "IDW";
  case Method::RBF: return "RBF";
  case Method::OK: return "OK";
  }
  throw InternalError("unknown method");
}

std::optional<Method> parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "idw") return Method::IDW;
  if (lower == "rbf") return Method::RBF;
  if (lower == "ok") return Method::OK;
  return std::nullopt;
}

void MethodParams::validate() const {
  if (!(idw_power > 0.0) || !std::isfinite(idw_power)) throw InputError("IDW power must be > 0");
  if (!(rbf_sigma > 0.0) || !std::isfinite(rbf_sigma)) throw InputError("RBF sigma must be > 0");
  if (!(lag_size_km > 0.0) || n_lags == 0) throw InputError("lag size and lag count must be > 0");
  variogram.validate();
  neighbors.validate();
}

double ok_full_predict(std::span<const Sample> samples, const GeoCoord& target,
                       const MethodParams& params) {
  const auto detrended = detrend_first_order(samples);
  const auto emp = empirical_variogram(detrended.residuals, params.lag_size_km, params.n_lags);
  const auto model = fit_variogram(emp, params.variogram.range_km);
  const double residual = ok_predict(detrended.residuals, target, model, params.neighbors);
  return detrended.trend.at(target) + residual;
}

double predict(Method method, std::span<const Sample> samples, const GeoCoord& target,
               const MethodParams& params) {
  switch (method) {
  case Method::IDW: return idw_predict(samples, target, params.idw_power, params.neighbors);
  case Method::RBF: return rbf_predict(samples, target, params.rbf_sigma, params.neighbors);
  case Method::OK: return ok_full_predict(samples, target, params);
  }
  throw InternalError("unknown method");
}

} // namespace roadnet
