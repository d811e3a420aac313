#include "roadnet/interpolate.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "roadnet/errors.hpp"

namespace roadnet {

void VariogramModel::validate() const {
  if (!std::isfinite(nugget) || nugget < 0.0) throw InputError("variogram nugget must be >= 0");
  if (!std::isfinite(partial_sill) || partial_sill < 0.0) {
    throw InputError("variogram partial sill must be >= 0");
  }
  if (!std::isfinite(range_km) || range_km <= 0.0) {
    throw InputError("variogram range must be > 0");
  }
}

double gaussian_variogram(double h_km, const VariogramModel& model) {
  if (h_km <= 0.0) return 0.0;
  const double r = h_km / model.range_km;
  return model.nugget + model.partial_sill * (1.0 - std::exp(-3.0 * r * r));
}

std::size_t EmpiricalVariogram::occupied_bins() const {
  std::size_t n = 0;
  for (const auto& lag : lags)
    if (lag.occupied()) ++n;
  return n;
}

EmpiricalVariogram empirical_variogram(std::span<const Sample> samples, double lag_size_km,
                                       std::size_t n_lags) {
  if (samples.size() < 2) throw InputError("empirical variogram needs at least 2 samples");
  if (!(lag_size_km > 0.0) || n_lags == 0) throw InputError("lag size and lag count must be > 0");

  EmpiricalVariogram emp;
  emp.lag_size_km = lag_size_km;
  emp.n_lags = n_lags;
  emp.lags.resize(n_lags);
  std::vector<double> sum_h(n_lags, 0.0);
  std::vector<double> sum_sq(n_lags, 0.0);
  for (std::size_t k = 0; k < n_lags; ++k) {
    emp.lags[k].h_lo = lag_size_km * static_cast<double>(k);
    emp.lags[k].h_hi = lag_size_km * static_cast<double>(k + 1);
  }

  const double h_max = lag_size_km * static_cast<double>(n_lags);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double h = haversine_km(samples[i].location, samples[j].location);
      if (h <= 0.0 || h > h_max) continue;
      // Bins are half-open on the left: (lo, hi].
      auto k = static_cast<std::size_t>(std::ceil(h / lag_size_km)) - 1;
      k = std::min(k, n_lags - 1);
      const double dz = samples[i].value - samples[j].value;
      sum_h[k] += h;
      sum_sq[k] += dz * dz;
      ++emp.lags[k].pair_count;
    }
  }
  for (std::size_t k = 0; k < n_lags; ++k) {
    auto& lag = emp.lags[k];
    if (lag.pair_count == 0) continue;
    const auto n = static_cast<double>(lag.pair_count);
    lag.mean_h = sum_h[k] / n;
    lag.gamma_hat = sum_sq[k] / (2.0 * n);
  }
  return emp;
}

VariogramModel fit_variogram(const EmpiricalVariogram& emp, double range_km) {
  if (!(range_km > 0.0)) throw InputError("variogram range must be > 0");
  if (emp.occupied_bins() < 2) {
    throw InputError("variogram fit needs at least 2 occupied lag bins, found " +
                     std::to_string(emp.occupied_bins()));
  }

  VariogramModel shape{0.0, 1.0, range_km};
  double w_sum = 0.0, s_mean = 0.0, g_mean = 0.0;
  for (const auto& lag : emp.lags) {
    if (!lag.occupied()) continue;
    const auto w = static_cast<double>(lag.pair_count);
    w_sum += w;
    s_mean += w * gaussian_variogram(lag.mean_h, shape);
    g_mean += w * lag.gamma_hat;
  }
  s_mean /= w_sum;
  g_mean /= w_sum;

  double s_var = 0.0, sg_cov = 0.0, s_sq = 0.0, sg = 0.0;
  for (const auto& lag : emp.lags) {
    if (!lag.occupied()) continue;
    const auto w = static_cast<double>(lag.pair_count);
    const double s = gaussian_variogram(lag.mean_h, shape);
    s_var += w * (s - s_mean) * (s - s_mean);
    sg_cov += w * (s - s_mean) * (lag.gamma_hat - g_mean);
    s_sq += w * s * s;
    sg += w * s * lag.gamma_hat;
  }

  auto sse = [&](double c0, double c) {
    double e = 0.0;
    for (const auto& lag : emp.lags) {
      if (!lag.occupied()) continue;
      const double r = lag.gamma_hat - c0 - c * gaussian_variogram(lag.mean_h, shape);
      e += static_cast<double>(lag.pair_count) * r * r;
    }
    return e;
  };

  // Two-variable NNLS: the optimum is the unconstrained solution if feasible,
  // otherwise the best of the faces c = 0 and c0 = 0.
  struct Candidate {
    double c0, c;
  };
  std::vector<Candidate> candidates;
  if (s_var > 1e-14 * w_sum) {
    const double c = sg_cov / s_var;
    const double c0 = g_mean - c * s_mean;
    if (c >= 0.0 && c0 >= 0.0) candidates.push_back({c0, c});
  }
  candidates.push_back({g_mean, 0.0});
  if (s_sq > 0.0) candidates.push_back({0.0, std::max(0.0, sg / s_sq)});

  Candidate best = candidates.front();
  double best_sse = sse(best.c0, best.c);
  for (const auto& cand : candidates) {
    const double e = sse(cand.c0, cand.c);
    if (e < best_sse) {
      best = cand;
      best_sse = e;
    }
  }
  return {std::max(0.0, best.c0), std::max(0.0, best.c), range_km};
}

double TrendSurface::at(const GeoCoord& p) const {
  const auto q = project(p, ref);
  return b0 + b1 * q.x + b2 * q.y;
}

Detrended detrend_first_order(std::span<const Sample> samples) {
  if (samples.size() < 3) throw NumericalError("first-order trend needs at least 3 samples");

  std::vector<GeoCoord> locs;
  locs.reserve(samples.size());
  for (const auto& s : samples) locs.push_back(s.location);
  const GeoCoord ref = centroid(locs);

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    const auto q = project(s.location, ref);
    design(i, 0) = 1.0;
    design(i, 1) = q.x;
    design(i, 2) = q.y;
    z(i) = s.value;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) {
    throw NumericalError("first-order trend is rank deficient: sample locations are collinear");
  }
  const Eigen::Vector3d beta = qr.solve(z);

  Detrended out;
  out.trend = {ref, beta(0), beta(1), beta(2)};
  out.residuals.assign(samples.begin(), samples.end());
  const Eigen::VectorXd fitted = design * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.residuals[static_cast<std::size_t>(i)].value = z(i) - fitted(i);
  }
  return out;
}

} // namespace roadnet
