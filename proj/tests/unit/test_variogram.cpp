#include <cmath>
#include <cstdint>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "roadnet/errors.hpp"
#include "roadnet/evaluate.hpp"
#include "roadnet/interpolate.hpp"

namespace roadnet {
namespace {

using testing::kOntario;

GeoCoord at_km(double east, double north = 0.0) { return unproject({east, north}, kOntario); }

double plane(const GeoCoord& p) {
  const auto q = project(p, kOntario);
  return 2.0 + 0.1 * q.x - 0.3 * q.y;
}

// Empirical variogram -------------------------------------------------------

TEST(EmpiricalVariogram, ConstantFieldIsZero) {
  std::mt19937_64 gen(61);
  auto s = testing::samples_at(testing::uniform_locations(40, 150, gen));
  for (auto& x : s) x.value = 4.0;
  const auto emp = empirical_variogram(s);
  EXPECT_GT(emp.occupied_bins(), 5u);
  for (const auto& lag : emp.lags) EXPECT_EQ(lag.gamma_hat, 0.0);
}

TEST(EmpiricalVariogram, SinglePairLandsInFirstBin) {
  std::vector<Sample> s{{"A", at_km(0), 1.0}, {"B", at_km(5), 3.0}};
  const auto emp = empirical_variogram(s, 10.0, 20);
  ASSERT_EQ(emp.lags.size(), 20u);
  EXPECT_EQ(emp.lags[0].pair_count, 1u);
  EXPECT_DOUBLE_EQ(emp.lags[0].gamma_hat, 2.0);
  EXPECT_NEAR(emp.lags[0].mean_h, 5.0, 1e-6);
  EXPECT_EQ(emp.occupied_bins(), 1u);
}

TEST(EmpiricalVariogram, BinningAndRangeCutoff) {
  const double deg_per_km = 180.0 / (std::numbers::pi * kEarthRadiusKm);
  std::vector<Sample> s{{"A", {0, 0}, 0.0},
                        {"B", {0, 25 * deg_per_km}, 1.0},
                        {"C", {0, 390 * deg_per_km}, 2.0},
                        {"D", {0, -12 * deg_per_km}, 5.0}};
  const auto emp = empirical_variogram(s, 20.0, 20);
  // A-B 25, A-C 390, B-C 365, A-D 12, B-D 37; C-D at 402 km is past the last lag.
  std::size_t total = 0;
  for (const auto& lag : emp.lags) total += lag.pair_count;
  EXPECT_EQ(total, 5u);
  EXPECT_EQ(emp.lags[0].pair_count, 1u);
  EXPECT_EQ(emp.lags[1].pair_count, 2u);
  EXPECT_EQ(emp.lags[18].pair_count, 1u);
  EXPECT_EQ(emp.lags[19].pair_count, 1u);
  EXPECT_DOUBLE_EQ(emp.lags[1].gamma_hat, (1.0 + 16.0) / 4.0);
  EXPECT_DOUBLE_EQ(emp.lags[0].gamma_hat, 12.5);
}

TEST(EmpiricalVariogram, PairWeightedMeanIsSampleVariance) {
  // Σ_{i<j} (z_i - z_j)²/2 = n(n-1)s²/2, so with every pair inside the lag
  // range the pair-weighted mean of γ̂ is exactly the sample variance.
  std::mt19937_64 gen(62);
  auto s = testing::samples_at(testing::uniform_locations(200, 100, gen));
  std::vector<double> z;
  for (auto& x : s) z.push_back(x.value = testing::normal01(gen));
  const auto emp = empirical_variogram(s);
  double num = 0.0, den = 0.0;
  for (const auto& lag : emp.lags) {
    num += static_cast<double>(lag.pair_count) * lag.gamma_hat;
    den += static_cast<double>(lag.pair_count);
  }
  EXPECT_EQ(den, 200.0 * 199.0 / 2.0);
  const double var = summary_stats(z).std_dev;
  EXPECT_NEAR(num / den, var * var, 1e-12);
}

TEST(EmpiricalVariogram, IidNoiseAveragesToUnitSill) {
  std::mt19937_64 gen(63);
  const int reps = 50;
  std::vector<double> mean(20, 0.0);
  std::vector<std::size_t> min_pairs(20, SIZE_MAX);
  for (int r = 0; r < reps; ++r) {
    auto s = testing::samples_at(testing::uniform_locations(200, 250, gen));
    for (auto& x : s) x.value = testing::normal01(gen);
    const auto emp = empirical_variogram(s);
    for (std::size_t k = 0; k < 20; ++k) {
      mean[k] += emp.lags[k].gamma_hat / reps;
      min_pairs[k] = std::min(min_pairs[k], emp.lags[k].pair_count);
    }
  }
  for (std::size_t k = 0; k < 20; ++k) {
    if (min_pairs[k] < 30) continue;
    EXPECT_NEAR(mean[k], 1.0, 0.1) << "bin " << k;
  }
}

TEST(EmpiricalVariogram, RequiresTwoSamples) {
  std::vector<Sample> s{{"A", at_km(0), 1.0}};
  EXPECT_THROW(empirical_variogram(s), InputError);
}

// Model --------------------------------------------------------------------

TEST(GaussianVariogram, Values) {
  const VariogramModel m{0.0, 2.0, 100.0};
  EXPECT_EQ(gaussian_variogram(0.0, m), 0.0);
  EXPECT_NEAR(gaussian_variogram(100.0, m), 1.9004258632642721, 1e-15);
  EXPECT_NEAR(gaussian_variogram(1e4, {0.5, 2.0, 100.0}), 2.5, 1e-15);
  // Nugget applies just off the origin.
  EXPECT_NEAR(gaussian_variogram(1e-9, {0.5, 2.0, 100.0}), 0.5, 1e-12);
}

TEST(GaussianVariogram, NonDecreasingAndBounded) {
  const VariogramModel m{0.3, 1.7, 60.0};
  double prev = 0.0;
  for (double h = 0.0; h < 500.0; h += 0.5) {
    const double g = gaussian_variogram(h, m);
    EXPECT_GE(g, prev);
    EXPECT_LE(g, m.sill());
    prev = g;
  }
}

TEST(VariogramModel, Validation) {
  EXPECT_THROW((VariogramModel{-0.1, 1, 100}.validate()), InputError);
  EXPECT_THROW((VariogramModel{0, -1, 100}.validate()), InputError);
  EXPECT_THROW((VariogramModel{0, 1, 0}.validate()), InputError);
}

// Fit ---------------------------------------------------------------------

EmpiricalVariogram synthetic(const VariogramModel& m, std::mt19937_64* gen = nullptr) {
  EmpiricalVariogram emp;
  emp.lags.resize(emp.n_lags);
  for (std::size_t k = 0; k < emp.n_lags; ++k) {
    auto& lag = emp.lags[k];
    lag.h_lo = 10.0 * static_cast<double>(k);
    lag.h_hi = lag.h_lo + 10.0;
    lag.mean_h = lag.h_lo + (gen ? 10.0 * uniform01(*gen) : 5.0);
    lag.pair_count = gen ? 1 + (*gen)() % 200 : 50;
    lag.gamma_hat = gaussian_variogram(lag.mean_h, m);
  }
  return emp;
}

TEST(FitVariogram, RoundTripsExactModelData) {
  std::mt19937_64 gen(63);
  const VariogramModel truth{0.5, 2.0, 100.0};
  for (auto* g : {static_cast<std::mt19937_64*>(nullptr), &gen}) {
    const auto fit = fit_variogram(synthetic(truth, g));
    EXPECT_NEAR(fit.nugget, 0.5, 1e-6);
    EXPECT_NEAR(fit.partial_sill, 2.0, 1e-6);
    EXPECT_EQ(fit.range_km, 100.0);
  }
}

TEST(FitVariogram, ConstantFieldGivesZeroModel) {
  const auto fit = fit_variogram(synthetic({0.0, 0.0, 100.0}));
  EXPECT_EQ(fit.nugget, 0.0);
  EXPECT_EQ(fit.partial_sill, 0.0);
}

TEST(FitVariogram, ClampsNegativeNuggetToFace) {
  // Data above the model shape at long lags and below it at short lags
  // drives the free intercept negative.
  auto emp = synthetic({0.0, 1.0, 100.0});
  for (auto& lag : emp.lags) lag.gamma_hat = 1.3 * lag.gamma_hat - 0.1;
  for (auto& lag : emp.lags) lag.gamma_hat = std::max(0.0, lag.gamma_hat);
  const auto fit = fit_variogram(emp);
  EXPECT_EQ(fit.nugget, 0.0);
  EXPECT_GT(fit.partial_sill, 0.0);
}

TEST(FitVariogram, EqualBinsBeatAnySingleParameterFit) {
  auto emp = synthetic({0.0, 1.0, 100.0});
  for (auto& lag : emp.lags) lag.gamma_hat = 0.7;
  const auto fit = fit_variogram(emp);
  auto sse = [&](double c0, double c) {
    double e = 0.0;
    for (const auto& lag : emp.lags) {
      const double r = lag.gamma_hat - gaussian_variogram(lag.mean_h, {c0, c, 100.0});
      e += static_cast<double>(lag.pair_count) * r * r;
    }
    return e;
  };
  const double best = sse(fit.nugget, fit.partial_sill);
  for (double v = 0.0; v <= 2.0; v += 0.01) {
    EXPECT_LE(best, sse(v, 0.0) + 1e-12);
    EXPECT_LE(best, sse(0.0, v) + 1e-12);
  }
}

TEST(FitVariogram, NeedsTwoOccupiedBins) {
  std::vector<Sample> s{{"A", at_km(0), 1.0}, {"B", at_km(5), 3.0}};
  EXPECT_THROW(fit_variogram(empirical_variogram(s)), InputError);
}

// Trend -------------------------------------------------------------------

TEST(Detrend, ExactPlane) {
  std::mt19937_64 gen(64);
  auto s = testing::samples_at(testing::uniform_locations(30, 200, gen));
  for (auto& x : s) x.value = plane(x.location);
  const auto d = detrend_first_order(s);
  for (const auto& r : d.residuals) EXPECT_LE(std::abs(r.value), 1e-9);
  const GeoCoord t = at_km(33, -71);
  EXPECT_NEAR(d.trend.at(t), plane(t), 1e-9);
}

TEST(Detrend, ConstantField) {
  std::mt19937_64 gen(65);
  auto s = testing::samples_at(testing::uniform_locations(12, 100, gen));
  for (auto& x : s) x.value = 7.5;
  const auto d = detrend_first_order(s);
  EXPECT_NEAR(d.trend.b0, 7.5, 1e-12);
  EXPECT_NEAR(d.trend.b1, 0.0, 1e-12);
  EXPECT_NEAR(d.trend.b2, 0.0, 1e-12);
}

TEST(Detrend, ResidualsOrthogonalToDesign) {
  std::mt19937_64 gen(66);
  auto s = testing::samples_at(testing::uniform_locations(25, 200, gen));
  for (auto& x : s) x.value = plane(x.location);
  s[7].value += 12.0;
  const auto d = detrend_first_order(s);
  double s1 = 0, sx = 0, sy = 0, scale = 0;
  for (const auto& r : d.residuals) {
    const auto q = project(r.location, d.trend.ref);
    s1 += r.value;
    sx += r.value * q.x;
    sy += r.value * q.y;
    scale = std::max(scale, std::abs(q.x) + std::abs(q.y));
  }
  EXPECT_NEAR(s1, 0.0, 1e-8);
  EXPECT_NEAR(sx / scale, 0.0, 1e-8);
  EXPECT_NEAR(sy / scale, 0.0, 1e-8);
}

TEST(Detrend, CollinearLocationsAreRankDeficient) {
  std::vector<Sample> s;
  for (int i = 0; i < 6; ++i) s.push_back({testing::station_id("S", i), {0.0, 0.1 * i}, 1.0 * i});
  EXPECT_THROW(detrend_first_order(s), NumericalError);
  std::vector<Sample> two{{"A", at_km(0), 0}, {"B", at_km(1), 0}};
  EXPECT_THROW(detrend_first_order(two), NumericalError);
}

// Full kriging pipeline ------------------------------------------------------

TEST(OkFull, PlaneIsReproduced) {
  std::mt19937_64 gen(67);
  auto s = testing::samples_at(testing::uniform_locations(40, 200, gen));
  for (auto& x : s) x.value = plane(x.location);
  for (const auto& t : testing::uniform_locations(20, 200, gen)) {
    EXPECT_NEAR(ok_full_predict(s, t, {}), plane(t), 1e-6);
  }
}

TEST(OkFull, ConstantIsReproduced) {
  std::mt19937_64 gen(68);
  auto s = testing::samples_at(testing::uniform_locations(30, 200, gen));
  for (auto& x : s) x.value = -12.0;
  for (const auto& t : testing::uniform_locations(10, 200, gen)) {
    EXPECT_NEAR(ok_full_predict(s, t, {}), -12.0, 1e-9);
  }
}

TEST(OkFull, BeatsTrendOnlyOnPlanePlusProcess) {
  std::mt19937_64 gen(69);
  int wins = 0;
  for (int rep = 0; rep < 5; ++rep) {
    auto all = testing::samples_at(testing::uniform_locations(100, 300, gen));
    testing::fill_gaussian_process(all, 60.0, gen);
    for (auto& x : all) x.value += plane(x.location);
    const std::vector<Sample> train(all.begin(), all.begin() + 80);
    const auto trend = detrend_first_order(train).trend;
    double e_ok = 0.0, e_trend = 0.0;
    for (std::size_t i = 80; i < all.size(); ++i) {
      e_ok += std::pow(ok_full_predict(train, all[i].location, {}) - all[i].value, 2);
      e_trend += std::pow(trend.at(all[i].location) - all[i].value, 2);
    }
    wins += e_ok < e_trend;
  }
  EXPECT_EQ(wins, 5);
}

} // namespace
} // namespace roadnet
