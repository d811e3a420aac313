#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roadnet/ingest.hpp"
#include "roadnet/interpolate.hpp"

namespace roadnet {

/// sqrt(Σe²/n). Throws InputError on an empty list.
double rms(std::span<const double> errors);

/// Joins readings with station locations, ordered by station id.
/// Throws InputError for a reading whose station is not in `stations`.
std::vector<Sample> make_samples(const ObservationSet& obs, std::span<const Station> stations);

struct StationError {
  std::string station_id;
  double observed = 0.0;
  double predicted = 0.0;
  double error = 0.0; ///< predicted - observed
};

struct CrossValReport {
  Method method = Method::IDW;
  Variable variable = Variable::AirTempC;
  std::string timestamp;
  std::vector<StationError> per_station;
  double rms = 0.0;
  MethodParams params;
};

/// Leave-one-out errors over `samples` in their given order. Folds may run on
/// `threads` workers (0 = hardware concurrency); output does not depend on it.
std::vector<StationError> loocv_errors(Method method, std::span<const Sample> samples,
                                       const MethodParams& params, unsigned threads = 1);

CrossValReport loocv(Method method, const ObservationSet& obs, std::span<const Station> stations,
                     const MethodParams& params, unsigned threads = 1);

struct SearchInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Search ranges used when none is given: IDW power [0.5, 4],
/// RBF sigma [0.001, 1] per km.
SearchInterval default_search(Method method);

inline constexpr std::size_t kGridCandidates = 15;
inline constexpr int kGoldenIterations = 20;

struct OptimizationResult {
  MethodParams params; ///< `base` with the tuned parameter replaced
  double value = 0.0;  ///< the tuned parameter
  double rms = 0.0;    ///< LOOCV rms at `value`
};

/// Tunes the IDW power (linear grid) or RBF sigma (log grid) by LOOCV rms:
/// 15-point grid, then 20 golden-section steps inside the cells adjacent to
/// the best grid point. Ties go to the smaller parameter, and the refinement
/// only replaces the grid optimum when strictly better. OK has no tunable
/// parameter here and is rejected with InputError.
OptimizationResult optimize_parameter(Method method, const ObservationSet& obs,
                                      std::span<const Station> stations, const MethodParams& base,
                                      SearchInterval search, unsigned threads = 1);
OptimizationResult optimize_parameter(Method method, std::span<const Sample> samples,
                                      const MethodParams& base, SearchInterval search,
                                      unsigned threads = 1);

struct SummaryStats {
  Variable variable = Variable::AirTempC;
  std::string timestamp;
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;             ///< sample (n - 1) standard deviation
  std::optional<double> cv_percent; ///< only when mean > 0
};

SummaryStats summary_stats(const ObservationSet& obs);
SummaryStats summary_stats(std::span<const double> values);

struct RmsCell {
  Method method = Method::IDW;
  Variable variable = Variable::AirTempC;
  std::string timestamp;
  double rms = 0.0;
  std::optional<double> optimized_param; ///< empty for OK
};

/// Every method × observation set, in set-major order. IDW and RBF are tuned
/// with optimize_parameter over default_search; OK runs with `base` as given.
std::vector<RmsCell> compare_methods(std::span<const ObservationSet> obs_sets,
                                     std::span<const Station> stations,
                                     std::span<const Method> methods, const MethodParams& base = {},
                                     unsigned threads = 1);

} // namespace roadnet
