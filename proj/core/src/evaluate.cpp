#include "roadnet/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "roadnet/errors.hpp"

namespace roadnet {

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += workers) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double& tuned_field(Method method, MethodParams& p) {
  switch (method) {
  case Method::IDW: return p.idw_power;
  case Method::RBF: return p.rbf_sigma;
  case Method::OK: break;
  }
  throw InputError("OK parameters are fixed; nothing to optimize");
}

} // namespace

double rms(std::span<const double> errors) {
  if (errors.empty()) throw InputError("rms of an empty error list");
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

std::vector<Sample> make_samples(const ObservationSet& obs, std::span<const Station> stations) {
  std::unordered_map<std::string, const Station*> by_id;
  for (const auto& s : stations) by_id.emplace(s.id, &s);
  std::vector<Sample> out;
  out.reserve(obs.readings.size());
  for (const auto& [id, value] : obs.readings) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError("reading for unknown station '" + id + "'");
    out.push_back({id, it->second->location, value});
  }
  return out;
}

std::vector<StationError> loocv_errors(Method method, std::span<const Sample> samples,
                                       const MethodParams& params, unsigned threads) {
  params.validate();
  if (samples.size() < params.neighbors.min_neighbors + 1) {
    throw InputError("cross-validation needs at least " +
                     std::to_string(params.neighbors.min_neighbors + 1) + " readings, have " +
                     std::to_string(samples.size()));
  }
  std::vector<StationError> out(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    std::vector<Sample> rest;
    rest.reserve(samples.size() - 1);
    for (std::size_t j = 0; j < samples.size(); ++j)
      if (j != i) rest.push_back(samples[j]);
    const double predicted = predict(method, rest, samples[i].location, params);
    out[i] = {samples[i].id, samples[i].value, predicted, predicted - samples[i].value};
  });
  return out;
}

CrossValReport loocv(Method method, const ObservationSet& obs, std::span<const Station> stations,
                     const MethodParams& params, unsigned threads) {
  const auto samples = make_samples(obs, stations);
  CrossValReport report;
  report.method = method;
  report.variable = obs.variable;
  report.timestamp = obs.timestamp;
  report.params = params;
  report.per_station = loocv_errors(method, samples, params, threads);
  std::vector<double> errors;
  errors.reserve(report.per_station.size());
  for (const auto& e : report.per_station) errors.push_back(e.error);
  report.rms = rms(errors);
  return report;
}

SearchInterval default_search(Method method) {
  switch (method) {
  case Method::IDW: return {0.5, 4.0};
  case Method::RBF: return {0.001, 1.0};
  case Method::OK: break;
  }
  throw InputError("OK parameters are fixed; no search interval");
}

OptimizationResult optimize_parameter(Method method, const ObservationSet& obs,
                                      std::span<const Station> stations, const MethodParams& base,
                                      SearchInterval search, unsigned threads) {
  const auto samples = make_samples(obs, stations);
  return optimize_parameter(method, samples, base, search, threads);
}

OptimizationResult optimize_parameter(Method method, std::span<const Sample> samples,
                                      const MethodParams& base, SearchInterval search,
                                      unsigned threads) {
  MethodParams params = base;
  double& knob = tuned_field(method, params);
  if (!(search.lo < search.hi) || !std::isfinite(search.lo) || !std::isfinite(search.hi) ||
      !(search.lo > 0.0)) {
    throw InputError("search interval must satisfy 0 < lo < hi");
  }

  // Sigma is searched on a log scale, the power linearly.
  const bool log_scale = method == Method::RBF;
  auto to_param = [&](double u) { return log_scale ? std::exp(u) : u; };
  const double u_lo = log_scale ? std::log(search.lo) : search.lo;
  const double u_hi = log_scale ? std::log(search.hi) : search.hi;

  // RMS differences at round-off level of the data count as ties.
  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, std::abs(s.value));
  const double tie_tol = 1e-12 * std::max(scale, 1e-300);

  auto score = [&](double param) {
    knob = param;
    const auto errs = loocv_errors(method, samples, params, threads);
    std::vector<double> e;
    e.reserve(errs.size());
    for (const auto& x : errs) e.push_back(x.error);
    return rms(e);
  };

  std::vector<double> grid(kGridCandidates);
  std::vector<double> grid_rms(kGridCandidates);
  std::size_t best = 0;
  for (std::size_t i = 0; i < kGridCandidates; ++i) {
    const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) /
                                static_cast<double>(kGridCandidates - 1);
    grid[i] = (i == kGridCandidates - 1) ? u_hi : u;
    grid_rms[i] = score(to_param(grid[i]));
    if (grid_rms[i] < grid_rms[best] - tie_tol) best = i;
  }

  double best_u = grid[best];
  double best_rms = grid_rms[best];

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, kGridCandidates - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = score(to_param(c));
  double fd = score(to_param(d));
  double cand_u = fc <= fd ? c : d;
  double cand_rms = std::min(fc, fd);
  for (int it = 2; it < kGoldenIterations; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = score(to_param(c));
      if (fc < cand_rms || (fc == cand_rms && c < cand_u)) {
        cand_u = c;
        cand_rms = fc;
      }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = score(to_param(d));
      if (fd < cand_rms || (fd == cand_rms && d < cand_u)) {
        cand_u = d;
        cand_rms = fd;
      }
    }
  }
  if (cand_rms < best_rms - tie_tol) {
    best_u = cand_u;
    best_rms = cand_rms;
  }

  knob = to_param(best_u);
  return {params, knob, best_rms};
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.size() < 2) throw InputError("summary statistics need at least 2 readings");
  SummaryStats s;
  s.n = values.size();
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(ss / (n - 1.0));
  if (s.mean > 0.0) s.cv_percent = 100.0 * s.std_dev / s.mean;
  return s;
}

SummaryStats summary_stats(const ObservationSet& obs) {
  std::vector<double> values;
  values.reserve(obs.readings.size());
  for (const auto& [id, v] : obs.readings) values.push_back(v);
  auto s = summary_stats(values);
  s.variable = obs.variable;
  s.timestamp = obs.timestamp;
  return s;
}

std::vector<RmsCell> compare_methods(std::span<const ObservationSet> obs_sets,
                                     std::span<const Station> stations,
                                     std::span<const Method> methods, const MethodParams& base,
                                     unsigned threads) {
  std::vector<RmsCell> cells;
  for (const auto& obs : obs_sets) {
    const auto samples = make_samples(obs, stations);
    for (const auto method : methods) {
      RmsCell cell{method, obs.variable, obs.timestamp, 0.0, std::nullopt};
      if (method == Method::OK) {
        const auto errs = loocv_errors(method, samples, base, threads);
        std::vector<double> e;
        for (const auto& x : errs) e.push_back(x.error);
        cell.rms = rms(e);
      } else {
        const auto opt = optimize_parameter(method, samples, base, default_search(method), threads);
        cell.rms = opt.rms;
        cell.optimized_param = opt.value;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

} // namespace roadnet
