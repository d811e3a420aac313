#include "roadnet/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <unordered_set>

#include <CLI11.hpp>

#include "roadnet/csv.hpp"
#include "roadnet/errors.hpp"
#include "roadnet/evaluate.hpp"
#include "roadnet/ingest.hpp"
#include "roadnet/point_pattern.hpp"
#include "roadnet/report.hpp"

namespace roadnet::cli {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kTargetsHeader = "target_id,lat,lon";
constexpr std::string_view kMethodChoices = "idw, rbf, ok, all";
constexpr std::string_view kVariableChoices = "air_temp_C, wind_speed_kmh, pressure_kPa";

struct Target {
  std::string id;
  GeoCoord location;
};

struct CommonOutput {
  bool json = false;
};

struct NeighborFlags {
  std::size_t min_neighbors = 3;
  std::size_t max_neighbors = 6;
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw InputError("file not found: " + p.string());
}

std::vector<Station> load_registries(const std::vector<fs::path>& paths) {
  std::vector<std::vector<Station>> regs;
  for (const auto& p : paths) {
    require_file(p);
    regs.push_back(load_stations(p));
  }
  if (regs.size() == 1) return std::move(regs.front());
  return merge_networks(regs);
}

std::vector<Target> load_targets(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  csv::Reader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f) || csv::join(f) != kTargetsHeader) {
    throw InputError(path.string() + ": header must be exactly '" + std::string(kTargetsHeader) +
                     "'");
  }
  std::vector<Target> targets;
  std::unordered_set<std::string> seen;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    const auto at = path.string() + ":" + std::to_string(reader.line()) + ": ";
    double lat = 0.0, lon = 0.0;
    if (f.size() != 3 || f[0].empty() || !csv::parse_double(f[1], lat) ||
        !csv::parse_double(f[2], lon)) {
      throw InputError(at + "malformed target row");
    }
    if (!seen.insert(f[0]).second) throw InputError(at + "duplicate target_id '" + f[0] + "'");
    try {
      targets.push_back({f[0], GeoCoord::checked(lat, lon)});
    } catch (const InputError& e) {
      throw InputError(at + e.what());
    }
  }
  return targets;
}

std::vector<Method> parse_methods(const std::string& text) {
  if (text == "all" || text == "ALL") return {Method::IDW, Method::RBF, Method::OK};
  const auto m = parse_method(text);
  if (!m) {
    throw InputError("unknown method '" + text + "' (valid: " + std::string(kMethodChoices) + ")");
  }
  return {*m};
}

Variable parse_variable_or_throw(const std::string& text) {
  const auto v = parse_variable(text);
  if (!v) {
    throw InputError("unknown variable '" + text + "' (valid: " + std::string(kVariableChoices) +
                     ")");
  }
  return *v;
}

MethodParams make_params(const NeighborFlags& nf) {
  MethodParams p;
  p.neighbors = {nf.min_neighbors, nf.max_neighbors};
  return p;
}

fs::path with_suffix(const std::string& prefix, std::string_view suffix) {
  return fs::path(prefix + std::string(suffix));
}

void add_neighbor_flags(CLI::App* cmd, NeighborFlags& nf) {
  cmd->add_option("--min-neighbors", nf.min_neighbors, "Minimum neighbors per prediction")
      ->capture_default_str();
  cmd->add_option("--max-neighbors", nf.max_neighbors, "Maximum neighbors per prediction")
      ->capture_default_str();
}

// coverage ---------------------------------------------------------------------

struct CoverageConfig {
  std::vector<fs::path> stations;
  fs::path regions;
  std::string out_prefix;
  double dedupe_radius_km = 0.0;
};

int cmd_coverage(const CoverageConfig& cfg, std::ostream& out) {
  require_file(cfg.regions);
  auto stations = load_registries(cfg.stations);
  if (cfg.dedupe_radius_km > 0.0) stations = dedupe_within_radius(stations, cfg.dedupe_radius_km);
  const auto regions = load_regions(cfg.regions);

  std::vector<NetworkRegistry> registries;
  for (auto n : {Network::RWIS, Network::MtoCamera, Network::EnvCanada}) {
    auto subset = filter_network(stations, n);
    if (!subset.empty()) registries.push_back({std::string(to_string(n)), std::move(subset)});
  }
  if (registries.empty()) throw InputError("no stations loaded");
  const auto unions = base_unions(registries.size());
  const auto rep = coverage_report(registries, regions, unions);

  report::write_file_atomic(with_suffix(cfg.out_prefix, "_coverage.csv"), report::coverage_csv(rep));
  report::write_file_atomic(with_suffix(cfg.out_prefix, "_coverage.json"),
                            report::coverage_json(rep));
  for (const auto& row : rep.rows) {
    out << row.label << ": " << row.count_total << " stations, mean NN "
        << csv::format_double(row.mean_nn_km) << " km, " << row.count_in_regions
        << " in regions\n";
  }
  return kOk;
}

// pattern ----------------------------------------------------------------------

struct PatternConfig {
  std::vector<fs::path> stations;
  std::string network;
  std::size_t sims = kDefaultSimulations;
  std::uint64_t seed = 42;
  std::size_t bins = 40;
  std::string out_prefix;
  bool svg = false;
  bool json = false;
  unsigned threads = 1;
};

int cmd_pattern(const PatternConfig& cfg, std::ostream& out) {
  auto stations = load_registries(cfg.stations);
  std::string label = "all stations";
  if (!cfg.network.empty()) {
    const auto n = parse_network(cfg.network);
    if (!n) {
      throw InputError("unknown network '" + cfg.network +
                       "' (valid: RWIS, MTO_CAMERA, ENV_CANADA)");
    }
    stations = filter_network(stations, *n);
    label = cfg.network;
  }
  if (stations.size() < 2) throw InputError("L-function analysis needs at least 2 stations");

  const auto locs = locations(stations);
  const auto pts = project(locs, centroid(locs));
  const auto window = default_window(pts);
  const auto distances = default_distance_grid(window, cfg.bins);
  const auto result = analyze_l_function(pts, window, distances, cfg.sims, cfg.seed, cfg.threads);

  report::write_file_atomic(with_suffix(cfg.out_prefix, "_lfunction.csv"),
                            report::lfunction_csv(result));
  if (cfg.json) {
    report::write_file_atomic(with_suffix(cfg.out_prefix, "_lfunction.json"),
                              report::lfunction_json(result));
  }
  if (cfg.svg) {
    report::write_file_atomic(with_suffix(cfg.out_prefix, "_lfunction.svg"),
                              report::lfunction_svg(result, "L-function: " + label));
  }
  const auto verdicts = cluster_verdict(result);
  const auto clustered = std::count(verdicts.begin(), verdicts.end(), Verdict::Clustered);
  out << label << ": " << stations.size() << " stations, " << clustered << "/" << verdicts.size()
      << " bands clustered\n";
  return kOk;
}

// interp -----------------------------------------------------------------------

struct InterpConfig {
  std::vector<fs::path> stations;
  fs::path obs;
  fs::path targets;
  std::string method;
  std::string variable;
  std::string timestamp;
  fs::path out;
  bool json = false;
  double idw_power = MethodParams{}.idw_power;
  double rbf_sigma = MethodParams{}.rbf_sigma;
  double range_km = 100.0;
  NeighborFlags neighbors;
};

int cmd_interp(const InterpConfig& cfg, std::ostream& out) {
  const auto methods = parse_methods(cfg.method);
  const auto variable = parse_variable_or_throw(cfg.variable);
  const auto stations = load_registries(cfg.stations);
  require_file(cfg.obs);
  const auto sets = load_observations(cfg.obs, stations);
  const auto targets = load_targets(cfg.targets);

  const auto it = std::find_if(sets.begin(), sets.end(), [&](const ObservationSet& s) {
    return s.variable == variable && s.timestamp == cfg.timestamp;
  });
  if (it == sets.end()) {
    throw InputError("no observations for " + cfg.variable + " at '" + cfg.timestamp + "'");
  }

  auto params = make_params(cfg.neighbors);
  params.idw_power = cfg.idw_power;
  params.rbf_sigma = cfg.rbf_sigma;
  params.variogram.range_km = cfg.range_km;
  params.validate();
  const auto samples = make_samples(*it, stations);

  std::vector<report::PredictionRow> rows;
  for (const auto& t : targets) {
    for (auto m : methods) {
      rows.push_back({t.id, t.location, m, variable, cfg.timestamp,
                      predict(m, samples, t.location, params)});
    }
  }
  report::write_file_atomic(cfg.out, report::predictions_csv(rows));
  if (cfg.json) {
    auto jpath = cfg.out;
    jpath.replace_extension(".json");
    report::write_file_atomic(jpath, report::predictions_json(rows));
  }
  out << rows.size() << " predictions written to " << cfg.out.string() << "\n";
  return kOk;
}

// crossval ---------------------------------------------------------------------

struct CrossvalConfig {
  std::vector<fs::path> stations;
  fs::path obs;
  std::string method = "all";
  fs::path out;
  bool json = false;
  unsigned threads = 1;
  double range_km = 100.0;
  NeighborFlags neighbors;
};

int cmd_crossval(const CrossvalConfig& cfg, std::ostream& out) {
  const auto methods = parse_methods(cfg.method);
  const auto stations = load_registries(cfg.stations);
  require_file(cfg.obs);
  const auto sets = load_observations(cfg.obs, stations);
  if (sets.size() < 2) {
    throw InputError("crossval needs at least 2 observation sets, found " +
                     std::to_string(sets.size()));
  }
  auto params = make_params(cfg.neighbors);
  params.variogram.range_km = cfg.range_km;
  params.validate();

  const auto cells = compare_methods(sets, stations, methods, params, cfg.threads);
  report::write_file_atomic(cfg.out, report::rms_table_csv(cells));
  if (cfg.json) {
    auto jpath = cfg.out;
    jpath.replace_extension(".json");
    report::write_file_atomic(jpath, report::rms_table_json(cells));
  }
  out << cells.size() << " cells written to " << cfg.out.string() << "\n";
  return kOk;
}

// summary ----------------------------------------------------------------------

struct SummaryConfig {
  fs::path obs;
  fs::path out;
  bool json = false;
};

int cmd_summary(const SummaryConfig& cfg, std::ostream& out) {
  require_file(cfg.obs);
  const auto sets = load_observations(cfg.obs);
  std::vector<SummaryStats> stats;
  stats.reserve(sets.size());
  for (const auto& s : sets) stats.push_back(summary_stats(s));
  report::write_file_atomic(cfg.out, report::summary_csv(stats));
  if (cfg.json) {
    auto jpath = cfg.out;
    jpath.replace_extension(".json");
    report::write_file_atomic(jpath, report::summary_json(stats));
  }
  out << stats.size() << " rows written to " << cfg.out.string() << "\n";
  return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Station-network coverage, point-pattern, and interpolation analysis", "roadnet"};
  app.require_subcommand(1);

  CoverageConfig cov;
  auto* c_cov = app.add_subcommand("coverage", "Station counts, mean NN distance, region counts");
  c_cov->add_option("--stations", cov.stations, "Stations CSV (repeatable; registries are merged)")
      ->required();
  c_cov->add_option("--regions", cov.regions, "Regions GeoJSON")->required();
  c_cov->add_option("--out-prefix", cov.out_prefix, "Output prefix")->required();
  c_cov->add_option("--dedupe-radius-km", cov.dedupe_radius_km,
                    "Drop stations within this radius of an earlier one (0 = off)")
      ->capture_default_str();

  PatternConfig pat;
  auto* c_pat = app.add_subcommand("pattern", "Ripley L-function with CSR envelope");
  c_pat->add_option("--stations", pat.stations, "Stations CSV (repeatable)")->required();
  c_pat->add_option("--network", pat.network, "Restrict to one network");
  c_pat->add_option("--sims", pat.sims, "CSR simulations")->capture_default_str();
  c_pat->add_option("--seed", pat.seed, "Random seed")->capture_default_str();
  c_pat->add_option("--bins", pat.bins, "Distance bands")->capture_default_str();
  c_pat->add_option("--threads", pat.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  c_pat->add_option("--out-prefix", pat.out_prefix, "Output prefix")->required();
  c_pat->add_flag("--svg", pat.svg, "Also write an SVG plot");
  c_pat->add_flag("--json", pat.json, "Also write a JSON mirror");

  InterpConfig itp;
  auto* c_itp = app.add_subcommand("interp", "Predict a variable at target locations");
  c_itp->add_option("--stations", itp.stations, "Stations CSV (repeatable)")->required();
  c_itp->add_option("--obs", itp.obs, "Observations CSV")->required();
  c_itp->add_option("--targets", itp.targets, "Targets CSV (target_id,lat,lon)")->required();
  c_itp->add_option("--method", itp.method, "idw|rbf|ok|all")->required();
  c_itp->add_option("--variable", itp.variable, "Variable name")->required();
  c_itp->add_option("--timestamp", itp.timestamp, "Observation timestamp")->required();
  c_itp->add_option("--out", itp.out, "Prediction CSV")->required();
  c_itp->add_option("--idw-power", itp.idw_power, "IDW power")->capture_default_str();
  c_itp->add_option("--rbf-sigma", itp.rbf_sigma, "RBF kernel parameter (1/km)")
      ->capture_default_str();
  c_itp->add_option("--range-km", itp.range_km, "Kriging variogram range")->capture_default_str();
  c_itp->add_flag("--json", itp.json, "Also write a JSON mirror");
  add_neighbor_flags(c_itp, itp.neighbors);

  CrossvalConfig cv;
  auto* c_cv = app.add_subcommand("crossval", "LOOCV RMS table across methods");
  c_cv->add_option("--stations", cv.stations, "Stations CSV (repeatable)")->required();
  c_cv->add_option("--obs", cv.obs, "Observations CSV")->required();
  c_cv->add_option("--method", cv.method, "idw|rbf|ok|all")->capture_default_str();
  c_cv->add_option("--out", cv.out, "RMS table CSV")->required();
  c_cv->add_option("--threads", cv.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  c_cv->add_option("--range-km", cv.range_km, "Kriging variogram range")->capture_default_str();
  c_cv->add_flag("--json", cv.json, "Also write a JSON mirror");
  add_neighbor_flags(c_cv, cv.neighbors);

  SummaryConfig sum;
  auto* c_sum = app.add_subcommand("summary", "Mean, std dev, CV% per variable and timestamp");
  c_sum->add_option("--obs", sum.obs, "Observations CSV")->required();
  c_sum->add_option("--out", sum.out, "Summary CSV")->required();
  c_sum->add_flag("--json", sum.json, "Also write a JSON mirror");

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "roadnet: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (c_cov->parsed()) return cmd_coverage(cov, out);
    if (c_pat->parsed()) return cmd_pattern(pat, out);
    if (c_itp->parsed()) return cmd_interp(itp, out);
    if (c_cv->parsed()) return cmd_crossval(cv, out);
    if (c_sum->parsed()) return cmd_summary(sum, out);
  } catch (const InputError& e) {
    err << "roadnet: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericalError& e) {
    err << "roadnet: numerical error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "roadnet: internal error: " << e.what() << "\n";
    return kInternalError;
  }
  err << "roadnet: no subcommand\n";
  return kInputError;
}

} // namespace roadnet::cli
