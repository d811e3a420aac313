#include "roadnet/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roadnet/csv.hpp"
#include "roadnet/errors.hpp"

namespace roadnet::report {

namespace {

using nlohmann::json;
using csv::format_double;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string svg_num(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out.push_back(c);
    }
  }
  return out;
}

double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

} // namespace

std::string lfunction_csv(const LFunctionResult& r) {
  const auto verdicts = cluster_verdict(r);
  std::string out(kLFunctionHeader);
  out.push_back('\n');
  for (std::size_t b = 0; b < r.distances.size(); ++b) {
    out += csv::join({format_double(r.distances[b]), format_double(r.l_observed[b]),
                      format_double(r.envelope_low[b]), format_double(r.envelope_high[b]),
                      std::string(to_string(verdicts[b]))});
    out.push_back('\n');
  }
  return out;
}

std::string lfunction_json(const LFunctionResult& r) {
  const auto verdicts = cluster_verdict(r);
  json j;
  j["n_simulations"] = r.n_simulations;
  j["seed"] = r.seed;
  j["bands"] = json::array();
  for (std::size_t b = 0; b < r.distances.size(); ++b) {
    j["bands"].push_back({{"distance_km", r.distances[b]},
                          {"l_observed", r.l_observed[b]},
                          {"envelope_low", r.envelope_low[b]},
                          {"envelope_high", r.envelope_high[b]},
                          {"verdict", to_string(verdicts[b])}});
  }
  return dump(j);
}

std::string lfunction_svg(const LFunctionResult& r, std::string_view title) {
  constexpr double kW = 640, kH = 440;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;

  double xmax = r.distances.empty() ? 1.0 : r.distances.back();
  double ymax = xmax;
  for (std::size_t b = 0; b < r.distances.size(); ++b) {
    ymax = std::max({ymax, r.l_observed[b], r.envelope_high[b]});
  }
  if (!(xmax > 0.0)) xmax = 1.0;
  if (!(ymax > 0.0)) ymax = 1.0;
  auto sx = [&](double x) { return kLeft + pw * x / xmax; };
  auto sy = [&](double y) { return kTop + ph * (1.0 - y / ymax); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">"
     << xml_escape(title) << "</text>\n";

  // envelope band
  os << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\" points=\"";
  for (std::size_t b = 0; b < r.distances.size(); ++b)
    os << svg_num(sx(r.distances[b])) << ',' << svg_num(sy(r.envelope_high[b])) << ' ';
  for (std::size_t b = r.distances.size(); b-- > 0;)
    os << svg_num(sx(r.distances[b])) << ',' << svg_num(sy(r.envelope_low[b])) << ' ';
  os << "\"/>\n";

  const double diag = std::min(xmax, ymax);
  os << "<line x1=\"" << svg_num(sx(0)) << "\" y1=\"" << svg_num(sy(0)) << "\" x2=\""
     << svg_num(sx(diag)) << "\" y2=\"" << svg_num(sy(diag))
     << "\" stroke=\"#3182bd\" stroke-dasharray=\"4 3\"/>\n";

  os << "<polyline fill=\"none\" stroke=\"#de2d26\" stroke-width=\"2\" points=\"";
  for (std::size_t b = 0; b < r.distances.size(); ++b)
    os << svg_num(sx(r.distances[b])) << ',' << svg_num(sy(r.l_observed[b])) << ' ';
  os << "\"/>\n";

  // axes and ticks
  os << "<g stroke=\"black\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
     << kTop + ph << "\"/>\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kTop + ph << "\"/>\n";
  const double xstep = nice_step(xmax, 6);
  for (double t = 0.0; t <= xmax + 1e-9; t += xstep) {
    os << "<line x1=\"" << svg_num(sx(t)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << svg_num(sx(t))
       << "\" y2=\"" << kTop + ph + 5 << "\"/>"
       << "<text stroke=\"none\" x=\"" << svg_num(sx(t)) << "\" y=\"" << kTop + ph + 18
       << "\" text-anchor=\"middle\">" << svg_num(t) << "</text>\n";
  }
  const double ystep = nice_step(ymax, 6);
  for (double t = 0.0; t <= ymax + 1e-9; t += ystep) {
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << svg_num(sy(t)) << "\" x2=\"" << kLeft
       << "\" y2=\"" << svg_num(sy(t)) << "\"/>"
       << "<text stroke=\"none\" x=\"" << kLeft - 8 << "\" y=\"" << svg_num(sy(t) + 4)
       << "\" text-anchor=\"end\">" << svg_num(t) << "</text>\n";
  }
  os << "</g>\n"
     << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">distance (km)</text>\n"
     << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " << kTop + ph / 2
     << ")\">L(d) (km)</text>\n"
     << "</svg>\n";
  return os.str();
}

std::string predictions_csv(std::span<const PredictionRow> rows) {
  std::string out(kPredictionHeader);
  out.push_back('\n');
  for (const auto& r : rows) {
    out += csv::join({r.target_id, format_double(r.location.lat), format_double(r.location.lon),
                      std::string(to_string(r.method)), std::string(to_string(r.variable)),
                      r.timestamp, format_double(r.predicted)});
    out.push_back('\n');
  }
  return out;
}

std::string predictions_json(std::span<const PredictionRow> rows) {
  json j = json::array();
  for (const auto& r : rows) {
    j.push_back({{"target_id", r.target_id},
                 {"lat", r.location.lat},
                 {"lon", r.location.lon},
                 {"method", to_string(r.method)},
                 {"variable", to_string(r.variable)},
                 {"timestamp", r.timestamp},
                 {"predicted_value", r.predicted}});
  }
  return dump(j);
}

std::string rms_table_csv(std::span<const RmsCell> cells) {
  std::string out(kRmsHeader);
  out.push_back('\n');
  for (const auto& c : cells) {
    out += csv::join({std::string(to_string(c.method)), std::string(to_string(c.variable)),
                      c.timestamp, format_double(c.rms),
                      c.optimized_param ? format_double(*c.optimized_param) : std::string()});
    out.push_back('\n');
  }
  return out;
}

std::string rms_table_json(std::span<const RmsCell> cells) {
  json j = json::array();
  for (const auto& c : cells) {
    json row{{"method", to_string(c.method)},
             {"variable", to_string(c.variable)},
             {"timestamp", c.timestamp},
             {"rms", c.rms}};
    row["optimized_param"] = c.optimized_param ? json(*c.optimized_param) : json(nullptr);
    j.push_back(std::move(row));
  }
  return dump(j);
}

std::string summary_csv(std::span<const SummaryStats> stats) {
  std::string out(kSummaryHeader);
  out.push_back('\n');
  for (const auto& s : stats) {
    std::string cv;
    if (s.cv_percent) cv = std::to_string(static_cast<long long>(std::llround(*s.cv_percent)));
    out += csv::join({std::string(to_string(s.variable)), s.timestamp, std::to_string(s.n),
                      format_double(s.mean), format_double(s.std_dev), cv});
    out.push_back('\n');
  }
  return out;
}

std::string summary_json(std::span<const SummaryStats> stats) {
  json j = json::array();
  for (const auto& s : stats) {
    json row{{"variable", to_string(s.variable)},
             {"timestamp", s.timestamp},
             {"n", s.n},
             {"mean", s.mean},
             {"std_dev", s.std_dev}};
    row["cv_percent"] = s.cv_percent ? json(*s.cv_percent) : json(nullptr);
    j.push_back(std::move(row));
  }
  return dump(j);
}

std::string coverage_csv(const CoverageReport& report) {
  std::vector<std::string> header{"label", "members", "count_total", "mean_nn_km",
                                  "count_in_regions"};
  header.insert(header.end(), report.region_names.begin(), report.region_names.end());
  std::string out = csv::join(header) + "\n";
  for (const auto& row : report.rows) {
    std::string members;
    for (auto m : row.members) {
      if (!members.empty()) members.push_back('+');
      members += std::to_string(m);
    }
    std::vector<std::string> f{row.label, members, std::to_string(row.count_total),
                               format_double(row.mean_nn_km), std::to_string(row.count_in_regions)};
    for (auto c : row.counts_per_region) f.push_back(std::to_string(c));
    out += csv::join(f) + "\n";
  }
  return out;
}

std::string coverage_json(const CoverageReport& report) {
  json j;
  j["regions"] = report.region_names;
  j["rows"] = json::array();
  for (const auto& row : report.rows) {
    json per_region = json::object();
    for (std::size_t k = 0; k < report.region_names.size(); ++k) {
      per_region[report.region_names[k]] = row.counts_per_region[k];
    }
    j["rows"].push_back({{"label", row.label},
                         {"members", row.members},
                         {"count_total", row.count_total},
                         {"mean_nn_km", row.mean_nn_km},
                         {"count_in_regions", row.count_in_regions},
                         {"counts_per_region", per_region}});
  }
  return dump(j);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move output into place: " + path.string() + ": " + ec.message());
  }
}

} // namespace roadnet::report
