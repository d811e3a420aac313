#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roadnet/evaluate.hpp"
#include "roadnet/point_pattern.hpp"

namespace roadnet::report {

inline constexpr std::string_view kLFunctionHeader =
    "distance_km,l_observed,envelope_low,envelope_high,verdict";
inline constexpr std::string_view kPredictionHeader =
    "target_id,lat,lon,method,variable,timestamp,predicted_value";
inline constexpr std::string_view kRmsHeader = "method,variable,timestamp,rms,optimized_param";
inline constexpr std::string_view kSummaryHeader = "variable,timestamp,n,mean,std_dev,cv_percent";

struct PredictionRow {
  std::string target_id;
  GeoCoord location;
  Method method = Method::IDW;
  Variable variable = Variable::AirTempC;
  std::string timestamp;
  double predicted = 0.0;
};

std::string lfunction_csv(const LFunctionResult& result);
std::string lfunction_json(const LFunctionResult& result);

/// Observed L as a polyline over the shaded envelope band, with the CSR
/// reference L(d) = d dashed. Self-contained SVG 1.1.
std::string lfunction_svg(const LFunctionResult& result, std::string_view title);

std::string predictions_csv(std::span<const PredictionRow> rows);
std::string predictions_json(std::span<const PredictionRow> rows);

std::string rms_table_csv(std::span<const RmsCell> cells);
std::string rms_table_json(std::span<const RmsCell> cells);

/// CV% is printed rounded to an integer, and left empty when undefined.
std::string summary_csv(std::span<const SummaryStats> stats);
std::string summary_json(std::span<const SummaryStats> stats);

/// Columns: label,members,count_total,mean_nn_km,count_in_regions, then one
/// count column per region name.
std::string coverage_csv(const CoverageReport& report);
std::string coverage_json(const CoverageReport& report);

/// Writes via a sibling temporary file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace roadnet::report
