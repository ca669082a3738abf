#pragma once

#include <string>
#include <vector>

#include "chirail/analyze.hpp"

namespace chirail {

inline constexpr int kReportSchemaVersion = 1;

/// GeoJSON FeatureCollection with simplestyle properties: case points
/// (travel green, community red) followed by rail LineStrings. Deterministic
/// key and feature order. Throws on zero features.
std::string emit_geojson(const std::vector<LocatedCase>& cases,
                         const std::vector<RailLine>& lines,
                         const std::vector<CaseDistance>& per_case_distances,
                         const GeoPoint& origin);

struct SummaryReport {
  std::string json;
  std::string text;
};

/// Machine-readable report.json plus a plain-text rendering of the same
/// values.
SummaryReport emit_summary(const DatasetStats& stats,
                           const ProximityResult& result,
                           const std::vector<CoincidentCluster>& clusters);

}  // namespace chirail
