#include "chirail/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chirail/error.hpp"

namespace chirail {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kTravelColor = "#008000";
const char* kCommunityColor = "#ff0000";
const char* kRailColor = "#555555";

ordered_json coord(const GeoPoint& p) {
  return ordered_json::array({p.lon, p.lat});  // GeoJSON is lon-lat
}

}  // namespace

std::string emit_geojson(const std::vector<LocatedCase>& cases,
                         const std::vector<RailLine>& lines,
                         const std::vector<CaseDistance>& per_case_distances,
                         const GeoPoint& origin) {
  if (cases.empty() && lines.empty()) {
    throw InputError("refusing to emit an empty map");
  }
  std::map<int, const CaseDistance*> distance_by_id;
  for (const auto& d : per_case_distances) distance_by_id[d.case_id] = &d;

  std::vector<const LocatedCase*> ordered_cases;
  for (const auto& c : cases) ordered_cases.push_back(&c);
  std::sort(ordered_cases.begin(), ordered_cases.end(),
            [](const LocatedCase* a, const LocatedCase* b) {
              return a->classified.record.id < b->classified.record.id;
            });
  std::vector<const RailLine*> ordered_lines;
  for (const auto& l : lines) ordered_lines.push_back(&l);
  std::sort(ordered_lines.begin(), ordered_lines.end(),
            [](const RailLine* a, const RailLine* b) {
              return a->line_id < b->line_id;
            });

  ordered_json features = ordered_json::array();
  for (const LocatedCase* c : ordered_cases) {
    if (c->classified.cls == ExposureClass::Dropped) continue;
    ordered_json props;
    props["id"] = c->classified.record.id;
    props["class"] = to_string(c->classified.cls);
    props["source"] = to_string(c->source);
    props["confidence"] = c->confidence;
    if (c->eligible_for_stats()) {
      const auto it = distance_by_id.find(c->classified.record.id);
      if (it != distance_by_id.end()) {
        props["nearest_line"] = it->second->line_id;
        props["distance_m"] = it->second->meters;
      }
    } else {
      props["excluded_from_stats"] = true;
    }
    props["marker-color"] = c->classified.cls == ExposureClass::Travel
                                ? kTravelColor
                                : kCommunityColor;
    ordered_json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "Point"}, {"coordinates", coord(c->location)}};
    feature["properties"] = std::move(props);
    features.push_back(std::move(feature));
  }
  for (const RailLine* line : ordered_lines) {
    std::vector<PlanarPoint> verts;
    verts.reserve(line->vertices.size());
    for (const auto& v : line->vertices) verts.push_back(project_local(v, origin));
    ordered_json coords = ordered_json::array();
    for (const auto& v : line->vertices) coords.push_back(coord(v));
    ordered_json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "LineString"},
                           {"coordinates", std::move(coords)}};
    feature["properties"] = {{"line_id", line->line_id},
                             {"bearing", principal_bearing_deg(verts)},
                             {"stroke", kRailColor}};
    features.push_back(std::move(feature));
  }
  if (features.empty()) throw InputError("refusing to emit an empty map");

  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  return doc.dump(2) + "\n";
}

namespace {

ordered_json summary_json(const DistanceSummary& s) {
  ordered_json out;
  out["n"] = s.n;
  out["mean_m"] = s.mean_m;
  out["median_m"] = s.median_m;
  out["q25_m"] = s.q25_m;
  out["q75_m"] = s.q75_m;
  return out;
}

}  // namespace

SummaryReport emit_summary(const DatasetStats& stats,
                           const ProximityResult& result,
                           const std::vector<CoincidentCluster>& clusters) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["counts"] = {{"total", stats.total},
                   {"travel", stats.travel},
                   {"community", stats.community},
                   {"dropped", stats.dropped},
                   {"missing_city", stats.missing_city}};
  ordered_json prox;
  prox["community"] = summary_json(result.community);
  prox["travel"] = summary_json(result.travel);
  prox["permutation_p"] = result.permutation_p;
  prox["monte_carlo_p"] = result.monte_carlo_p;
  prox["n_permutations"] = result.n_permutations;
  prox["n_simulations"] = result.n_simulations;
  prox["seed"] = result.seed;
  prox["elongation_ratio"] = result.elongation_ratio;
  prox["stripe_bearing_deg"] = result.stripe_bearing_deg;
  prox["best_aligned_line"] = {
      {"line_id", result.best_aligned_line.line_id},
      {"bearing_gap_deg", result.best_aligned_line.bearing_gap_deg}};
  doc["proximity"] = std::move(prox);
  ordered_json cluster_arr = ordered_json::array();
  for (const auto& c : clusters) {
    cluster_arr.push_back({{"center", {{"lat", c.center.lat}, {"lon", c.center.lon}}},
                           {"radius_m", c.radius_m},
                           {"count", c.count},
                           {"case_ids", c.case_ids}});
  }
  doc["clusters"] = std::move(cluster_arr);

  SummaryReport report;
  report.json = doc.dump(2) + "\n";

  std::ostringstream text;
  text << "case counts\n"
       << "  total:        " << stats.total << "\n"
       << "  travel:       " << stats.travel << "\n"
       << "  community:    " << stats.community << "\n"
       << "  dropped:      " << stats.dropped << "\n"
       << "  missing city: " << stats.missing_city << "\n"
       << "\n"
       << "rail distance (meters)\n"
       << "  community: n=" << result.community.n
       << " mean=" << result.community.mean_m
       << " median=" << result.community.median_m
       << " q25=" << result.community.q25_m << " q75=" << result.community.q75_m
       << "\n"
       << "  travel:    n=" << result.travel.n
       << " mean=" << result.travel.mean_m
       << " median=" << result.travel.median_m << " q25=" << result.travel.q25_m
       << " q75=" << result.travel.q75_m << "\n"
       << "\n"
       << "significance (one-sided: community closer to rails)\n"
       << "  permutation p = " << result.permutation_p << "  ("
       << result.n_permutations << " permutations, seed " << result.seed
       << ")\n"
       << "  monte carlo p = " << result.monte_carlo_p << "  ("
       << result.n_simulations << " simulations, seed " << result.seed << ")\n"
       << "\n"
       << "stripe\n"
       << "  elongation ratio = " << result.elongation_ratio << "\n"
       << "  bearing = " << result.stripe_bearing_deg << " deg\n"
       << "  best aligned line = " << result.best_aligned_line.line_id
       << " (gap " << result.best_aligned_line.bearing_gap_deg << " deg)\n"
       << "\n"
       << "coincident clusters (radius-linked, size >= 2)\n";
  if (clusters.empty()) {
    text << "  none\n";
  } else {
    for (const auto& c : clusters) {
      text << "  " << c.count << " cases near (" << c.center.lat << ", "
           << c.center.lon << ")\n";
    }
  }
  report.text = text.str();
  return report;
}

}  // namespace chirail
