#include <doctest.h>

#include <nlohmann/json.hpp>

#include "chirail/error.hpp"
#include "chirail/report.hpp"

using namespace chirail;

namespace {

const GeoPoint kOrigin{41.9, -87.8};

LocatedCase located(int id, ExposureClass cls, GeoPoint where,
                    LocationSource source = LocationSource::CityGiven,
                    double confidence = 1.0) {
  LocatedCase c;
  c.classified.record.id = id;
  c.classified.cls = cls;
  c.location = where;
  c.source = source;
  c.confidence = confidence;
  return c;
}

const std::vector<RailLine> kLines = {{"UP-N", {{41.8, -87.8}, {42.1, -87.8}}}};

ProximityResult sample_result() {
  ProximityResult r;
  r.community = {ExposureClass::Community, 2, 100, 100, 90, 110,
                 {{1, "UP-N", 90}, {2, "UP-N", 110}}};
  r.travel = {ExposureClass::Travel, 1, 500, 500, 500, 500, {{3, "UP-N", 500}}};
  r.permutation_p = 0.25;
  r.monte_carlo_p = 0.1;
  r.elongation_ratio = 3.5;
  r.stripe_bearing_deg = 12.0;
  r.best_aligned_line = {"UP-N", 12.0};
  r.seed = 42;
  r.n_permutations = 999;
  r.n_simulations = 199;
  return r;
}

}  // namespace

TEST_CASE("geojson carries case and line features with style properties") {
  const std::vector<LocatedCase> cases = {
      located(2, ExposureClass::Travel, {41.95, -87.75})};
  const std::vector<CaseDistance> distances = {{2, "UP-N", 4100.0}};
  const std::string doc = emit_geojson(cases, kLines, distances, kOrigin);

  const auto parsed = nlohmann::json::parse(doc);
  CHECK(parsed["type"] == "FeatureCollection");
  REQUIRE(parsed["features"].size() == 2);
  const auto& point = parsed["features"][0];
  CHECK(point["geometry"]["type"] == "Point");
  // lon-lat order
  CHECK(point["geometry"]["coordinates"][0] == doctest::Approx(-87.75));
  CHECK(point["geometry"]["coordinates"][1] == doctest::Approx(41.95));
  CHECK(point["properties"]["class"] == "travel");
  CHECK(point["properties"]["marker-color"] == "#008000");
  CHECK(point["properties"]["nearest_line"] == "UP-N");
  const auto& line = parsed["features"][1];
  CHECK(line["geometry"]["type"] == "LineString");
  CHECK(line["properties"]["line_id"] == "UP-N");
  CHECK(line["properties"].contains("bearing"));
}

TEST_CASE("community cases are red; dropped cases never appear") {
  std::vector<LocatedCase> cases = {
      located(1, ExposureClass::Community, {41.9, -87.7})};
  LocatedCase dropped = located(9, ExposureClass::Dropped, {41.9, -87.7});
  cases.push_back(dropped);
  const auto parsed = nlohmann::json::parse(
      emit_geojson(cases, kLines, {{1, "UP-N", 100.0}}, kOrigin));
  REQUIRE(parsed["features"].size() == 2);  // 1 case + 1 line
  CHECK(parsed["features"][0]["properties"]["marker-color"] == "#ff0000");
}

TEST_CASE("county_only cases are flagged as excluded") {
  const std::vector<LocatedCase> cases = {
      located(1, ExposureClass::Community, {41.9, -87.7},
              LocationSource::CountyOnly, 0.25)};
  const auto parsed =
      nlohmann::json::parse(emit_geojson(cases, kLines, {}, kOrigin));
  const auto& props = parsed["features"][0]["properties"];
  CHECK(props["excluded_from_stats"] == true);
  CHECK(!props.contains("nearest_line"));
}

TEST_CASE("geojson output is byte-identical across runs and ordered by id") {
  std::vector<LocatedCase> cases = {
      located(5, ExposureClass::Community, {41.91, -87.71}),
      located(2, ExposureClass::Travel, {41.92, -87.72})};
  const std::vector<CaseDistance> distances = {{5, "UP-N", 10.0},
                                               {2, "UP-N", 20.0}};
  const std::string a = emit_geojson(cases, kLines, distances, kOrigin);
  std::swap(cases[0], cases[1]);
  const std::string b = emit_geojson(cases, kLines, distances, kOrigin);
  CHECK(a == b);
  const auto parsed = nlohmann::json::parse(a);
  CHECK(parsed["features"][0]["properties"]["id"] == 2);
  CHECK(parsed["features"][1]["properties"]["id"] == 5);
}

TEST_CASE("an empty map is a pipeline failure") {
  CHECK_THROWS_AS(emit_geojson({}, {}, {}, kOrigin), InputError);
}

TEST_CASE("summary report json round-trips and text mirrors the counts") {
  const DatasetStats stats{21, 11, 10, 0, 13};
  const std::vector<CoincidentCluster> clusters = {
      {{41.76, -87.94}, 0.0, {1, 2, 3}, 3}};
  const SummaryReport report = emit_summary(stats, sample_result(), clusters);

  const auto parsed = nlohmann::json::parse(report.json);
  CHECK(parsed["schema_version"] == kReportSchemaVersion);
  CHECK(parsed["counts"]["total"] == 21);
  CHECK(parsed["counts"]["travel"] == 11);
  CHECK(parsed["proximity"]["permutation_p"] == doctest::Approx(0.25));
  CHECK(parsed["proximity"]["seed"] == 42);
  CHECK(parsed["proximity"]["best_aligned_line"]["line_id"] == "UP-N");
  REQUIRE(parsed["clusters"].size() == 1);
  CHECK(parsed["clusters"][0]["count"] == 3);

  // parse(emit(x)) = x for the values the report carries
  CHECK(nlohmann::json::parse(report.json) == parsed);

  // text rendering echoes the same numbers
  CHECK(report.text.find("total:        21") != std::string::npos);
  CHECK(report.text.find("travel:       11") != std::string::npos);
  CHECK(report.text.find("permutation p = 0.25") != std::string::npos);
}
