#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chirail/error.hpp"
#include "chirail/pipeline.hpp"

using namespace chirail;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = CHIRAIL_DATA_DIR;

RunConfig fixture_config(const fs::path& out_dir) {
  RunConfig config;
  config.cases_path = kDataDir + "/synthetic_cases.csv";
  config.gazetteer_path = kDataDir + "/gazetteer.csv";
  config.rails_path = kDataDir + "/rails.geojson";
  config.out_dir = out_dir;
  config.seed = 20200320;
  config.n_perm = 999;
  config.n_sim = 199;
  return config;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("chirail_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("full pipeline run writes every artifact") {
  const fs::path out = temp_dir("full");
  run_pipeline(fixture_config(out));
  for (const char* name : {"issues.jsonl", "classified.json", "located.json",
                           "cases.csv", "map.geojson", "report.json",
                           "report.txt"}) {
    CHECK(fs::exists(out / name));
  }
  const auto report = nlohmann::json::parse(read_file(out / "report.json"));
  CHECK(report["counts"]["total"] == 160);
  CHECK(report["counts"]["dropped"] == 10);
}

TEST_CASE("missing gazetteer path fails up front, naming the path") {
  const fs::path out = temp_dir("missing");
  RunConfig config = fixture_config(out);
  config.gazetteer_path = "/nonexistent/gazetteer.csv";
  CHECK_THROWS_WITH_AS(run_pipeline(config),
                       doctest::Contains("/nonexistent/gazetteer.csv"),
                       ConfigError);
  CHECK(!fs::exists(out / "report.json"));
  CHECK(!fs::exists(out / "classified.json"));
}

TEST_CASE("identical config gives byte-identical artifacts") {
  const fs::path out1 = temp_dir("det1");
  const fs::path out2 = temp_dir("det2");
  run_pipeline(fixture_config(out1));
  run_pipeline(fixture_config(out2));
  CHECK(read_file(out1 / "report.json") == read_file(out2 / "report.json"));
  CHECK(read_file(out1 / "map.geojson") == read_file(out2 / "map.geojson"));
}

TEST_CASE("staged subcommands compose to the full pipeline") {
  const fs::path full = temp_dir("comp_full");
  const fs::path staged = temp_dir("comp_staged");
  run_pipeline(fixture_config(full));

  const RunConfig config = fixture_config(staged);
  run_classify_stage(config);
  run_locate_stage(config);
  run_analyze_stage(config);

  CHECK(read_file(full / "report.json") == read_file(staged / "report.json"));
  CHECK(read_file(full / "map.geojson") == read_file(staged / "map.geojson"));
  CHECK(read_file(full / "cases.csv") == read_file(staged / "cases.csv"));
}

TEST_CASE("classify-only on the table fixture reports 11 travel, 10 community") {
  const fs::path out = temp_dir("classify_only");
  RunConfig config = fixture_config(out);
  config.cases_path = kDataDir + "/tables_cases.csv";
  const ClassifiedStage stage = run_classify_stage(config);
  CHECK(stage.stats.travel == 11);
  CHECK(stage.stats.community == 10);
  CHECK(stage.stats.dropped == 0);

  // stage file round-trips
  const ClassifiedStage reread =
      parse_classified_stage(read_file(out / "classified.json"));
  CHECK(reread.stats == stage.stats);
  CHECK(reread.cases.size() == stage.cases.size());
}

TEST_CASE("stage files from a newer schema are refused") {
  nlohmann::json doc;
  doc["schema_version"] = kStageSchemaVersion + 1;
  doc["stats"] = {{"total", 0}, {"travel", 0}, {"community", 0},
                  {"dropped", 0}, {"missing_city", 0}};
  doc["cases"] = nlohmann::json::array();
  CHECK_THROWS_WITH_AS(parse_classified_stage(doc.dump()),
                       doctest::Contains("schema version"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_located_stage(doc.dump()),
                       doctest::Contains("schema version"), ConfigError);
}

TEST_CASE("located stage file round-trips") {
  const fs::path out = temp_dir("locate_roundtrip");
  const RunConfig config = fixture_config(out);
  run_classify_stage(config);
  const LocatedStage stage = run_locate_stage(config);
  const LocatedStage reread =
      parse_located_stage(read_file(out / "located.json"));
  REQUIRE(reread.cases.size() == stage.cases.size());
  for (std::size_t i = 0; i < stage.cases.size(); ++i) {
    CHECK(reread.cases[i].classified.record.id ==
          stage.cases[i].classified.record.id);
    CHECK(reread.cases[i].source == stage.cases[i].source);
    CHECK(reread.cases[i].location == stage.cases[i].location);
  }
}

TEST_CASE("issue log is machine-readable json lines") {
  const fs::path out = temp_dir("issues");
  RunConfig config = fixture_config(out);
  run_pipeline(config);
  const std::string log = read_file(out / "issues.jsonl");
  // the synthetic fixture is clean, so the log may be empty; any lines
  // present must carry the full issue schema
  std::istringstream in(log);
  std::string line;
  while (std::getline(in, line)) {
    const auto parsed = nlohmann::json::parse(line);
    CHECK(parsed.contains("row"));
    CHECK(parsed.contains("field"));
    CHECK(parsed.contains("code"));
    CHECK(parsed.contains("message"));
  }
}
