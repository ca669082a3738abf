#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chirail/analyze.hpp"
#include "chirail/classify.hpp"
#include "chirail/locate.hpp"

namespace chirail {

inline constexpr int kStageSchemaVersion = 1;

struct RunConfig {
  std::filesystem::path cases_path;
  std::filesystem::path gazetteer_path;
  std::filesystem::path rails_path;
  std::filesystem::path rules_path;  // empty = built-in ruleset
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  int n_perm = 9999;
  int n_sim = 999;
  double confidence_threshold = 0.0;
  double cluster_radius_m = 100.0;
  BoundingBox region = default_study_region();
};

struct ClassifiedStage {
  DatasetStats stats;
  std::vector<ClassifiedCase> cases;
};

struct LocatedStage {
  DatasetStats stats;
  std::vector<LocatedCase> cases;
};

// Stage-file serialization (schema-versioned JSON). Readers refuse any other
// schema version.
std::string serialize_classified_stage(const ClassifiedStage& stage);
ClassifiedStage parse_classified_stage(std::string_view text);
std::string serialize_located_stage(const LocatedStage& stage);
LocatedStage parse_located_stage(std::string_view text);

std::string serialize_issues(const std::vector<RowIssue>& issues);

/// classify stage: cases file (+ optional rules file) -> classified.json and
/// issues.jsonl in the output directory.
ClassifiedStage run_classify_stage(const RunConfig& config);

/// locate stage: classified.json + gazetteer -> located.json and cases.csv;
/// location issues appended to issues.jsonl.
LocatedStage run_locate_stage(const RunConfig& config);

/// analyze stage: located.json + rails -> map.geojson, report.json,
/// report.txt.
ProximityResult run_analyze_stage(const RunConfig& config);

/// Full pipeline; identical inputs and config produce byte-identical
/// artifacts. Throws with the failing stage named; artifacts written by the
/// failed run are removed.
void run_pipeline(const RunConfig& config);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace chirail
