#include "chirail/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chirail/error.hpp"
#include "chirail/report.hpp"

namespace chirail {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

namespace {

void check_schema_version(const nlohmann::json& doc, const char* what) {
  const int version = doc.value("schema_version", -1);
  if (version != kStageSchemaVersion) {
    throw ConfigError(std::string(what) + " has schema version " +
                      std::to_string(version) + "; this build reads version " +
                      std::to_string(kStageSchemaVersion));
  }
}

ordered_json stats_json(const DatasetStats& stats) {
  return {{"total", stats.total},
          {"travel", stats.travel},
          {"community", stats.community},
          {"dropped", stats.dropped},
          {"missing_city", stats.missing_city}};
}

DatasetStats parse_stats(const nlohmann::json& j) {
  DatasetStats stats;
  stats.total = j.at("total").get<int>();
  stats.travel = j.at("travel").get<int>();
  stats.community = j.at("community").get<int>();
  stats.dropped = j.at("dropped").get<int>();
  stats.missing_city = j.at("missing_city").get<int>();
  return stats;
}

}  // namespace

std::string serialize_classified_stage(const ClassifiedStage& stage) {
  ordered_json doc;
  doc["schema_version"] = kStageSchemaVersion;
  doc["stats"] = stats_json(stage.stats);
  ordered_json cases = ordered_json::array();
  for (const auto& c : stage.cases) {
    ordered_json item;
    item["id"] = c.record.id;
    item["date"] = to_string(c.record.date_announced);
    item["county"] = c.record.county;
    if (c.record.city) {
      item["city"] = *c.record.city;
    } else {
      item["city"] = nullptr;
    }
    item["history"] = c.record.history_text;
    item["class"] = to_string(c.cls);
    item["fired_rule"] = c.fired_rule;
    cases.push_back(std::move(item));
  }
  doc["cases"] = std::move(cases);
  return doc.dump(2) + "\n";
}

ClassifiedStage parse_classified_stage(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("classified stage file is not valid JSON: ") +
                     e.what());
  }
  check_schema_version(doc, "classified stage file");
  ClassifiedStage stage;
  stage.stats = parse_stats(doc.at("stats"));
  for (const auto& item : doc.at("cases")) {
    ClassifiedCase c;
    c.record.id = item.at("id").get<int>();
    const auto date = parse_date(item.at("date").get<std::string>());
    if (!date) throw InputError("classified stage file has a bad date");
    c.record.date_announced = *date;
    c.record.county = item.at("county").get<std::string>();
    if (!item.at("city").is_null()) {
      c.record.city = item.at("city").get<std::string>();
    }
    c.record.history_text = item.at("history").get<std::string>();
    const auto cls = parse_exposure_class(item.at("class").get<std::string>());
    if (!cls) throw InputError("classified stage file has an unknown class");
    c.cls = *cls;
    c.fired_rule = item.at("fired_rule").get<std::string>();
    stage.cases.push_back(std::move(c));
  }
  return stage;
}

std::string serialize_located_stage(const LocatedStage& stage) {
  ordered_json doc;
  doc["schema_version"] = kStageSchemaVersion;
  doc["stats"] = stats_json(stage.stats);
  ordered_json cases = ordered_json::array();
  for (const auto& c : stage.cases) {
    ordered_json item;
    item["id"] = c.classified.record.id;
    item["class"] = to_string(c.classified.cls);
    item["fired_rule"] = c.classified.fired_rule;
    item["source"] = to_string(c.source);
    item["confidence"] = c.confidence;
    item["lat"] = c.location.lat;
    item["lon"] = c.location.lon;
    cases.push_back(std::move(item));
  }
  doc["cases"] = std::move(cases);
  return doc.dump(2) + "\n";
}

LocatedStage parse_located_stage(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("located stage file is not valid JSON: ") +
                     e.what());
  }
  check_schema_version(doc, "located stage file");
  LocatedStage stage;
  stage.stats = parse_stats(doc.at("stats"));
  for (const auto& item : doc.at("cases")) {
    LocatedCase c;
    c.classified.record.id = item.at("id").get<int>();
    const auto cls = parse_exposure_class(item.at("class").get<std::string>());
    if (!cls) throw InputError("located stage file has an unknown class");
    c.classified.cls = *cls;
    c.classified.fired_rule = item.at("fired_rule").get<std::string>();
    const auto source =
        parse_location_source(item.at("source").get<std::string>());
    if (!source) throw InputError("located stage file has an unknown source");
    c.source = *source;
    c.confidence = item.at("confidence").get<double>();
    c.location = GeoPoint{item.at("lat").get<double>(),
                          item.at("lon").get<double>()};
    stage.cases.push_back(std::move(c));
  }
  return stage;
}

std::string serialize_issues(const std::vector<RowIssue>& issues) {
  std::ostringstream out;
  for (const auto& issue : issues) {
    ordered_json line;
    line["row"] = issue.row;
    line["field"] = issue.field;
    line["code"] = issue.code;
    line["message"] = issue.message;
    out << line.dump() << '\n';
  }
  return out.str();
}

namespace {

void append_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace

ClassifiedStage run_classify_stage(const RunConfig& config) {
  const std::string raw = read_file(config.cases_path);
  const Ruleset rules = config.rules_path.empty()
                            ? Ruleset::builtin()
                            : Ruleset::parse(read_file(config.rules_path));
  const ParsedCases parsed = parse_case_records(raw);
  auto [cases, stats] = classify_all(parsed.records, rules);

  ClassifiedStage stage{stats, std::move(cases)};
  fs::create_directories(config.out_dir);
  write_file(config.out_dir / "classified.json",
             serialize_classified_stage(stage));
  write_file(config.out_dir / "issues.jsonl", serialize_issues(parsed.issues));
  return stage;
}

LocatedStage run_locate_stage(const RunConfig& config) {
  const ClassifiedStage classified =
      parse_classified_stage(read_file(config.out_dir / "classified.json"));
  const Gazetteer gazetteer = load_gazetteer(read_file(config.gazetteer_path));

  LocateOptions options;
  options.region = config.region;
  LocateResult located = resolve_locations(classified.cases, gazetteer, options);

  LocatedStage stage{classified.stats, std::move(located.cases)};
  write_file(config.out_dir / "located.json", serialize_located_stage(stage));
  write_file(config.out_dir / "cases.csv", serialize_located_cases(stage.cases));
  append_file(config.out_dir / "issues.jsonl",
              serialize_issues(located.issues));
  return stage;
}

ProximityResult run_analyze_stage(const RunConfig& config) {
  const LocatedStage located =
      parse_located_stage(read_file(config.out_dir / "located.json"));
  const std::vector<RailLine> lines =
      load_rail_lines(read_file(config.rails_path), config.region);

  AnalyzeConfig analyze_config;
  analyze_config.region = config.region;
  analyze_config.n_perm = config.n_perm;
  analyze_config.n_sim = config.n_sim;
  analyze_config.seed = config.seed;
  analyze_config.confidence_threshold = config.confidence_threshold;

  const ProximityResult result =
      analyze_proximity(located.cases, lines, analyze_config);

  // Map distances cover every stats-eligible case, independent of the
  // confidence threshold used for the statistics.
  const GeoPoint origin = case_centroid(located.cases);
  std::vector<CaseDistance> distances;
  std::vector<LocatedCase> eligible;
  for (const auto& c : located.cases) {
    if (!c.eligible_for_stats()) continue;
    distances.push_back(nearest_rail_distance(c, lines, origin));
    eligible.push_back(c);
  }
  const auto clusters = cluster_coincident(eligible, config.cluster_radius_m);

  write_file(config.out_dir / "map.geojson",
             emit_geojson(located.cases, lines, distances, origin));
  const SummaryReport summary = emit_summary(located.stats, result, clusters);
  write_file(config.out_dir / "report.json", summary.json);
  write_file(config.out_dir / "report.txt", summary.text);
  return result;
}

void run_pipeline(const RunConfig& config) {
  for (const auto& [label, path] :
       {std::pair<const char*, const fs::path*>{"cases", &config.cases_path},
        {"gazetteer", &config.gazetteer_path},
        {"rails", &config.rails_path}}) {
    std::ifstream probe(*path);
    if (!probe) {
      throw ConfigError(std::string(label) + " file '" + path->string() +
                        "' is not readable");
    }
  }
  if (!config.rules_path.empty()) {
    std::ifstream probe(config.rules_path);
    if (!probe) {
      throw ConfigError("rules file '" + config.rules_path.string() +
                        "' is not readable");
    }
  }

  static const char* kArtifacts[] = {"issues.jsonl", "classified.json",
                                     "located.json", "cases.csv",
                                     "map.geojson",  "report.json",
                                     "report.txt"};
  auto remove_artifacts = [&] {
    std::error_code ec;
    for (const char* name : kArtifacts) {
      fs::remove(config.out_dir / name, ec);
    }
  };

  const char* stage = "classify";
  try {
    run_classify_stage(config);
    stage = "locate";
    run_locate_stage(config);
    stage = "analyze";
    run_analyze_stage(config);
  } catch (const Error& e) {
    remove_artifacts();
    throw Error(std::string(stage) + " stage failed: " + e.what());
  }
}

}  // namespace chirail
