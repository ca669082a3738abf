#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "chirail/error.hpp"
#include "chirail/pipeline.hpp"

namespace {

void add_region_option(CLI::App* cmd, chirail::BoundingBox* region) {
  cmd->add_option_function<std::vector<double>>(
         "--region",
         [region](const std::vector<double>& v) {
           region->min_lat = v[0];
           region->min_lon = v[1];
           region->max_lat = v[2];
           region->max_lon = v[3];
         },
         "Study region as min_lat min_lon max_lat max_lon "
         "(default: greater Chicago)")
      ->expected(4);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "chirail: classify, geocode and rail-proximity-test epidemiological "
      "case reports"};
  app.require_subcommand(1);

  chirail::RunConfig config;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd, bool needs_seed) {
    cmd->add_option("--out", config.out_dir, "Output directory")->required();
    if (needs_seed) {
      cmd->add_option("--seed", config.seed,
                      "RNG seed (required; no wall-clock default)")
          ->required();
      seed_set = true;
    }
  };

  CLI::App* run = app.add_subcommand("run", "Run the full pipeline");
  run->add_option("--cases", config.cases_path, "Case table (CSV/TSV)")
      ->required();
  run->add_option("--gazetteer", config.gazetteer_path, "Gazetteer CSV")
      ->required();
  run->add_option("--rails", config.rails_path,
                  "Rail geometry (GeoJSON or GTFS shapes)")
      ->required();
  run->add_option("--rules", config.rules_path,
                  "Rules file overriding the built-in ruleset");
  run->add_option("--permutations", config.n_perm, "Permutation count");
  run->add_option("--simulations", config.n_sim, "Monte Carlo simulation count");
  run->add_option("--confidence-threshold", config.confidence_threshold,
                  "Minimum location confidence entering the statistics");
  add_region_option(run, &config.region);
  add_common(run, true);

  CLI::App* classify =
      app.add_subcommand("classify-only", "Parse and classify cases only");
  classify->add_option("--cases", config.cases_path, "Case table (CSV/TSV)")
      ->required();
  classify->add_option("--rules", config.rules_path,
                       "Rules file overriding the built-in ruleset");
  add_common(classify, false);

  CLI::App* locate = app.add_subcommand(
      "locate-only", "Geocode a classified.json produced by classify-only");
  locate->add_option("--gazetteer", config.gazetteer_path, "Gazetteer CSV")
      ->required();
  add_region_option(locate, &config.region);
  add_common(locate, false);

  CLI::App* analyze = app.add_subcommand(
      "analyze-only", "Analyze a located.json produced by locate-only");
  analyze->add_option("--rails", config.rails_path,
                      "Rail geometry (GeoJSON or GTFS shapes)")
      ->required();
  analyze->add_option("--permutations", config.n_perm, "Permutation count");
  analyze->add_option("--simulations", config.n_sim,
                      "Monte Carlo simulation count");
  analyze->add_option("--confidence-threshold", config.confidence_threshold,
                      "Minimum location confidence entering the statistics");
  add_region_option(analyze, &config.region);
  add_common(analyze, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      chirail::run_pipeline(config);
    } else if (classify->parsed()) {
      chirail::run_classify_stage(config);
    } else if (locate->parsed()) {
      chirail::run_locate_stage(config);
    } else if (analyze->parsed()) {
      chirail::run_analyze_stage(config);
    }
  } catch (const chirail::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 2;
  }
  (void)seed_set;
  return 0;
}
