#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chirail/classify.hpp"
#include "chirail/ingest.hpp"

namespace chirail {

/// county -> city -> observed count, normalized names, counts > 0.
using CityFrequencyTable = std::map<std::string, std::map<std::string, int>>;

/// Counts cities over records that carry one.
CityFrequencyTable build_city_frequency(const std::vector<CaseRecord>& records);

struct Imputation {
  std::string city;
  double share = 0.0;  // mode count / county total
};

/// Modal city of the record's county, alphabetical tie-break. nullopt when
/// the county has no observed cities (the case falls back to county_only).
std::optional<Imputation> impute_city(const CaseRecord& record,
                                      const CityFrequencyTable& table);

/// A gazetteer hit inside history text.
struct PlaceMention {
  std::string matched_text;
  const GazetteerEntry* entry = nullptr;
  std::size_t begin = 0;  // char span within history_text
  std::size_t end = 0;
};

/// Longest-match-first scan over gazetteer names and aliases with word
/// boundaries; overlapping shorter matches suppressed; results in text order.
std::vector<PlaceMention> extract_place_mentions(const std::string& history_text,
                                                 const Gazetteer& gazetteer);

enum class LocationSource { CityGiven, CityImputed, HistoryPlace, CountyOnly };

std::string to_string(LocationSource source);
std::optional<LocationSource> parse_location_source(std::string_view s);

struct LocatedCase {
  ClassifiedCase classified;
  GeoPoint location;
  LocationSource source = LocationSource::CountyOnly;
  double confidence = 0.0;

  /// county_only cases carry a county centroid and stay out of distance
  /// statistics.
  bool eligible_for_stats() const {
    return source != LocationSource::CountyOnly;
  }
};

struct LocateOptions {
  double history_place_confidence = 0.65;
  double county_only_confidence = 0.25;
  /// When set, resolved coordinates outside the region are excluded with an
  /// issue instead of entering the analysis.
  std::optional<BoundingBox> region;
};

/// Resolve one non-dropped case. Precedence: facility/landmark mention from
/// history (community cases only), given city, imputed city, county centroid.
/// Returns nullopt and fills *issue when no coordinate can be resolved.
std::optional<LocatedCase> resolve_location(const ClassifiedCase& c,
                                            const CityFrequencyTable& table,
                                            const Gazetteer& gazetteer,
                                            const LocateOptions& options,
                                            RowIssue* issue);

struct LocateResult {
  std::vector<LocatedCase> cases;
  std::vector<RowIssue> issues;
};

/// Resolve all non-dropped cases; the frequency table is built from the
/// underlying records.
LocateResult resolve_locations(const std::vector<ClassifiedCase>& cases,
                               const Gazetteer& gazetteer,
                               const LocateOptions& options = {});

/// Delimited export: id, class, source, confidence, lat, lon.
std::string serialize_located_cases(const std::vector<LocatedCase>& cases);

}  // namespace chirail
