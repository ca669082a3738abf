#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chirail/geo.hpp"

namespace chirail {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
};

/// Render as M/D/YYYY (no zero padding), the form the case tables use.
std::string to_string(const Date& d);

/// Parse M/D/YYYY with 1-2 digit month/day and 4-digit year. Rejects
/// impossible calendar dates.
std::optional<Date> parse_date(std::string_view text);

/// One reported case. city is absent when the source cell was empty or the
/// sentinel "Unknown".
struct CaseRecord {
  int id = 0;
  Date date_announced;
  std::string county;                // normalized, non-empty
  std::optional<std::string> city;   // normalized, non-empty when present
  std::string history_text;          // lower-cased, trimmed

  bool operator==(const CaseRecord&) const = default;
};

/// Machine-readable problem with one input row.
struct RowIssue {
  int row = 0;  // source row id (or 1-based data row index when no id column)
  std::string field;
  std::string code;
  std::string message;
};

/// Maps logical fields to source column names. Defaults match the case
/// tables' headers, including the "histroy" spelling; "history" is accepted
/// as a fallback for that field.
struct SchemaConfig {
  std::string id = "id";  // optional column; row index used when absent
  std::string date = "data_announced";
  std::string county = "COUNTY";
  std::string city = "CITY";
  std::string history = "histroy";
};

struct ParsedCases {
  std::vector<CaseRecord> records;
  std::vector<RowIssue> issues;
};

/// Strip periods, collapse whitespace, title-case. Idempotent.
std::string normalize_place_name(std::string_view raw);

std::string to_lower(std::string_view s);

/// Parse the delimited case table. Every data row becomes either a record or
/// an issue; nothing is silently dropped. Throws ConfigError when a required
/// column is missing and InputError on an empty file.
ParsedCases parse_case_records(std::string_view raw_table,
                               const SchemaConfig& schema = {});

/// Canonical CSV serialization of case records (id, date, county, city,
/// history; absent city written as "Unknown"). Re-parsing yields the same
/// records.
std::string serialize_case_records(const std::vector<CaseRecord>& records);

enum class PlaceKind { City, Landmark, Facility };

std::string to_string(PlaceKind kind);
std::optional<PlaceKind> parse_place_kind(std::string_view s);

struct GazetteerEntry {
  std::string canonical_name;
  std::vector<std::string> aliases;
  PlaceKind kind = PlaceKind::City;
  std::optional<std::string> county;  // normalized
  GeoPoint location;
};

/// Place lexicon with a case-insensitive name/alias index.
class Gazetteer {
 public:
  void add(GazetteerEntry entry);  // throws on duplicate name or alias collision

  /// Case-insensitive lookup over canonical names and aliases.
  const GazetteerEntry* lookup(std::string_view name) const;

  /// Mean coordinate of this county's city entries (any kind as fallback).
  std::optional<GeoPoint> county_centroid(std::string_view normalized_county) const;

  const std::vector<GazetteerEntry>& entries() const { return entries_; }

 private:
  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;  // lower-cased name -> entry
};

/// Columns: canonical_name, aliases (semicolon-separated), kind, county,
/// lat, lon. Throws on collisions and out-of-range coordinates.
Gazetteer load_gazetteer(std::string_view raw_table);

/// Greater Chicago study region.
BoundingBox default_study_region();

/// Accepts a GeoJSON FeatureCollection of LineString/MultiLineString features
/// carrying a line-id property, or a GTFS shapes table (shape_id, lat, lon,
/// sequence). Vertices outside the region are an error naming the line.
std::vector<RailLine> load_rail_lines(std::string_view geometry_input,
                                      const BoundingBox& region);

}  // namespace chirail
