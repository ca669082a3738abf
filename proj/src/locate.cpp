#include "chirail/locate.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "chirail/error.hpp"

namespace chirail {

CityFrequencyTable build_city_frequency(const std::vector<CaseRecord>& records) {
  CityFrequencyTable table;
  for (const auto& r : records) {
    if (r.city) ++table[r.county][*r.city];
  }
  return table;
}

std::optional<Imputation> impute_city(const CaseRecord& record,
                                      const CityFrequencyTable& table) {
  const auto county_it = table.find(record.county);
  if (county_it == table.end() || county_it->second.empty()) return std::nullopt;

  int total = 0;
  int best_count = 0;
  std::string best_city;
  // Map iteration is alphabetical, so the first city at the max count is the
  // tie-break winner.
  for (const auto& [city, count] : county_it->second) {
    total += count;
    if (count > best_count) {
      best_count = count;
      best_city = city;
    }
  }
  return Imputation{best_city, static_cast<double>(best_count) / total};
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool word_bounded(const std::string& text, std::size_t begin, std::size_t end) {
  if (begin > 0 && is_word_char(text[begin - 1])) return false;
  if (end < text.size() && is_word_char(text[end])) return false;
  return true;
}

}  // namespace

std::vector<PlaceMention> extract_place_mentions(const std::string& history_text,
                                                 const Gazetteer& gazetteer) {
  std::vector<PlaceMention> candidates;
  for (const auto& entry : gazetteer.entries()) {
    std::vector<std::string> names;
    names.push_back(to_lower(entry.canonical_name));
    for (const auto& a : entry.aliases) names.push_back(to_lower(a));
    for (const auto& name : names) {
      if (name.empty()) continue;
      std::size_t pos = 0;
      while ((pos = history_text.find(name, pos)) != std::string::npos) {
        const std::size_t end = pos + name.size();
        if (word_bounded(history_text, pos, end)) {
          candidates.push_back(
              {history_text.substr(pos, name.size()), &entry, pos, end});
        }
        ++pos;
      }
    }
  }
  // Longest match first; suppress anything overlapping an accepted span.
  std::sort(candidates.begin(), candidates.end(),
            [](const PlaceMention& a, const PlaceMention& b) {
              const auto la = a.end - a.begin;
              const auto lb = b.end - b.begin;
              if (la != lb) return la > lb;
              return a.begin < b.begin;
            });
  std::vector<PlaceMention> accepted;
  for (const auto& c : candidates) {
    const bool overlaps = std::any_of(
        accepted.begin(), accepted.end(), [&](const PlaceMention& m) {
          return c.begin < m.end && m.begin < c.end;
        });
    if (!overlaps) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const PlaceMention& a, const PlaceMention& b) {
              return a.begin < b.begin;
            });
  return accepted;
}

std::string to_string(LocationSource source) {
  switch (source) {
    case LocationSource::CityGiven: return "city_given";
    case LocationSource::CityImputed: return "city_imputed";
    case LocationSource::HistoryPlace: return "history_place";
    case LocationSource::CountyOnly: return "county_only";
  }
  return "county_only";
}

std::optional<LocationSource> parse_location_source(std::string_view s) {
  if (s == "city_given") return LocationSource::CityGiven;
  if (s == "city_imputed") return LocationSource::CityImputed;
  if (s == "history_place") return LocationSource::HistoryPlace;
  if (s == "county_only") return LocationSource::CountyOnly;
  return std::nullopt;
}

std::optional<LocatedCase> resolve_location(const ClassifiedCase& c,
                                            const CityFrequencyTable& table,
                                            const Gazetteer& gazetteer,
                                            const LocateOptions& options,
                                            RowIssue* issue) {
  if (c.cls == ExposureClass::Dropped) {
    throw InputError("dropped case " + std::to_string(c.record.id) +
                     " passed to resolve_location");
  }
  LocatedCase out;
  out.classified = c;
  bool resolved = false;

  // Tier 1: facility/landmark mention in the history. The working-address
  // hypothesis only applies to non-travel cases.
  if (c.cls != ExposureClass::Travel) {
    for (const auto& mention :
         extract_place_mentions(c.record.history_text, gazetteer)) {
      if (mention.entry->kind == PlaceKind::Facility ||
          mention.entry->kind == PlaceKind::Landmark) {
        out.location = mention.entry->location;
        out.source = LocationSource::HistoryPlace;
        out.confidence = options.history_place_confidence;
        resolved = true;
        break;
      }
    }
  }

  if (!resolved && c.record.city) {
    const GazetteerEntry* entry = gazetteer.lookup(*c.record.city);
    if (entry == nullptr) {
      if (issue != nullptr) {
        *issue = {c.record.id, "city", "unresolved_location",
                  "city '" + *c.record.city + "' not in gazetteer"};
      }
      return std::nullopt;
    }
    out.location = entry->location;
    out.source = LocationSource::CityGiven;
    out.confidence = 1.0;
    resolved = true;
  }

  if (!resolved) {
    if (const auto imputed = impute_city(c.record, table)) {
      const GazetteerEntry* entry = gazetteer.lookup(imputed->city);
      if (entry == nullptr) {
        if (issue != nullptr) {
          *issue = {c.record.id, "city", "unresolved_location",
                    "imputed city '" + imputed->city + "' not in gazetteer"};
        }
        return std::nullopt;
      }
      out.location = entry->location;
      out.source = LocationSource::CityImputed;
      out.confidence = imputed->share;
      resolved = true;
    }
  }

  if (!resolved) {
    const auto centroid = gazetteer.county_centroid(c.record.county);
    if (!centroid) {
      if (issue != nullptr) {
        *issue = {c.record.id, "county", "unresolved_location",
                  "county '" + c.record.county + "' not in gazetteer"};
      }
      return std::nullopt;
    }
    out.location = *centroid;
    out.source = LocationSource::CountyOnly;
    out.confidence = options.county_only_confidence;
  }

  if (options.region && !options.region->contains(out.location)) {
    if (issue != nullptr) {
      *issue = {c.record.id, "location", "outside_region",
                "resolved coordinate (" + std::to_string(out.location.lat) +
                    ", " + std::to_string(out.location.lon) +
                    ") is outside the study region"};
    }
    return std::nullopt;
  }
  return out;
}

LocateResult resolve_locations(const std::vector<ClassifiedCase>& cases,
                               const Gazetteer& gazetteer,
                               const LocateOptions& options) {
  std::vector<CaseRecord> records;
  records.reserve(cases.size());
  for (const auto& c : cases) records.push_back(c.record);
  const CityFrequencyTable table = build_city_frequency(records);

  LocateResult out;
  for (const auto& c : cases) {
    if (c.cls == ExposureClass::Dropped) continue;
    RowIssue issue;
    if (auto located = resolve_location(c, table, gazetteer, options, &issue)) {
      out.cases.push_back(std::move(*located));
    } else {
      out.issues.push_back(std::move(issue));
    }
  }
  return out;
}

std::string serialize_located_cases(const std::vector<LocatedCase>& cases) {
  std::ostringstream out;
  out.precision(17);
  out << "id,class,source,confidence,lat,lon\n";
  for (const auto& c : cases) {
    out << c.classified.record.id << ',' << to_string(c.classified.cls) << ','
        << to_string(c.source) << ',' << c.confidence << ',' << c.location.lat
        << ',' << c.location.lon << '\n';
  }
  return out.str();
}

}  // namespace chirail
