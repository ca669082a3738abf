#include "chirail/classify.hpp"

#include <algorithm>
#include <sstream>

#include "chirail/error.hpp"

namespace chirail {

std::string to_string(ExposureClass cls) {
  switch (cls) {
    case ExposureClass::Travel: return "travel";
    case ExposureClass::Community: return "community";
    case ExposureClass::Dropped: return "dropped";
  }
  return "community";
}

std::optional<ExposureClass> parse_exposure_class(std::string_view s) {
  const std::string t = to_lower(s);
  if (t == "travel") return ExposureClass::Travel;
  if (t == "community") return ExposureClass::Community;
  if (t == "dropped") return ExposureClass::Dropped;
  return std::nullopt;
}

void Ruleset::add(int priority, std::string rule_id, ExposureClass target,
                  std::string pattern) {
  for (const auto& r : rules_) {
    if (r.rule_id == rule_id) {
      throw ConfigError("duplicate rule id '" + rule_id + "'");
    }
    if (r.priority == priority) {
      throw ConfigError("rules '" + r.rule_id + "' and '" + rule_id +
                        "' share priority " + std::to_string(priority));
    }
  }
  ClassificationRule rule;
  rule.priority = priority;
  rule.rule_id = std::move(rule_id);
  rule.target = target;
  rule.pattern = std::move(pattern);
  try {
    rule.compiled = std::regex(rule.pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid pattern in rule '" + rule.rule_id +
                      "': " + e.what());
  }
  rules_.push_back(std::move(rule));
  std::sort(rules_.begin(), rules_.end(),
            [](const auto& a, const auto& b) { return a.priority < b.priority; });
}

Ruleset Ruleset::builtin() {
  Ruleset rs;
  // Tier 1: uninformative histories are dropped.
  rs.add(10, "drop_no_details", ExposureClass::Dropped, "no details reported");
  rs.add(11, "drop_empty", ExposureClass::Dropped, "^\\s*$");
  // Tier 2: negated travel mentions stay community. Must outrank the travel
  // tier, otherwise "no known history of travel to ..." reads as travel.
  rs.add(20, "community_travel_negated", ExposureClass::Community,
         "\\bno (known )?(history of )?(international )?travel\\b");
  // Tier 3: travel evidence.
  rs.add(30, "travel_returned_from", ExposureClass::Travel,
         "\\breturned\\b.*\\bfrom\\b");
  rs.add(31, "travel_to_place", ExposureClass::Travel,
         "\\btravel(ed|ing|led|ling)?\\b.*\\bto\\b");
  rs.add(32, "travel_cruise", ExposureClass::Travel, "\\bcruise\\b");
  rs.add(33, "travel_flew", ExposureClass::Travel, "\\bflew\\b");
  rs.add(34, "travel_out_of_state_resident", ExposureClass::Travel,
         "\\bresident of another state\\b");
  return rs;
}

Ruleset Ruleset::parse(std::string_view text) {
  Ruleset rs;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const auto tab = line.find('\t', start);
      if (tab == std::string::npos) {
        throw ConfigError("rules file line " + std::to_string(lineno) +
                          ": expected 4 tab-separated fields");
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));

    int priority = 0;
    try {
      priority = std::stoi(fields[0]);
    } catch (const std::exception&) {
      throw ConfigError("rules file line " + std::to_string(lineno) +
                        ": bad priority '" + fields[0] + "'");
    }
    const auto cls = parse_exposure_class(fields[2]);
    if (!cls) {
      throw ConfigError("rules file line " + std::to_string(lineno) +
                        ": unknown class '" + fields[2] + "'");
    }
    rs.add(priority, fields[1], *cls, fields[3]);
  }
  if (rs.rules_.empty()) throw ConfigError("rules file contains no rules");
  return rs;
}

std::string Ruleset::serialize() const {
  std::ostringstream out;
  for (const auto& r : rules_) {
    out << r.priority << '\t' << r.rule_id << '\t' << to_string(r.target)
        << '\t' << r.pattern << '\n';
  }
  return out.str();
}

Classification classify_history(const std::string& history_text,
                                const Ruleset& ruleset) {
  for (const auto& rule : ruleset.rules()) {
    if (std::regex_search(history_text, rule.compiled)) {
      return {rule.target, rule.rule_id};
    }
  }
  return {ExposureClass::Community, "default"};
}

std::pair<std::vector<ClassifiedCase>, DatasetStats> classify_all(
    const std::vector<CaseRecord>& records, const Ruleset& ruleset) {
  std::vector<ClassifiedCase> cases;
  cases.reserve(records.size());
  DatasetStats stats;
  for (const auto& rec : records) {
    const Classification c = classify_history(rec.history_text, ruleset);
    cases.push_back({rec, c.cls, c.fired_rule});
    ++stats.total;
    switch (c.cls) {
      case ExposureClass::Travel: ++stats.travel; break;
      case ExposureClass::Community: ++stats.community; break;
      case ExposureClass::Dropped: ++stats.dropped; break;
    }
    if (!rec.city) ++stats.missing_city;
  }
  return {std::move(cases), stats};
}

}  // namespace chirail
