#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chirail/ingest.hpp"

namespace chirail {

enum class ExposureClass { Travel, Community, Dropped };

std::string to_string(ExposureClass cls);
std::optional<ExposureClass> parse_exposure_class(std::string_view s);

/// One ordered rule: the lowest priority that matches wins.
struct ClassificationRule {
  int priority = 0;
  std::string rule_id;
  ExposureClass target = ExposureClass::Community;
  std::string pattern;  // ECMAScript regex, matched case-sensitively on
                        // lower-cased history text
  std::regex compiled;
};

class Ruleset {
 public:
  /// Built-in three-tier ruleset: drop patterns, then travel-negation and
  /// travel patterns, community by default.
  static Ruleset builtin();

  /// Parse the rules-file format: one rule per line,
  /// `priority <TAB> rule_id <TAB> class <TAB> pattern`; '#' comments and
  /// blank lines allowed. Throws on bad patterns (naming the rule_id) and on
  /// duplicate ids or priorities.
  static Ruleset parse(std::string_view text);

  const std::vector<ClassificationRule>& rules() const { return rules_; }

  /// Rules-file rendering of this ruleset.
  std::string serialize() const;

 private:
  void add(int priority, std::string rule_id, ExposureClass target,
           std::string pattern);
  std::vector<ClassificationRule> rules_;  // sorted by priority
};

struct Classification {
  ExposureClass cls = ExposureClass::Community;
  std::string fired_rule;  // "default" when no rule matched
};

/// First matching rule wins; no match means Community via "default".
Classification classify_history(const std::string& history_text,
                                const Ruleset& ruleset);

struct ClassifiedCase {
  CaseRecord record;
  ExposureClass cls = ExposureClass::Community;
  std::string fired_rule;
};

struct DatasetStats {
  int total = 0;
  int travel = 0;
  int community = 0;
  int dropped = 0;
  int missing_city = 0;

  bool operator==(const DatasetStats&) const = default;
};

std::pair<std::vector<ClassifiedCase>, DatasetStats> classify_all(
    const std::vector<CaseRecord>& records, const Ruleset& ruleset);

}  // namespace chirail
