#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chirail/geo.hpp"
#include "chirail/locate.hpp"

namespace chirail {

struct CaseDistance {
  int case_id = 0;
  std::string line_id;
  double meters = 0.0;
};

struct DistanceSummary {
  ExposureClass group = ExposureClass::Community;
  int n = 0;
  double mean_m = 0.0;
  double median_m = 0.0;
  double q25_m = 0.0;
  double q75_m = 0.0;
  std::vector<CaseDistance> per_case;
};

struct LineAlignment {
  std::string line_id;
  double bearing_gap_deg = 0.0;
};

struct CoincidentCluster {
  GeoPoint center;
  double radius_m = 0.0;
  std::vector<int> case_ids;
  int count = 0;
};

struct StripeResult {
  double elongation_ratio = 1.0;
  double bearing_deg = 0.0;
  LineAlignment best_aligned_line;
};

struct ProximityResult {
  DistanceSummary community;
  DistanceSummary travel;
  double permutation_p = 1.0;
  double monte_carlo_p = 1.0;
  double elongation_ratio = 1.0;
  double stripe_bearing_deg = 0.0;
  LineAlignment best_aligned_line;
  std::uint64_t seed = 0;
  int n_permutations = 0;
  int n_simulations = 0;
};

/// Mean coordinate of all located cases; shared projection origin.
GeoPoint case_centroid(const std::vector<LocatedCase>& cases);

/// Minimum over lines of point-to-polyline distance; ties go to the
/// lexicographically smaller line_id. Case must be stats-eligible.
CaseDistance nearest_rail_distance(const LocatedCase& c,
                                   const std::vector<RailLine>& lines,
                                   const GeoPoint& origin);

/// Distance summary over the eligible cases of one class. Throws when the
/// group has no eligible case.
DistanceSummary group_distance_summary(const std::vector<LocatedCase>& cases,
                                       ExposureClass class_filter,
                                       const std::vector<RailLine>& lines,
                                       const GeoPoint& origin);

/// One-sided label-permutation p-value for "community sits closer to rails
/// than travel": statistic T = mean(travel) - mean(community). Enumerates all
/// label assignments exactly when there are no more of them than n_perm,
/// otherwise uses n_perm seeded random shuffles with the add-one estimate
/// p = (1 + #{T_perm >= T_obs}) / (n_perm + 1). n_perm >= 100 required.
double permutation_test(const std::vector<double>& community_d,
                        const std::vector<double>& travel_d, int n_perm,
                        std::uint64_t seed);

/// Monte Carlo spatial null: point sets of the same size drawn uniformly over
/// the region; p = (1 + #{null mean distance <= observed mean}) / (n_sim + 1).
double monte_carlo_null(const std::vector<LocatedCase>& community_cases,
                        const BoundingBox& region,
                        const std::vector<RailLine>& lines, int n_sim,
                        std::uint64_t seed, const GeoPoint& origin);

/// Covariance elongation and principal bearing of the community point cloud,
/// plus the rail line whose own principal bearing is closest (mod 180).
/// lambda2 is floored at 1 m^2 so collinear clouds stay finite.
StripeResult stripe_analysis(const std::vector<LocatedCase>& community_cases,
                             const std::vector<RailLine>& lines,
                             const GeoPoint& origin);

/// Single-linkage grouping of cases within radius_m; clusters of size >= 2,
/// largest first, center = member centroid.
std::vector<CoincidentCluster> cluster_coincident(
    const std::vector<LocatedCase>& cases, double radius_m = 100.0);

struct AnalyzeConfig {
  BoundingBox region;
  int n_perm = 9999;
  int n_sim = 999;
  std::uint64_t seed = 0;
  double confidence_threshold = 0.0;
};

/// Full proximity analysis over stats-eligible cases at or above the
/// configured confidence threshold.
ProximityResult analyze_proximity(const std::vector<LocatedCase>& cases,
                                  const std::vector<RailLine>& lines,
                                  const AnalyzeConfig& config);

/// analyze_proximity restricted to cases with confidence >= threshold.
ProximityResult sensitivity_rerun(const std::vector<LocatedCase>& cases,
                                  const std::vector<RailLine>& lines,
                                  AnalyzeConfig config, double threshold);

}  // namespace chirail
