#include "chirail/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chirail/error.hpp"
#include "chirail/rng.hpp"

namespace chirail {

namespace {

// substream ids, one per stochastic operation
constexpr std::uint64_t kPermutationStream = 1;
constexpr std::uint64_t kMonteCarloStream = 2;

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// type-7 quantile (linear interpolation), values must be sorted
double quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// C(n, k) saturating at limit
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k,
                              std::uint64_t limit) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (result > limit) return limit + 1;
    result = result * (n - k + i) / i;
  }
  return std::min(result, limit + 1);
}

}  // namespace

GeoPoint case_centroid(const std::vector<LocatedCase>& cases) {
  if (cases.empty()) throw InputError("cannot take centroid of zero cases");
  double lat = 0.0, lon = 0.0;
  for (const auto& c : cases) {
    lat += c.location.lat;
    lon += c.location.lon;
  }
  const auto n = static_cast<double>(cases.size());
  return GeoPoint{lat / n, lon / n};
}

CaseDistance nearest_rail_distance(const LocatedCase& c,
                                   const std::vector<RailLine>& lines,
                                   const GeoPoint& origin) {
  if (lines.empty()) throw InputError("no rail lines to measure against");
  CaseDistance best;
  best.case_id = c.classified.record.id;
  best.meters = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    const double d = point_to_polyline_distance(c.location, line, origin).meters;
    if (d < best.meters || (d == best.meters && line.line_id < best.line_id)) {
      best.meters = d;
      best.line_id = line.line_id;
    }
  }
  return best;
}

DistanceSummary group_distance_summary(const std::vector<LocatedCase>& cases,
                                       ExposureClass class_filter,
                                       const std::vector<RailLine>& lines,
                                       const GeoPoint& origin) {
  DistanceSummary summary;
  summary.group = class_filter;
  std::vector<double> distances;
  for (const auto& c : cases) {
    if (c.classified.cls != class_filter || !c.eligible_for_stats()) continue;
    summary.per_case.push_back(nearest_rail_distance(c, lines, origin));
    distances.push_back(summary.per_case.back().meters);
  }
  if (distances.empty()) {
    throw InputError("no stats-eligible cases in group '" +
                     to_string(class_filter) + "'");
  }
  summary.n = static_cast<int>(distances.size());
  summary.mean_m = mean(distances);
  std::sort(distances.begin(), distances.end());
  summary.q25_m = quantile(distances, 0.25);
  summary.median_m = quantile(distances, 0.5);
  summary.q75_m = quantile(distances, 0.75);
  return summary;
}

double permutation_test(const std::vector<double>& community_d,
                        const std::vector<double>& travel_d, int n_perm,
                        std::uint64_t seed) {
  if (community_d.empty() || travel_d.empty()) {
    throw InputError("permutation test needs both groups non-empty");
  }
  if (n_perm < 100) {
    throw InputError("n_perm must be at least 100, got " +
                     std::to_string(n_perm));
  }
  std::vector<double> pool = community_d;
  pool.insert(pool.end(), travel_d.begin(), travel_d.end());
  const std::size_t n = pool.size();
  const std::size_t n_travel = travel_d.size();
  const double pool_sum = std::accumulate(pool.begin(), pool.end(), 0.0);

  // T = mean(travel) - mean(community), as a function of the travel-label sum
  auto statistic = [&](double travel_sum) {
    const double community_sum = pool_sum - travel_sum;
    return travel_sum / static_cast<double>(n_travel) -
           community_sum / static_cast<double>(n - n_travel);
  };
  const double t_obs = statistic(
      std::accumulate(travel_d.begin(), travel_d.end(), 0.0));

  const std::uint64_t n_assignments =
      binomial_capped(n, n_travel, static_cast<std::uint64_t>(n_perm));
  if (n_assignments <= static_cast<std::uint64_t>(n_perm)) {
    // Exact mode: enumerate every label assignment.
    std::vector<std::size_t> pick(n_travel);
    std::iota(pick.begin(), pick.end(), 0);
    std::uint64_t at_least = 0;
    std::uint64_t total = 0;
    for (;;) {
      double travel_sum = 0.0;
      for (const std::size_t idx : pick) travel_sum += pool[idx];
      if (statistic(travel_sum) >= t_obs) ++at_least;
      ++total;
      // next combination
      std::size_t i = n_travel;
      while (i > 0 && pick[i - 1] == n - n_travel + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < n_travel; ++j) pick[j] = pick[j - 1] + 1;
    }
    return static_cast<double>(at_least) / static_cast<double>(total);
  }

  std::uint64_t at_least = 0;
  std::vector<double> shuffled(n);
  for (int rep = 0; rep < n_perm; ++rep) {
    Rng rng = Rng::substream(seed, kPermutationStream,
                             static_cast<std::uint64_t>(rep));
    shuffled = pool;
    rng.shuffle(shuffled.begin(), shuffled.end());
    const double travel_sum =
        std::accumulate(shuffled.begin(), shuffled.begin() + n_travel, 0.0);
    if (statistic(travel_sum) >= t_obs) ++at_least;
  }
  return static_cast<double>(1 + at_least) / static_cast<double>(n_perm + 1);
}

namespace {

double nearest_line_distance(const GeoPoint& p,
                             const std::vector<RailLine>& lines,
                             const GeoPoint& origin) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    best = std::min(best, point_to_polyline_distance(p, line, origin).meters);
  }
  return best;
}

}  // namespace

double monte_carlo_null(const std::vector<LocatedCase>& community_cases,
                        const BoundingBox& region,
                        const std::vector<RailLine>& lines, int n_sim,
                        std::uint64_t seed, const GeoPoint& origin) {
  if (n_sim < 100) {
    throw InputError("n_sim must be at least 100, got " + std::to_string(n_sim));
  }
  if (region.lat_span() <= 0.0 || region.lon_span() <= 0.0) {
    throw InputError("Monte Carlo region has zero area");
  }
  if (lines.empty()) throw InputError("no rail lines for Monte Carlo null");

  std::vector<double> observed;
  for (const auto& c : community_cases) {
    if (!c.eligible_for_stats()) continue;
    observed.push_back(nearest_line_distance(c.location, lines, origin));
  }
  if (observed.empty()) {
    throw InputError("no stats-eligible community cases for Monte Carlo null");
  }
  const double obs_mean = mean(observed);
  const std::size_t n_points = observed.size();

  std::uint64_t at_most = 0;
  for (int rep = 0; rep < n_sim; ++rep) {
    Rng rng = Rng::substream(seed, kMonteCarloStream,
                             static_cast<std::uint64_t>(rep));
    double total = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
      const GeoPoint p{region.min_lat + rng.next_double() * region.lat_span(),
                       region.min_lon + rng.next_double() * region.lon_span()};
      total += nearest_line_distance(p, lines, origin);
    }
    if (total / static_cast<double>(n_points) <= obs_mean) ++at_most;
  }
  return static_cast<double>(1 + at_most) / static_cast<double>(n_sim + 1);
}

namespace {

double bearing_gap(double a, double b) {
  double gap = std::fmod(std::abs(a - b), 180.0);
  return std::min(gap, 180.0 - gap);
}

}  // namespace

StripeResult stripe_analysis(const std::vector<LocatedCase>& community_cases,
                             const std::vector<RailLine>& lines,
                             const GeoPoint& origin) {
  std::vector<PlanarPoint> points;
  for (const auto& c : community_cases) {
    if (!c.eligible_for_stats()) continue;
    points.push_back(project_local(c.location, origin));
  }
  if (points.size() < 3) {
    throw InputError("stripe analysis needs at least 3 community points");
  }
  const CovarianceAxes axes = covariance_axes(points);  // throws if coincident

  StripeResult out;
  out.bearing_deg = axes.bearing_deg;
  out.elongation_ratio = axes.lambda1 / std::max(axes.lambda2, 1.0);

  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    std::vector<PlanarPoint> verts;
    verts.reserve(line.vertices.size());
    for (const auto& v : line.vertices) verts.push_back(project_local(v, origin));
    const double gap = bearing_gap(principal_bearing_deg(verts), out.bearing_deg);
    if (gap < best_gap ||
        (gap == best_gap && line.line_id < out.best_aligned_line.line_id)) {
      best_gap = gap;
      out.best_aligned_line = {line.line_id, gap};
    }
  }
  if (lines.empty()) {
    throw InputError("stripe analysis needs at least one rail line");
  }
  return out;
}

std::vector<CoincidentCluster> cluster_coincident(
    const std::vector<LocatedCase>& cases, double radius_m) {
  if (radius_m <= 0.0) throw InputError("cluster radius must be positive");
  const std::size_t n = cases.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (haversine(cases[i].location, cases[j].location) <= radius_m) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::vector<CoincidentCluster> clusters;
  for (const auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    CoincidentCluster cluster;
    double lat = 0.0, lon = 0.0;
    for (const std::size_t i : members) {
      cluster.case_ids.push_back(cases[i].classified.record.id);
      lat += cases[i].location.lat;
      lon += cases[i].location.lon;
    }
    const auto m = static_cast<double>(members.size());
    cluster.center = GeoPoint{lat / m, lon / m};
    for (const std::size_t i : members) {
      cluster.radius_m =
          std::max(cluster.radius_m, haversine(cluster.center, cases[i].location));
    }
    cluster.count = static_cast<int>(members.size());
    std::sort(cluster.case_ids.begin(), cluster.case_ids.end());
    clusters.push_back(std::move(cluster));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const CoincidentCluster& a, const CoincidentCluster& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.case_ids.front() < b.case_ids.front();
            });
  return clusters;
}

ProximityResult analyze_proximity(const std::vector<LocatedCase>& cases,
                                  const std::vector<RailLine>& lines,
                                  const AnalyzeConfig& config) {
  if (cases.empty()) throw InputError("no located cases to analyze");
  const GeoPoint origin = case_centroid(cases);

  std::vector<LocatedCase> kept;
  for (const auto& c : cases) {
    if (c.confidence >= config.confidence_threshold) kept.push_back(c);
  }

  ProximityResult result;
  result.community =
      group_distance_summary(kept, ExposureClass::Community, lines, origin);
  result.travel =
      group_distance_summary(kept, ExposureClass::Travel, lines, origin);

  std::vector<double> community_d, travel_d;
  for (const auto& d : result.community.per_case) community_d.push_back(d.meters);
  for (const auto& d : result.travel.per_case) travel_d.push_back(d.meters);

  result.permutation_p =
      permutation_test(community_d, travel_d, config.n_perm, config.seed);

  std::vector<LocatedCase> community_cases;
  for (const auto& c : kept) {
    if (c.classified.cls == ExposureClass::Community) community_cases.push_back(c);
  }
  result.monte_carlo_p = monte_carlo_null(community_cases, config.region, lines,
                                          config.n_sim, config.seed, origin);

  const StripeResult stripe = stripe_analysis(community_cases, lines, origin);
  result.elongation_ratio = stripe.elongation_ratio;
  result.stripe_bearing_deg = stripe.bearing_deg;
  result.best_aligned_line = stripe.best_aligned_line;

  result.seed = config.seed;
  result.n_permutations = config.n_perm;
  result.n_simulations = config.n_sim;
  return result;
}

ProximityResult sensitivity_rerun(const std::vector<LocatedCase>& cases,
                                  const std::vector<RailLine>& lines,
                                  AnalyzeConfig config, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw InputError("confidence threshold must be in [0, 1]");
  }
  config.confidence_threshold = threshold;
  try {
    return analyze_proximity(cases, lines, config);
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " (at confidence threshold " +
                     std::to_string(threshold) + ")");
  }
}

}  // namespace chirail
