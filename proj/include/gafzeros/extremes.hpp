#pragma once

#include <cstdint>
#include <vector>

#include "gafzeros/geometry.hpp"
#include "gafzeros/rng.hpp"
#include "gafzeros/rootfind.hpp"

namespace gafz {

/// A pair of zeros closer than some radius. Indices refer to the point list
/// that was searched; i < j.
struct NearPair {
  int i = 0;
  int j = 0;
  double distance = 0.0;
};

/// Orders by distance, then (i, j). Equal distances are treated as
/// impossible; the index fallback only makes the order total.
bool near_pair_less(const NearPair& a, const NearPair& b);

/// All pairs with dist < radius, sorted with near_pair_less. Uses a cell
/// list: SU2 points are bucketed by their unit-sphere embedding, torus
/// buckets wrap around the square, GEF buckets cover the plane.
std::vector<NearPair> near_pairs(const EnsembleSpec& spec,
                                 const std::vector<SurfacePoint>& points,
                                 double radius);

/// O(m^2) reference for near_pairs, same output order.
std::vector<NearPair> near_pairs_brute(const EnsembleSpec& spec,
                                       const std::vector<SurfacePoint>& points,
                                       double radius);

struct PairEvent {
  int i = 0;
  int j = 0;
  /// rescale_factor(spec) * raw_distance.
  double x = 0.0;
  /// Position of zero i or zero j, chosen by a fair coin.
  SurfacePoint mark;
  double raw_distance = 0.0;
};

/// Events for all pairs with raw distance below a / rescale_factor(spec), in
/// near_pair_less order. One coin is drawn from `stream` per event, in order.
std::vector<PairEvent> pair_events(const ZeroSet& zeros, double a,
                                   Stream& stream);

/// The k smallest pairwise geodesic distances, ascending. The search radius
/// starts at 4 / rescale_factor and doubles until k pairs are inside.
/// Throws std::invalid_argument unless 1 <= k <= m(m-1)/2.
std::vector<double> k_smallest(const ZeroSet& zeros, int k);

/// Pair-set distance: min over the four endpoint combinations.
double pair_distance(const EnsembleSpec& spec, const ZeroSet& zeros,
                     const PairEvent& a, const PairEvent& b);

/// 4 log^2(n) / sqrt(n).
double isolation_radius(double n);

/// Keeps the events with no other event within isolation_radius(n) in
/// pair-set distance.
std::vector<PairEvent> filter_isolated(const std::vector<PairEvent>& events,
                                       const ZeroSet& zeros, double n);

/// (1/8)^{1/4}: maps rescale_factor * distance to the sigma-tilde scale.
inline constexpr double kSigmaScale = 0.59460355750136053;

struct TrialLayout {
  std::vector<double> thresholds{1.0};
  std::vector<Region> regions{Region::Whole};
  int k_max = 3;
};

struct TrialRecord {
  SeedRecord seed;
  int zero_count = 0;
  /// sigma-tilde_k = kSigmaScale * rescale_factor * k-th smallest distance,
  /// for k = 1..min(k_max, number of pairs).
  std::vector<double> sigma;
  /// Marks of the pairs behind `sigma`.
  std::vector<SurfacePoint> marks;
  /// N(a, U), indexed [threshold * regions + region].
  std::vector<std::int64_t> counts;
  /// |I_n| and |I~_n| over the whole surface, per threshold.
  std::vector<std::int64_t> pair_counts;
  std::vector<std::int64_t> isolated_counts;

  std::int64_t count(std::size_t threshold, std::size_t region,
                     std::size_t region_count) const {
    return counts[threshold * region_count + region];
  }
};

/// Assembles one record. One search covers the top threshold and the k_max
/// smallest pairs; marks are drawn once per pair found, in near_pair_less
/// order, so the marks of the smallest pairs and the window counts agree.
TrialRecord collect_trial(const ZeroSet& zeros, const TrialLayout& layout,
                          Stream& stream);

/// n used by the isolation filter: the degree, or R^2 for the GEF.
double isolation_parameter(const EnsembleSpec& spec);

}  // namespace gafz
