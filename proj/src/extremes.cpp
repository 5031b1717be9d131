#include "gafzeros/extremes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gafz {

namespace {

using CellKey = std::array<std::int64_t, 3>;

// Relative slack on cell sizes so that rounding in the embedding can never
// push a true neighbor two cells away.
constexpr double kCellSlack = 1e-9;

std::int64_t cell_index(double coordinate, double size) {
  return static_cast<std::int64_t>(std::floor(coordinate / size));
}

struct Bucketed {
  std::vector<CellKey> keys;    // per point
  std::vector<int> order;       // point indices sorted by key
  std::vector<CellKey> sorted;  // keys in `order`
};

Bucketed bucket(std::vector<CellKey> keys) {
  Bucketed b;
  b.order.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) b.order[i] = static_cast<int>(i);
  std::sort(b.order.begin(), b.order.end(), [&](int x, int y) {
    return keys[static_cast<std::size_t>(x)] < keys[static_cast<std::size_t>(y)] ||
           (keys[static_cast<std::size_t>(x)] == keys[static_cast<std::size_t>(y)] && x < y);
  });
  b.sorted.reserve(keys.size());
  for (int i : b.order) b.sorted.push_back(keys[static_cast<std::size_t>(i)]);
  b.keys = std::move(keys);
  return b;
}

// Visits every point in the cell `key`.
template <class F>
void for_cell(const Bucketed& b, const CellKey& key, F&& f) {
  auto [lo, hi] = std::equal_range(b.sorted.begin(), b.sorted.end(), key);
  for (auto it = lo; it != hi; ++it) {
    f(b.order[static_cast<std::size_t>(it - b.sorted.begin())]);
  }
}

std::vector<NearPair> finish(std::vector<NearPair> pairs) {
  std::sort(pairs.begin(), pairs.end(), near_pair_less);
  return pairs;
}

}  // namespace

bool near_pair_less(const NearPair& a, const NearPair& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

std::vector<NearPair> near_pairs_brute(const EnsembleSpec& spec,
                                       const std::vector<SurfacePoint>& points,
                                       double radius) {
  std::vector<NearPair> out;
  const int m = static_cast<int>(points.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double d = dist(spec, points[static_cast<std::size_t>(i)],
                            points[static_cast<std::size_t>(j)]);
      if (d < radius) out.push_back({i, j, d});
    }
  }
  return finish(std::move(out));
}

std::vector<NearPair> near_pairs(const EnsembleSpec& spec,
                                 const std::vector<SurfacePoint>& points,
                                 double radius) {
  if (!(radius > 0.0) || points.size() < 2) return {};
  const std::size_t m = points.size();
  std::vector<NearPair> out;
  auto consider = [&](int i, int j) {
    if (j <= i) return;
    const double d = dist(spec, points[static_cast<std::size_t>(i)],
                          points[static_cast<std::size_t>(j)]);
    if (d < radius) out.push_back({i, j, d});
  };

  switch (spec.model) {
    case Model::SU2: {
      // FS distance d corresponds to chord 2 sin d on the unit sphere.
      const double chord =
          2.0 * std::sin(std::min(radius, std::numbers::pi / 2.0));
      const double h = chord * (1.0 + kCellSlack) + 1e-300;
      std::vector<CellKey> keys(m);
      for (std::size_t i = 0; i < m; ++i) {
        const auto e = sphere_embedding(points[i]);
        keys[i] = {cell_index(e[0] + 1.0, h), cell_index(e[1] + 1.0, h),
                   cell_index(e[2] + 1.0, h)};
      }
      const auto b = bucket(std::move(keys));
      for (std::size_t i = 0; i < m; ++i) {
        const CellKey& k = b.keys[i];
        for (std::int64_t dx = -1; dx <= 1; ++dx)
          for (std::int64_t dy = -1; dy <= 1; ++dy)
            for (std::int64_t dz = -1; dz <= 1; ++dz)
              for_cell(b, {k[0] + dx, k[1] + dy, k[2] + dz},
                       [&](int j) { consider(static_cast<int>(i), j); });
      }
      break;
    }
    case Model::TorusTheta: {
      const double flat = radius / std::sqrt(std::numbers::pi);
      const double cells = std::floor(1.0 / (flat * (1.0 + kCellSlack)));
      if (cells < 3.0) return near_pairs_brute(spec, points, radius);
      const auto c = static_cast<std::int64_t>(cells);
      std::vector<CellKey> keys(m);
      for (std::size_t i = 0; i < m; ++i) {
        const cdouble z = reduce_torus(points[i].coord);
        keys[i] = {std::min(c - 1, static_cast<std::int64_t>(z.real() * cells)),
                   std::min(c - 1, static_cast<std::int64_t>(z.imag() * cells)),
                   0};
      }
      const auto b = bucket(std::move(keys));
      for (std::size_t i = 0; i < m; ++i) {
        const CellKey& k = b.keys[i];
        for (std::int64_t dx = -1; dx <= 1; ++dx)
          for (std::int64_t dy = -1; dy <= 1; ++dy)
            for_cell(b, {(k[0] + dx + c) % c, (k[1] + dy + c) % c, 0},
                     [&](int j) { consider(static_cast<int>(i), j); });
      }
      break;
    }
    case Model::GEF: {
      const double h = radius * (1.0 + kCellSlack);
      std::vector<CellKey> keys(m);
      for (std::size_t i = 0; i < m; ++i) {
        const cdouble z = points[i].coord;
        keys[i] = {cell_index(z.real(), h), cell_index(z.imag(), h), 0};
      }
      const auto b = bucket(std::move(keys));
      for (std::size_t i = 0; i < m; ++i) {
        const CellKey& k = b.keys[i];
        for (std::int64_t dx = -1; dx <= 1; ++dx)
          for (std::int64_t dy = -1; dy <= 1; ++dy)
            for_cell(b, {k[0] + dx, k[1] + dy, 0},
                     [&](int j) { consider(static_cast<int>(i), j); });
      }
      break;
    }
  }
  return finish(std::move(out));
}

namespace {

PairEvent make_event(const ZeroSet& zeros, const NearPair& p, double rescale,
                     Stream& stream) {
  PairEvent e;
  e.i = p.i;
  e.j = p.j;
  e.raw_distance = p.distance;
  e.x = rescale * p.distance;
  e.mark = zeros.zeros[static_cast<std::size_t>(stream.coin() ? p.j : p.i)];
  return e;
}

// Pairs up to `radius`, widened by doubling until at least k are inside.
std::vector<NearPair> grow_until(const ZeroSet& zeros, double radius,
                                 std::size_t k) {
  const std::size_t m = zeros.zeros.size();
  const std::size_t all = m * (m - (m > 0 ? 1 : 0)) / 2;
  k = std::min(k, all);
  for (;;) {
    auto pairs = near_pairs(zeros.spec, zeros.zeros, radius);
    if (pairs.size() >= k) return pairs;
    radius *= 2.0;
  }
}

}  // namespace

std::vector<PairEvent> pair_events(const ZeroSet& zeros, double a,
                                   Stream& stream) {
  if (!(a > 0.0)) throw std::invalid_argument("pair_events: a must be > 0");
  const double rescale = rescale_factor(zeros.spec);
  const auto pairs = near_pairs(zeros.spec, zeros.zeros, a / rescale);
  std::vector<PairEvent> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(make_event(zeros, p, rescale, stream));
  return out;
}

std::vector<double> k_smallest(const ZeroSet& zeros, int k) {
  const auto m = static_cast<std::int64_t>(zeros.zeros.size());
  if (k < 1 || k > m * (m - 1) / 2) {
    throw std::invalid_argument("k_smallest: need 1 <= k <= m(m-1)/2");
  }
  const auto pairs = grow_until(zeros, 4.0 / rescale_factor(zeros.spec),
                                static_cast<std::size_t>(k));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) out.push_back(pairs[static_cast<std::size_t>(t)].distance);
  return out;
}

double pair_distance(const EnsembleSpec& spec, const ZeroSet& zeros,
                     const PairEvent& a, const PairEvent& b) {
  const auto& z = zeros.zeros;
  double best = std::numeric_limits<double>::infinity();
  for (int p : {a.i, a.j}) {
    for (int q : {b.i, b.j}) {
      if (p == q) return 0.0;
      best = std::min(best, dist(spec, z[static_cast<std::size_t>(p)],
                                 z[static_cast<std::size_t>(q)]));
    }
  }
  return best;
}

double isolation_radius(double n) {
  const double l = std::log(n);
  return 4.0 * l * l / std::sqrt(n);
}

std::vector<PairEvent> filter_isolated(const std::vector<PairEvent>& events,
                                       const ZeroSet& zeros, double n) {
  const double r = isolation_radius(n);
  std::vector<PairEvent> out;
  for (std::size_t s = 0; s < events.size(); ++s) {
    bool isolated = true;
    for (std::size_t t = 0; t < events.size() && isolated; ++t) {
      if (t != s && pair_distance(zeros.spec, zeros, events[s], events[t]) <= r) {
        isolated = false;
      }
    }
    if (isolated) out.push_back(events[s]);
  }
  return out;
}

double isolation_parameter(const EnsembleSpec& spec) {
  return spec.model == Model::GEF ? spec.radius * spec.radius
                                  : static_cast<double>(spec.degree);
}

TrialRecord collect_trial(const ZeroSet& zeros, const TrialLayout& layout,
                          Stream& stream) {
  if (layout.k_max < 1) throw std::invalid_argument("collect_trial: k_max < 1");
  for (double a : layout.thresholds) {
    if (!(a > 0.0)) throw std::invalid_argument("collect_trial: thresholds must be > 0");
  }
  const auto& spec = zeros.spec;
  const double rescale = rescale_factor(spec);
  double top = 0.0;
  for (double a : layout.thresholds) top = std::max(top, a);

  TrialRecord rec;
  rec.seed = stream.seed();
  rec.zero_count = static_cast<int>(zeros.zeros.size());

  std::vector<PairEvent> events;
  if (zeros.zeros.size() >= 2) {
    const auto pairs = grow_until(zeros, std::max(top, 4.0) / rescale,
                                  static_cast<std::size_t>(layout.k_max));
    events.reserve(pairs.size());
    for (const auto& p : pairs) events.push_back(make_event(zeros, p, rescale, stream));
  }

  const std::size_t kk = std::min(events.size(), static_cast<std::size_t>(layout.k_max));
  for (std::size_t t = 0; t < kk; ++t) {
    rec.sigma.push_back(kSigmaScale * events[t].x);
    rec.marks.push_back(events[t].mark);
  }

  const double n = isolation_parameter(spec);
  rec.counts.assign(layout.thresholds.size() * layout.regions.size(), 0);
  for (std::size_t a = 0; a < layout.thresholds.size(); ++a) {
    const double cut = layout.thresholds[a] / rescale;
    std::vector<PairEvent> inside;
    for (const auto& e : events) {
      if (e.raw_distance >= cut) break;
      inside.push_back(e);
      for (std::size_t u = 0; u < layout.regions.size(); ++u) {
        if (region_contains(spec, layout.regions[u], e.mark)) {
          ++rec.counts[a * layout.regions.size() + u];
        }
      }
    }
    rec.pair_counts.push_back(static_cast<std::int64_t>(inside.size()));
    rec.isolated_counts.push_back(
        static_cast<std::int64_t>(filter_isolated(inside, zeros, n).size()));
  }
  return rec;
}

}  // namespace gafz
