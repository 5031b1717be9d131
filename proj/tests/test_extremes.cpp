#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gafzeros/extremes.hpp"

using namespace gafz;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

ZeroSet make_zeroset(const EnsembleSpec& spec, const std::vector<cdouble>& z) {
  ZeroSet zs;
  zs.spec = spec;
  for (const auto& c : z) zs.zeros.push_back(make_point(spec, c));
  zs.residuals.assign(z.size(), 0.0);
  return zs;
}

// Points uniform with respect to omega/pi on each surface (the GEF on a disk
// of radius `spread`); optionally clustered to produce many close pairs.
std::vector<cdouble> random_points(Model model, int m, double spread,
                                   Stream& s, bool clustered) {
  std::vector<cdouble> out;
  for (int t = 0; t < m; ++t) {
    if (clustered && t > 0 && s.uniform() < 0.5) {
      const cdouble base = out[static_cast<std::size_t>(s.next_u64() % out.size())];
      cdouble step = 1e-3 * s.complex_gaussian();
      if (model == Model::SU2 && std::abs(base) > 1.0) step *= std::norm(base);
      out.push_back(base + step);
      continue;
    }
    switch (model) {
      case Model::SU2: {
        // |z|^2 = u/(1-u) makes 1/(1+|z|^2) uniform.
        const double u = s.uniform();
        out.push_back(std::polar(std::sqrt(u / (1.0 - u)),
                                 2.0 * std::numbers::pi * s.uniform()));
        break;
      }
      case Model::TorusTheta:
        out.emplace_back(s.uniform(), s.uniform());
        break;
      case Model::GEF:
        out.push_back(std::polar(spread * std::sqrt(s.uniform()),
                                 2.0 * std::numbers::pi * s.uniform()));
        break;
    }
  }
  return out;
}

EnsembleSpec spec_for(Model model) {
  switch (model) {
    case Model::SU2: return EnsembleSpec::su2(64);
    case Model::TorusTheta: return EnsembleSpec::torus(64);
    case Model::GEF: return EnsembleSpec::gef(8.0);
  }
  return {};
}

void expect_same(const std::vector<NearPair>& a, const std::vector<NearPair>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].i, b[t].i);
    EXPECT_EQ(a[t].j, b[t].j);
    EXPECT_EQ(a[t].distance, b[t].distance);
  }
}

}  // namespace

TEST(NearPairs, TwoPointsOneEvent) {
  const auto spec = EnsembleSpec::su2(512);
  const double a = 1.0;
  const double an = a / rescale_factor(spec);
  // FS distance from 0 to t is atan(t).
  const auto zs = make_zeroset(spec, {0.0, std::tan(an / 2.0)});
  Stream s(1, 0);
  const auto ev = pair_events(zs, a, s);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].i, 0);
  EXPECT_EQ(ev[0].j, 1);
  EXPECT_NEAR(ev[0].x, a / 2.0, 1e-12);
  EXPECT_EQ(ev[0].x, rescale_factor(spec) * ev[0].raw_distance);
  EXPECT_TRUE(ev[0].mark == zs.zeros[0] || ev[0].mark == zs.zeros[1]);
}

TEST(NearPairs, HundredPointsMatchBruteForce) {
  for (Model model : {Model::SU2, Model::TorusTheta, Model::GEF}) {
    const auto spec = spec_for(model);
    Stream s(2, static_cast<std::uint64_t>(model));
    const auto zs = make_zeroset(spec, random_points(model, 100, 8.0, s, false));
    const double r = 0.3;
    expect_same(near_pairs(spec, zs.zeros, r), near_pairs_brute(spec, zs.zeros, r));
    EXPECT_FALSE(near_pairs(spec, zs.zeros, r).empty()) << model_name(model);
  }
}

TEST(NearPairs, CellListEqualsBruteForceProperty) {
  // Sizes 2..300, radii from tiny to beyond the diameter, uniform and
  // clustered inputs.
  Stream s(3, 0);
  const std::vector<int> sizes{2, 3, 5, 17, 64, 150, 300};
  const std::vector<double> radii{1e-4, 3e-3, 0.02, 0.1, 0.5, 1.2, 3.0, 40.0};
  for (Model model : {Model::SU2, Model::TorusTheta, Model::GEF}) {
    const auto spec = spec_for(model);
    for (int m : sizes) {
      for (bool clustered : {false, true}) {
        const auto zs =
            make_zeroset(spec, random_points(model, m, 8.0, s, clustered));
        for (double r : radii) {
          SCOPED_TRACE(::testing::Message() << model_name(model) << " m=" << m
                                            << " r=" << r);
          expect_same(near_pairs(spec, zs.zeros, r),
                      near_pairs_brute(spec, zs.zeros, r));
        }
      }
    }
  }
}

TEST(NearPairs, TorusWrapsAcrossEdges) {
  const auto spec = EnsembleSpec::torus(16);
  const auto zs = make_zeroset(spec, {cdouble(0.001, 0.5), cdouble(0.999, 0.5),
                                      cdouble(0.5, 0.0005), cdouble(0.5, 0.9995),
                                      cdouble(0.9995, 0.9995)});
  const double r = 0.01 * kSqrtPi;
  expect_same(near_pairs(spec, zs.zeros, r), near_pairs_brute(spec, zs.zeros, r));
  EXPECT_EQ(near_pairs(spec, zs.zeros, r).size(), 2u);
}

TEST(KSmallest, TorusTriangle) {
  const auto spec = EnsembleSpec::torus(3);
  // |p| = 0.2 and |p - 0.1| = 0.25.
  const double px = (0.04 - 0.0625 + 0.01) / 0.2;
  const double py = std::sqrt(0.04 - px * px);
  const cdouble o(0.3, 0.3);
  const auto zs = make_zeroset(spec, {o, o + 0.1, o + cdouble(px, py)});
  const auto d = k_smallest(zs, 2);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[0], 0.1 * kSqrtPi, 1e-14);
  EXPECT_NEAR(d[1], 0.2 * kSqrtPi, 1e-14);
  EXPECT_NEAR(k_smallest(zs, 3)[2], 0.25 * kSqrtPi, 1e-14);
}

TEST(KSmallest, MatchesBruteSort) {
  Stream s(4, 0);
  for (Model model : {Model::SU2, Model::TorusTheta, Model::GEF}) {
    const auto spec = spec_for(model);
    for (int rep = 0; rep < 3; ++rep) {
      const auto zs = make_zeroset(spec, random_points(model, 200, 8.0, s, rep == 2));
      std::vector<double> all;
      for (std::size_t i = 0; i < zs.zeros.size(); ++i)
        for (std::size_t j = i + 1; j < zs.zeros.size(); ++j)
          all.push_back(dist(spec, zs.zeros[i], zs.zeros[j]));
      std::sort(all.begin(), all.end());
      for (int k : {1, 5, 40, 1000}) {
        const auto got = k_smallest(zs, k);
        ASSERT_EQ(got.size(), static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) EXPECT_EQ(got[static_cast<std::size_t>(t)], all[static_cast<std::size_t>(t)]);
      }
    }
  }
}

TEST(KSmallest, TwoPointsAndBadK) {
  const auto spec = EnsembleSpec::su2(2);
  const auto zs = make_zeroset(spec, {0.0, 1.0});
  const auto d = k_smallest(zs, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0], std::numbers::pi / 4.0, 1e-15);
  EXPECT_THROW(k_smallest(zs, 2), std::invalid_argument);
  EXPECT_THROW(k_smallest(zs, 0), std::invalid_argument);
}

TEST(Isolation, SingleEventKeptSharedZeroRemoved) {
  const auto spec = EnsembleSpec::gef(30.0);
  const auto zs = make_zeroset(spec, {0.0, 0.01, 0.02, 20.0, 20.01});
  PairEvent a{0, 1, 0.0, zs.zeros[0], 0.01};
  PairEvent b{1, 2, 0.0, zs.zeros[1], 0.01};
  PairEvent c{3, 4, 0.0, zs.zeros[3], 0.01};
  const double n = 900.0;
  ASSERT_LT(isolation_radius(n), 19.0);
  EXPECT_EQ(filter_isolated({a}, zs, n).size(), 1u);
  EXPECT_TRUE(filter_isolated({a, b}, zs, n).empty());
  const auto kept = filter_isolated({a, b, c}, zs, n);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].i, 3);
  EXPECT_DOUBLE_EQ(pair_distance(spec, zs, a, c), 19.99);
  EXPECT_NEAR(isolation_radius(512.0), 4.0 * std::pow(std::log(512.0), 2) / std::sqrt(512.0), 1e-15);
}

TEST(Marks, EndpointsChosenFairly) {
  const auto spec = EnsembleSpec::gef(5.0);
  const auto zs = make_zeroset(spec, {0.0, 0.1});
  const int trials = 40000;
  int first = 0;
  for (int t = 0; t < trials; ++t) {
    Stream s(5, static_cast<std::uint64_t>(t));
    const auto ev = pair_events(zs, 1.0, s);
    ASSERT_EQ(ev.size(), 1u);
    ASSERT_TRUE(ev[0].mark == zs.zeros[0] || ev[0].mark == zs.zeros[1]);
    first += ev[0].mark == zs.zeros[0];
  }
  const double se = 0.5 / std::sqrt(trials);
  EXPECT_LE(std::abs(first / static_cast<double>(trials) - 0.5), 3.0 * se);
}

TEST(CollectTrial, TwoZeroRecord) {
  const auto spec = EnsembleSpec::su2(2);
  const auto zs = make_zeroset(spec, {0.0, 1.0});
  Stream s(6, 0);
  const auto rec = collect_trial(zs, {{1.0, 2.0}, {Region::Whole, Region::Hemisphere}, 3}, s);
  ASSERT_EQ(rec.sigma.size(), 1u);
  EXPECT_NEAR(rec.sigma[0], kSigmaScale * std::pow(2.0, 0.75) * std::numbers::pi / 4.0, 1e-15);
  EXPECT_EQ(rec.marks.size(), 1u);
  EXPECT_EQ(rec.zero_count, 2);
  EXPECT_EQ(rec.counts.size(), 4u);
}

TEST(CollectTrial, CountsMonotoneAndDeterministic) {
  const TrialLayout layout{{0.5, 1.0, 1.5, 3.0},
                           {Region::Whole, Region::Hemisphere},
                           5};
  for (int t = 0; t < 20; ++t) {
    Stream a(7, static_cast<std::uint64_t>(t));
    const auto zs = find_zeros(sample_section(EnsembleSpec::su2(128), a));
    Stream b(7, static_cast<std::uint64_t>(t));
    const auto zs2 = find_zeros(sample_section(EnsembleSpec::su2(128), b));
    const auto r1 = collect_trial(zs, layout, a);
    const auto r2 = collect_trial(zs2, layout, b);
    EXPECT_EQ(r1.counts, r2.counts);
    EXPECT_EQ(r1.sigma, r2.sigma);
    EXPECT_EQ(r1.marks, r2.marks);
    ASSERT_EQ(r1.sigma.size(), 5u);
    for (std::size_t k = 1; k < r1.sigma.size(); ++k) EXPECT_LT(r1.sigma[k - 1], r1.sigma[k]);
    for (std::size_t a_i = 1; a_i < layout.thresholds.size(); ++a_i) {
      EXPECT_LE(r1.count(a_i - 1, 0, 2), r1.count(a_i, 0, 2));
      EXPECT_LE(r1.count(a_i, 1, 2), r1.count(a_i, 0, 2));
    }
    for (std::size_t a_i = 0; a_i < layout.thresholds.size(); ++a_i) {
      EXPECT_EQ(r1.pair_counts[a_i], r1.count(a_i, 0, 2));
      EXPECT_LE(r1.isolated_counts[a_i], r1.pair_counts[a_i]);
    }
    // Count at the top threshold agrees with a direct enumeration.
    const auto direct = near_pairs_brute(zs.spec, zs.zeros, 3.0 / rescale_factor(zs.spec));
    EXPECT_EQ(r1.pair_counts.back(), static_cast<std::int64_t>(direct.size()));
  }
}
