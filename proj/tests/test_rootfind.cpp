#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "gafzeros/errors.hpp"
#include "gafzeros/rootfind.hpp"

using namespace gafz;

namespace {

constexpr double kPi = std::numbers::pi;

// Eigenvalues of the companion matrix of sum_j c_j z^j.
std::vector<cdouble> companion_roots(const std::vector<cdouble>& c) {
  const int d = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) m(i, d - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<cdouble> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + d);
  return out;
}

// Greedy nearest matching; returns the worst matched distance.
double match_distance(std::vector<cdouble> a, std::vector<cdouble> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cdouble p, cdouble q) {
      return std::abs(p - x) < std::abs(q - x);
    });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::vector<cdouble> chart0_coords(const ZeroSet& zs) {
  std::vector<cdouble> out;
  for (const auto& p : zs.zeros) out.push_back(affine0_coordinate(p));
  return out;
}

}  // namespace

TEST(Polynomial, SimpleRoots) {
  const auto r = roots_polynomial({-1.0, 0.0, 1.0});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_LT(match_distance(r, {1.0, -1.0}), 1e-15);
}

TEST(Polynomial, TripleRoot) {
  // (z - 2)^3 = z^3 - 6 z^2 + 12 z - 8
  const std::vector<cdouble> c = {-8.0, 12.0, -6.0, 1.0};
  const auto r = roots_polynomial(c);
  ASSERT_EQ(r.size(), 3u);
  for (const auto& z : r) {
    EXPECT_LT(std::abs(z - 2.0), 1e-4);
    EXPECT_LE(polynomial_relative_residual(c, z), 1e-12);
  }
}

TEST(Polynomial, ZeroCoefficientsAtEnds) {
  const auto r = roots_polynomial({0.0, 0.0, -4.0, 0.0, 1.0, 0.0});
  ASSERT_EQ(r.size(), 4u);
  EXPECT_LT(match_distance(r, {0.0, 0.0, 2.0, -2.0}), 1e-14);
  EXPECT_THROW(roots_polynomial({3.0}), std::invalid_argument);
  EXPECT_THROW(roots_polynomial({0.0, 0.0}), std::invalid_argument);
}

TEST(Polynomial, MatchesCompanionOracleDegree500) {
  Stream stream(31, 0);
  std::vector<cdouble> c(501);
  for (auto& v : c) v = stream.complex_gaussian();
  const auto ours = roots_polynomial(c);
  const auto oracle = companion_roots(c);
  EXPECT_LT(match_distance(ours, oracle), 1e-8);
  for (const auto& z : ours) EXPECT_LE(polynomial_relative_residual(c, z), 1e-12);
}

TEST(Polynomial, NonConvergenceReportsResidual) {
  Stream stream(32, 0);
  std::vector<cdouble> c(60);
  for (auto& v : c) v = stream.complex_gaussian();
  RootOptions opts;
  opts.max_iterations = 1;
  opts.polish_steps = 0;
  try {
    roots_polynomial(c, {}, opts);
    FAIL() << "expected RootFindError";
  } catch (const RootFindError& e) {
    EXPECT_GT(e.worst_residual(), 1e-12);
  }
}

TEST(Su2Zeros, DegreeOneExamples) {
  const auto spec = EnsembleSpec::su2(1);
  const auto a = zeros_su2(make_section(spec, {1.0, 1.0}));
  ASSERT_EQ(a.zeros.size(), 1u);
  EXPECT_LT(std::abs(affine0_coordinate(a.zeros[0]) + 1.0), 1e-15);
  const auto b = zeros_su2(make_section(spec, {1.0, 0.0}));
  ASSERT_EQ(b.zeros.size(), 1u);
  EXPECT_EQ(b.zeros[0].chart, Chart::Affine1);
  EXPECT_EQ(b.zeros[0].coord, 0.0);
  const auto c = zeros_su2(make_section(spec, {0.0, 1.0}));
  EXPECT_EQ(c.zeros[0].chart, Chart::Affine0);
  EXPECT_EQ(c.zeros[0].coord, 0.0);
}

TEST(Su2Zeros, ExactCountManyTrials) {
  const auto spec = EnsembleSpec::su2(300);
  for (std::uint64_t t = 0; t < 300; ++t) {
    Stream stream(33, t);
    const auto s = sample_section(spec, stream);
    const auto zs = zeros_su2(s);
    ASSERT_EQ(zs.zeros.size(), 300u);
    const auto diag = verify_zeroset(s, zs);
    ASSERT_TRUE(diag.pass) << diag.failure;
  }
}

TEST(Su2Zeros, RotationCovariance) {
  const int n = 40;
  const auto spec = EnsembleSpec::su2(n);
  Stream stream(34, 0);
  const auto s = sample_section(spec, stream);
  const double theta = 0.77;
  std::vector<cdouble> rotated = s.coefficients;
  for (int j = 0; j <= n; ++j) {
    rotated[static_cast<std::size_t>(j)] *= std::polar(1.0, -j * theta);
  }
  // p(e^{-i theta} z) has zeros e^{i theta} z_k.
  const auto a = chart0_coords(zeros_su2(s));
  auto b = chart0_coords(zeros_su2(make_section(spec, rotated)));
  std::vector<cdouble> expect;
  for (const auto& z : a) expect.push_back(std::polar(1.0, theta) * z);
  std::vector<SurfacePoint> pa, pb;
  double worst = 0.0;
  for (const auto& z : expect) {
    double best = INFINITY;
    for (const auto& w : b) {
      best = std::min(best, dist(spec, make_point(spec, z), make_point(spec, w)));
    }
    worst = std::max(worst, best);
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Su2Zeros, ChartsAgreeInOverlap) {
  const int n = 200;
  const auto spec = EnsembleSpec::su2(n);
  int compared = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Stream stream(35, t);
    const auto s = sample_section(spec, stream);
    const auto [chart0, chart1] = su2_chart_roots(s);
    for (const auto& z : chart0) {
      const double r = std::abs(z);
      if (r < 0.9 || r > 1.1) continue;
      double best = INFINITY;
      for (const auto& zeta : chart1) {
        best = std::min(best, dist(spec, {Chart::Affine0, z},
                                   {Chart::Affine1, zeta}));
      }
      EXPECT_LT(best, 1e-10);
      ++compared;
    }
  }
  EXPECT_GT(compared, 100);
}

TEST(Su2Zeros, DensityMatchesFubiniStudy) {
  // u = 1/(1+|z|^2) is uniform on [0,1] under omega/pi.
  const int n = 50;
  const int trials = 2000;
  const int bins = 10;
  const auto spec = EnsembleSpec::su2(n);
  std::vector<std::vector<int>> per_trial(trials, std::vector<int>(bins, 0));
  for (int t = 0; t < trials; ++t) {
    Stream stream(36, static_cast<std::uint64_t>(t));
    const auto zs = zeros_su2(sample_section(spec, stream));
    for (const auto& p : zs.zeros) {
      const double r2 = std::norm(p.coord);
      const double u = p.chart == Chart::Affine0 ? 1.0 / (1.0 + r2) : r2 / (1.0 + r2);
      per_trial[t][std::min(bins - 1, static_cast<int>(u * bins))]++;
    }
  }
  for (int b = 0; b < bins; ++b) {
    double mean = 0.0, m2 = 0.0;
    for (int t = 0; t < trials; ++t) {
      mean += per_trial[t][b];
      m2 += per_trial[t][b] * per_trial[t][b];
    }
    mean /= trials;
    const double se = std::sqrt((m2 / trials - mean * mean) / trials);
    EXPECT_LE(std::abs(mean - n / static_cast<double>(bins)), 3.5 * se) << b;
  }
}

TEST(TorusZeros, SingleZeroAtCenter) {
  const auto spec = EnsembleSpec::torus(1);
  const auto zs = zeros_torus(make_section(spec, {1.0}));
  ASSERT_EQ(zs.zeros.size(), 1u);
  EXPECT_LT(std::abs(zs.zeros[0].coord - cdouble(0.5, 0.5)), 1e-10);
}

TEST(TorusZeros, WindingAndCount) {
  for (int n : {2, 7, 33, 128, 512}) {
    const auto spec = EnsembleSpec::torus(n);
    for (std::uint64_t t = 0; t < 5; ++t) {
      Stream stream(37, t + 100 * static_cast<std::uint64_t>(n));
      const auto s = sample_section(spec, stream);
      EXPECT_EQ(torus_winding(s), n);
      const auto zs = zeros_torus(s);
      ASSERT_EQ(static_cast<int>(zs.zeros.size()), n);
      const auto diag = verify_zeroset(s, zs);
      EXPECT_TRUE(diag.pass) << diag.failure;
    }
  }
}

TEST(TorusZeros, MatchesGridOracle) {
  // Local minima of |s~| on a 512x512 grid, polished by Newton.
  const int n = 64;
  const int g = 512;
  const auto spec = EnsembleSpec::torus(n);
  Stream stream(38, 0);
  const auto s = sample_section(spec, stream);
  std::vector<double> mag(g * g);
  for (int i = 0; i < g; ++i) {
    for (int k = 0; k < g; ++k) {
      mag[i * g + k] =
          std::abs(evaluate_weighted(s, cdouble((i + 0.5) / g, (k + 0.5) / g)));
    }
  }
  std::vector<cdouble> oracle;
  for (int i = 0; i < g; ++i) {
    for (int k = 0; k < g; ++k) {
      const double v = mag[i * g + k];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dk = -1; dk <= 1; ++dk) {
          if (di == 0 && dk == 0) continue;
          const int ii = (i + di + g) % g;
          const int kk = (k + dk + g) % g;
          if (mag[ii * g + kk] < v) {
            is_min = false;
            break;
          }
        }
      }
      if (!is_min) continue;
      cdouble z((i + 0.5) / g, (k + 0.5) / g);
      for (int it = 0; it < 50; ++it) {
        const auto v2 = detail::theta_section(s.coefficients, n, z, true);
        z -= v2.value / v2.derivative;
      }
      oracle.push_back(reduce_torus(z));
    }
  }
  const auto zs = zeros_torus(s);
  ASSERT_EQ(oracle.size(), zs.zeros.size());
  double worst = 0.0;
  for (const auto& w : oracle) {
    double best = INFINITY;
    for (const auto& p : zs.zeros) {
      best = std::min(best, dist(spec, p, make_point(spec, w)));
    }
    worst = std::max(worst, best);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(GefZeros, KnownZero) {
  for (double radius : {1.0, 3.0}) {
    const auto spec = EnsembleSpec::gef(radius);
    const auto zs = zeros_gef(make_section(spec, {1.0, -1.0}));
    ASSERT_EQ(zs.zeros.size(), 1u);
    EXPECT_LT(std::abs(zs.zeros[0].coord - 1.0), 1e-14);
  }
}

TEST(GefZeros, TruncationDoublingStable) {
  const auto spec = EnsembleSpec::gef(6.0);
  const auto big = EnsembleSpec::gef(6.0, 2 * spec.truncation);
  Stream stream(39, 0);
  const auto s = sample_section(big, stream);
  std::vector<cdouble> head(s.coefficients.begin(),
                            s.coefficients.begin() + spec.coefficient_count());
  const auto a = zeros_gef(make_section(spec, head));
  const auto b = zeros_gef(s);
  ASSERT_EQ(a.zeros.size(), b.zeros.size());
  double worst = 0.0;
  for (const auto& p : a.zeros) {
    double best = INFINITY;
    for (const auto& q : b.zeros) best = std::min(best, std::abs(p.coord - q.coord));
    worst = std::max(worst, best);
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(GefZeros, MeanCountIsAreaOverPi) {
  const double radius = 10.0;
  const auto spec = EnsembleSpec::gef(radius);
  const int trials = 1500;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    Stream stream(40, static_cast<std::uint64_t>(t));
    const auto s = sample_section(spec, stream);
    const auto zs = zeros_gef(s);
    const double c = static_cast<double>(zs.zeros.size());
    sum += c;
    sum2 += c * c;
    if (t < 20) {
      const auto diag = verify_zeroset(s, zs);
      EXPECT_TRUE(diag.pass) << diag.failure;
    }
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
  EXPECT_LE(std::abs(mean - radius * radius), 3.0 * se + 1e-9);
  EXPECT_LE(std::abs(mean - radius * radius), 1.0);
}

TEST(Verify, DetectsBadZeroSets) {
  const auto spec = EnsembleSpec::su2(5);
  Stream stream(41, 0);
  const auto s = sample_section(spec, stream);
  auto zs = zeros_su2(s);
  EXPECT_TRUE(verify_zeroset(s, zs).pass);
  auto moved = zs;
  moved.zeros[2].coord += 1e-3;
  const auto d = verify_zeroset(s, moved);
  EXPECT_FALSE(d.pass);
  EXPECT_EQ(d.worst_index, 2);
  ZeroSet empty;
  empty.spec = spec;
  const auto e = verify_zeroset(s, empty);
  EXPECT_FALSE(e.pass);
  EXPECT_EQ(e.count, 0);
  EXPECT_EQ(e.expected_count, 5);
}
