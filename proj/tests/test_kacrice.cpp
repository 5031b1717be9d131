#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gafzeros/errors.hpp"
#include "gafzeros/kacrice.hpp"
#include "gafzeros/rootfind.hpp"

using namespace gafz;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

Eigen::MatrixXcd random_psd(int k, Stream& s) {
  Eigen::MatrixXcd g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = s.complex_gaussian();
  return g * g.adjoint();
}

// H in long double from the closed form, used as an independent oracle.
long double H_long(long double t) {
  const long double sh = std::sinh(t);
  const long double ch = std::cosh(t);
  return ((sh * sh + t * t) * ch - 2.0L * t * sh) / (sh * sh * sh);
}

}  // namespace

TEST(HFunction, Values) {
  EXPECT_EQ(H(0.0), 0.0);
  const double t = 0.01;
  // The closed form applies at t = 1e-2 and carries ~1e-13 relative roundoff.
  EXPECT_NEAR(H(t), t - (2.0 / 9.0) * 1e-6 + (2.0 / 45.0) * 1e-10, 1e-14);
  EXPECT_NEAR(H(std::nextafter(t, 0.0)), t - (2.0 / 9.0) * 1e-6 + (2.0 / 45.0) * 1e-10, 1e-17);
  EXPECT_NEAR(H(t), 0.00999977778, 1e-11);
  EXPECT_LE(std::abs(H(20.0) - 1.0), 1e-6);
  EXPECT_NEAR(H(20.0), static_cast<double>(H_long(20.0L)), 1e-15);
  EXPECT_THROW(H(-1.0), std::domain_error);
  EXPECT_NEAR(H(1000.0), 1.0, 1e-15);
}

TEST(HFunction, MatchesExtendedPrecisionAndSeriesSwitch) {
  for (double t : {0.011, 0.05, 0.3, 1.0, 2.0, 5.0, 12.0, 19.9, 20.1, 40.0}) {
    EXPECT_LE(rel_err(H(t), static_cast<double>(H_long(t))), 1e-11) << t;
  }
  // Series and closed form agree at the switch point.
  const double below = std::nextafter(1e-2, 0.0);
  EXPECT_NEAR(H(below), static_cast<double>(H_long(below)), 1e-15);
  EXPECT_NEAR(H(1e-2), H(below), 1e-14);
}

TEST(Rho2Inf, RepulsionAndInvariance) {
  EXPECT_EQ(rho2_inf(0.3, 0.3), 0.0);
  Stream s(10, 0);
  for (int t = 0; t < 20; ++t) {
    const cdouble a = 3.0 * s.complex_gaussian();
    const cdouble u = s.complex_gaussian();
    EXPECT_NEAR(rho2_inf(0.0, u), rho2_inf(a, a + u), 1e-14);
    EXPECT_NEAR(rho2_inf(0.0, u), rho2_inf(0.0, u * std::polar(1.0, 0.7)), 1e-14);
  }
  EXPECT_EQ(rho2_inf(0.0, 2.0), H(2.0));
  const auto spec = EnsembleSpec::gef(4.0);
  EXPECT_NEAR(rho_k(spec, {{Chart::Plane, 0.0}, {Chart::Plane, 2.0}}).value, H(2.0), 1e-10);
}

TEST(Permanent, SmallCases) {
  Eigen::MatrixXcd a(1, 1);
  a << cdouble(2.0, -1.0);
  EXPECT_EQ(permanent(a), cdouble(2.0, -1.0));
  Eigen::MatrixXcd b(2, 2);
  b << 1.0, 2.0, 3.0, 4.0;
  EXPECT_NEAR(std::abs(permanent(b) - cdouble(10.0)), 0.0, 1e-15);
  EXPECT_THROW(permanent(Eigen::MatrixXcd::Zero(9, 9)), std::invalid_argument);
  EXPECT_THROW(permanent(Eigen::MatrixXcd::Zero(2, 3)), std::invalid_argument);
}

TEST(Permanent, MatchesNaiveExpansion) {
  Stream s(11, 0);
  for (int k = 1; k <= 8; ++k) {
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::MatrixXcd m(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = s.complex_gaussian();
      const auto psd = random_psd(k, s);
      for (const auto& x : {m, psd}) {
        const cdouble naive = permanent_naive(x);
        const double scale = std::max(std::abs(naive), x.cwiseAbs().rowwise().sum().prod());
        EXPECT_LE(std::abs(permanent(x) - naive), 1e-12 * scale) << "k=" << k;
      }
    }
  }
}

TEST(Permanent, WickMomentMonteCarlo) {
  // E prod |xi_i|^2 = perm(Cov) for a complex Gaussian vector, 1e7 draws.
  Stream s(12, 0);
  const int k = 4;
  const Eigen::MatrixXcd cov = random_psd(k, s) / 4.0;
  const Eigen::MatrixXcd L = cov.llt().matrixL();
  const long draws = 10'000'000;
  double sum = 0.0;
  double sum2 = 0.0;
  Eigen::VectorXcd g(k);
  for (long t = 0; t < draws; ++t) {
    for (int i = 0; i < k; ++i) g(i) = s.complex_gaussian();
    const Eigen::VectorXcd xi = L * g;
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= std::norm(xi(i));
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  const double exact = permanent(cov).real();
  EXPECT_NEAR(permanent(cov).imag(), 0.0, 1e-12 * exact);
  EXPECT_LE(std::abs(mean - exact), 3.0 * se) << mean << " vs " << exact;
}

TEST(RhoK, FirstIntensity) {
  const auto gef = EnsembleSpec::gef(6.0);
  for (cdouble z : {cdouble(0.0), cdouble(1.5, -2.0), cdouble(-5.0, 3.0)}) {
    EXPECT_NEAR(rho_k(gef, {{Chart::Plane, z}}).value, 1.0, 1e-10);
  }
  const auto su2 = EnsembleSpec::su2(50);
  for (const SurfacePoint& p : {SurfacePoint{Chart::Affine0, 0.0}, SurfacePoint{Chart::Affine0, 1.0},
                                SurfacePoint{Chart::Affine0, cdouble(0.3, 0.8)},
                                SurfacePoint{Chart::Affine1, cdouble(0.1, 0.2)},
                                SurfacePoint{Chart::Affine1, 0.0}}) {
    EXPECT_NEAR(rho_k(su2, {p}).value, 50.0, 1e-8);
  }
  const auto torus = EnsembleSpec::torus(32);
  for (cdouble z : {cdouble(0.1, 0.2), cdouble(0.5, 0.97), cdouble(0.99, 0.01)}) {
    EXPECT_NEAR(rho_k(torus, {{Chart::Torus, z}}).value, 32.0, 1e-8);
  }
}

TEST(RhoK, GefPairEqualsH) {
  const auto spec = EnsembleSpec::gef(6.0);
  for (int t = 0; t < 100; ++t) {
    const double r = 0.05 + (5.0 - 0.05) * t / 99.0;
    const cdouble u = std::polar(r, 0.37 * t);
    const auto res = rho_k(spec, {{Chart::Plane, 0.0}, {Chart::Plane, u}});
    EXPECT_LE(std::abs(res.value - H(r * r / 2.0)), 1e-8) << "r=" << r;
    // Off the origin as well.
    const cdouble a(1.3, -0.4);
    EXPECT_LE(std::abs(rho_k(spec, {{Chart::Plane, a}, {Chart::Plane, a + u}}).value -
                       H(r * r / 2.0)),
              1e-8);
  }
}

TEST(RhoK, PermutationSymmetryAndPositivity) {
  Stream s(13, 0);
  for (const auto& spec : {EnsembleSpec::su2(40), EnsembleSpec::torus(24), EnsembleSpec::gef(4.0)}) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<SurfacePoint> pts;
      const cdouble base = spec.model == Model::SU2 ? 0.8 * s.complex_gaussian()
                                                    : cdouble(s.uniform(), s.uniform());
      const double scale = spec.model == Model::GEF ? 1.0 : 0.25;
      for (int a = 0; a < 3; ++a) pts.push_back(make_point(spec, base + scale * s.complex_gaussian()));
      const double v = rho_k(spec, pts).value;
      EXPECT_GE(v, 0.0);
      std::vector<SurfacePoint> q{pts[2], pts[0], pts[1]};
      EXPECT_LE(std::abs(rho_k(spec, q).value - v), 1e-10 * v) << model_name(spec.model);
      std::vector<SurfacePoint> r{pts[1], pts[0], pts[2]};
      EXPECT_LE(std::abs(rho_k(spec, r).value - v), 1e-10 * v) << model_name(spec.model);
    }
  }
}

TEST(RhoK, SymmetriesOfEachModel) {
  // SU2: z -> 1/z swaps the charts; rotations about the axis.
  const auto su2 = EnsembleSpec::su2(30);
  const double v = rho_k(su2, {{Chart::Affine0, 0.1}, {Chart::Affine0, cdouble(0.05, 0.2)}}).value;
  EXPECT_LE(rel_err(rho_k(su2, {{Chart::Affine1, 0.1}, {Chart::Affine1, cdouble(0.05, 0.2)}}).value, v), 1e-10);
  const cdouble rot = std::polar(1.0, 1.1);
  EXPECT_LE(rel_err(rho_k(su2, {{Chart::Affine0, 0.1 * rot}, {Chart::Affine0, cdouble(0.05, 0.2) * rot}}).value, v),
            1e-10);
  // Torus: translations by the lattice (1/n)(Z + iZ), including across the
  // square's edges.
  const auto torus = EnsembleSpec::torus(16);
  const cdouble z(0.97, 0.02), w(0.03, 0.99);
  const double vt = rho_k(torus, {make_point(torus, z), make_point(torus, w)}).value;
  for (cdouble shift : {cdouble(1.0 / 16, 0.0), cdouble(0.0, 5.0 / 16), cdouble(0.5, 0.25)}) {
    EXPECT_LE(rel_err(rho_k(torus, {make_point(torus, z + shift), make_point(torus, w + shift)}).value, vt),
              1e-9);
  }
}

TEST(RhoK, ErrorsForCoincidentPoints) {
  const auto spec = EnsembleSpec::gef(4.0);
  EXPECT_THROW(rho_k(spec, {{Chart::Plane, 1.0}, {Chart::Plane, 1.0}}), std::invalid_argument);
  EXPECT_THROW(rho_k(spec, {{Chart::Plane, 1.0}, {Chart::Plane, 1.0 + 1e-7}}), NumericalError);
  EXPECT_THROW(rho_k(spec, {}), std::invalid_argument);
}

TEST(RhoK, SecondFactorialMomentMonteCarlo) {
  // E N(N-1) for N = number of SU2 zeros in the cap |z| < r equals the
  // integral of rho_2 over cap x cap against (omega/pi)^2.
  const auto spec = EnsembleSpec::su2(6);
  const double r = 0.6;
  const int trials = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    Stream s(14, static_cast<std::uint64_t>(t));
    const auto zs = zeros_su2(sample_section(spec, s));
    int n = 0;
    for (const auto& p : zs.zeros) n += p.chart == Chart::Affine0 && std::abs(p.coord) < r;
    const double f = n * (n - 1.0);
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum2 / trials - mean * mean) / trials);

  // Tensor quadrature: Gauss-Kronrod nodes in the radius, trapezoid in angle.
  const auto& nodes = boost::math::quadrature::gauss_kronrod<double, 15>::abscissa();
  const auto& weights = boost::math::quadrature::gauss_kronrod<double, 15>::weights();
  std::vector<std::pair<cdouble, double>> grid;
  const int angles = 24;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int sign : {-1, 1}) {
      if (i == 0 && sign == -1) continue;
      const double x = r * (1.0 + sign * nodes[i]) / 2.0;
      const double wr = weights[i] * r / 2.0;
      for (int a = 0; a < angles; ++a) {
        const cdouble z = std::polar(x, 2.0 * kPi * (a + 0.5 * (sign > 0)) / angles);
        grid.push_back({z, wr * x * 2.0 * kPi / angles * volume_density(spec, {Chart::Affine0, z})});
      }
    }
  }
  double integral = 0.0;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = 0; b < grid.size(); ++b) {
      if (a == b) continue;
      integral += grid[a].second * grid[b].second *
                  rho_k(spec, {{Chart::Affine0, grid[a].first}, {Chart::Affine0, grid[b].first}}).value;
    }
  }
  EXPECT_LE(std::abs(mean - integral), 3.0 * se) << mean << " vs " << integral << " se " << se;
}

TEST(RescaledRho, FirstOrderAndFarPairs) {
  EXPECT_NEAR(rescaled_rho_k(EnsembleSpec::su2(4096), {Chart::Affine0, 0.0}, {cdouble(0.5, 1.0)}), 1.0, 1e-9);
  EXPECT_NEAR(rescaled_rho_k(EnsembleSpec::torus(256), {Chart::Torus, cdouble(0.3, 0.4)}, {cdouble(1.0, 2.0)}),
              1.0, 1e-9);
  EXPECT_NEAR(rescaled_rho_k(EnsembleSpec::su2(4096), {Chart::Affine0, 0.0}, {0.0, 10.0}), 1.0, 1e-4);
  EXPECT_NEAR(rescaled_rho_k(EnsembleSpec::torus(256), {Chart::Torus, cdouble(0.3, 0.4)}, {0.0, cdouble(6.0, 8.0)}),
              1.0, 1e-4);
  EXPECT_THROW(rescaled_rho_k(EnsembleSpec::su2(64), {Chart::Affine0, 0.0}, {0.0, 20.0}), std::invalid_argument);
}

TEST(RescaledRho, PairApproachesLimit) {
  const double limit = H(0.5);
  for (int n : {1024, 4096}) {
    const double su2 = rescaled_rho_k(EnsembleSpec::su2(n), {Chart::Affine0, 0.0}, {0.0, cdouble(0.0, 1.0)});
    EXPECT_LE(std::abs(su2 - limit), 10.0 / n) << n;
    const double torus =
        rescaled_rho_k(EnsembleSpec::torus(n), {Chart::Torus, cdouble(0.2, 0.7)}, {0.0, cdouble(0.0, 1.0)});
    EXPECT_LE(std::abs(torus - limit), 10.0 / n) << n;
  }
}

TEST(LimitLaw, DensityAndSurvival) {
  for (double x : {0.0, 0.3, 1.0, 1.7}) {
    EXPECT_NEAR(limit_density(1, x), 4.0 * x * x * x * std::exp(-std::pow(x, 4)), 1e-15);
    EXPECT_NEAR(limit_survival(1, x), std::exp(-std::pow(x, 4)), 1e-15);
  }
  EXPECT_NEAR(limit_survival(2, 1.0), 2.0 / std::numbers::e, 1e-15);
  for (int k = 1; k <= 5; ++k) {
    double err = 0.0;
    const double total = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [k](double x) { return limit_density(k, x); }, 0.0, 6.0, 15, 1e-13, &err);
    EXPECT_NEAR(total, 1.0, 1e-8) << k;
    for (double x : {0.4, 0.9, 1.3}) {
      const double h = 1e-5;
      const double fd = -(limit_survival(k, x + h) - limit_survival(k, x - h)) / (2.0 * h);
      EXPECT_NEAR(fd, limit_density(k, x), 1e-8) << k << " " << x;
    }
  }
  EXPECT_THROW(limit_density(0, 1.0), std::invalid_argument);
}

TEST(LimitLaw, Intensity) {
  EXPECT_DOUBLE_EQ(intensity(1.0, 1.0), 0.125);
  EXPECT_EQ(intensity(0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(intensity(1.5, 0.5), 0.31640625);
  EXPECT_THROW(intensity(1.0, 1.5), std::invalid_argument);
}

TEST(BallIntegral, LimitAndGefAgree) {
  const double eps = 0.2;
  const double lim = limit_ball_integral(eps);
  EXPECT_LE(rel_err(lim, std::pow(eps, 4) / 4.0), 1e-3);
  const auto gef = EnsembleSpec::gef(4.0);
  const auto engine = ball_integral_rho2(gef, {Chart::Plane, cdouble(0.5, -0.5)}, eps);
  EXPECT_LE(rel_err(engine.value, lim), 1e-7);
  // Small balls: the integral scales like radius^4.
  for (double r : {0.1, 0.05, 0.03}) {
    EXPECT_NEAR(ball_integral_rho2(gef, {Chart::Plane, 0.0}, r).value / std::pow(r, 4), 0.25, 1e-3);
  }
}

TEST(BallIntegral, Su2QuarterLimit) {
  const int n = 2048;
  const auto spec = EnsembleSpec::su2(n);
  const auto res = ball_integral_rho2(spec, {Chart::Affine0, cdouble(0.4, 0.3)}, std::pow(n, -0.75));
  EXPECT_NEAR(res.value, 0.25, 0.02 * 0.25);
  const auto torus = EnsembleSpec::torus(512);
  EXPECT_NEAR(ball_integral_rho2(torus, {Chart::Torus, cdouble(0.1, 0.9)}, std::pow(512.0, -0.75)).value, 0.25,
              0.02 * 0.25);
}

TEST(Splitting, GefClustersFactorize) {
  Stream s(15, 0);
  const auto spec = EnsembleSpec::gef(6.0);
  for (int rep = 0; rep < 20; ++rep) {
    const cdouble z1 = s.complex_gaussian();
    const cdouble w1 = z1 + std::polar(0.5 + 0.5 * s.uniform(), 6.0 * s.uniform());
    const cdouble z2 = z1 + std::polar(7.0, 6.0 * s.uniform());
    const cdouble w2 = z2 + std::polar(0.5 + 0.5 * s.uniform(), 6.0 * s.uniform());
    const double r4 = rho_k(spec, {{Chart::Plane, z1}, {Chart::Plane, w1}, {Chart::Plane, z2}, {Chart::Plane, w2}}).value;
    const double r2a = rho_k(spec, {{Chart::Plane, z1}, {Chart::Plane, w1}}).value;
    const double r2b = rho_k(spec, {{Chart::Plane, z2}, {Chart::Plane, w2}}).value;
    EXPECT_LE(std::abs(r4 / (r2a * r2b) - 1.0), 1e-4);
  }
}

TEST(ShortRange, NazarovSodinEnvelope) {
  Stream s(16, 0);
  double lo = 1e300, hi = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<cdouble> u;
    for (int a = 0; a < 3; ++a) u.emplace_back(4.0 * s.uniform(), 4.0 * s.uniform());
    double envelope = 1.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        envelope *= std::min(std::norm(u[static_cast<std::size_t>(a)] - u[static_cast<std::size_t>(b)]), 1.0);
    const double ratio = rho_k_limit(u) / envelope;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  EXPECT_GE(lo, 1.0 / 50.0);
  EXPECT_LE(hi, 50.0);
}
