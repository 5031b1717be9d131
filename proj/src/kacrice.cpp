#include "gafzeros/kacrice.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gafzeros/errors.hpp"

namespace gafz {

namespace {

constexpr double kPi = std::numbers::pi;

// Homogeneous coordinates of an SU2 point, unit norm.
std::pair<cdouble, cdouble> homogeneous(const SurfacePoint& p) {
  cdouble v0 = 1.0;
  cdouble v1 = p.coord;
  if (p.chart == Chart::Affine1) std::swap(v0, v1);
  const double r = std::sqrt(std::norm(v0) + std::norm(v1));
  return {v0 / r, v1 / r};
}

// Chart-0 coordinates after the unitary map sending `center` (homogeneous,
// unit norm) to z = 0.
cdouble rotate_to_origin(const std::pair<cdouble, cdouble>& c,
                         const std::pair<cdouble, cdouble>& v) {
  const cdouble num = -c.second * v.first + c.first * v.second;
  const cdouble den = std::conj(c.first) * v.first + std::conj(c.second) * v.second;
  return num / den;
}

std::vector<cdouble> canonical_points(const EnsembleSpec& spec,
                                      const std::vector<SurfacePoint>& points) {
  std::vector<cdouble> out;
  out.reserve(points.size());
  switch (spec.model) {
    case Model::SU2: {
      std::array<double, 3> mean{0.0, 0.0, 0.0};
      for (const auto& p : points) {
        const auto e = sphere_embedding(p);
        for (int t = 0; t < 3; ++t) mean[t] += e[t];
      }
      double norm = std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]);
      if (norm < 1e-6) {
        mean = sphere_embedding(points.front());
        norm = 1.0;
      }
      const double X = mean[0] / norm;
      const double Y = mean[1] / norm;
      const double Z = mean[2] / norm;
      // Inverse of the chart-0 embedding: z = (X + iY)/(1 - Z) = (1 + Z)/(X - iY).
      std::pair<cdouble, cdouble> c =
          Z <= 0.0 ? std::pair<cdouble, cdouble>{1.0 - Z, cdouble(X, Y)}
                   : std::pair<cdouble, cdouble>{cdouble(X, -Y), 1.0 + Z};
      const double r = std::sqrt(std::norm(c.first) + std::norm(c.second));
      c.first /= r;
      c.second /= r;
      for (const auto& p : points) out.push_back(rotate_to_origin(c, homogeneous(p)));
      break;
    }
    case Model::TorusTheta: {
      // Translations by (1/n)(Z + iZ) only rephase or permute the basis, so
      // they are exact symmetries. Moving the first point into [0, 1/n)^2
      // keeps the lattice indices, and the phase roundoff, small.
      const double n = spec.degree;
      cdouble base = reduce_torus(points.front().coord);
      base -= cdouble(std::floor(n * base.real()), std::floor(n * base.imag())) / n;
      for (const auto& p : points) {
        cdouble d = reduce_torus(p.coord) - reduce_torus(points.front().coord);
        d = {d.real() - std::round(d.real()), d.imag() - std::round(d.imag())};
        out.push_back(base + d);
      }
      break;
    }
    case Model::GEF: {
      cdouble mean = 0.0;
      for (const auto& p : points) mean += p.coord;
      mean /= static_cast<double>(points.size());
      for (const auto& p : points) out.push_back(p.coord - mean);
      break;
    }
  }
  return out;
}

Chart working_chart(Model model) {
  switch (model) {
    case Model::SU2: return Chart::Affine0;
    case Model::TorusTheta: return Chart::Torus;
    case Model::GEF: return Chart::Plane;
  }
  return Chart::Plane;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

double H(double t) {
  if (!(t >= 0.0)) throw std::domain_error("H: t must be >= 0");
  if (t < 1e-2) {
    const double t2 = t * t;
    return t * (1.0 + t2 * (-2.0 / 9.0 + t2 * (2.0 / 45.0)));
  }
  if (t <= 20.0) {
    const double sh = std::sinh(t);
    const double ch = std::cosh(t);
    return ((sh * sh + t * t) * ch - 2.0 * t * sh) / (sh * sh * sh);
  }
  // Same expression divided through by sinh^3 t, which avoids overflow.
  const double inv_sh = 1.0 / std::sinh(t);
  const double q = inv_sh * inv_sh;
  return (1.0 + t * t * q) / std::tanh(t) - 2.0 * t * q;
}

double rho2_inf(cdouble z, cdouble w) { return H(std::norm(z - w) / 2.0); }

cdouble permanent(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("permanent: matrix must be square");
  const auto n = static_cast<int>(m.rows());
  if (n > 8) throw std::invalid_argument("permanent: size above 8 is not supported");
  if (n == 0) return 1.0;
  std::vector<cdouble> row_sums(static_cast<std::size_t>(n), 0.0);
  // perm = (-1)^n sum over column sets S of (-1)^|S| prod_i sum_{j in S} m_ij,
  // visiting the sets in Gray-code order so each step toggles one column.
  cdouble total = 0.0;
  for (unsigned k = 1; k < (1u << n); ++k) {
    const int col = std::countr_zero(k);
    const unsigned gray = k ^ (k >> 1);
    const bool added = (gray & (1u << col)) != 0;
    for (int i = 0; i < n; ++i) {
      row_sums[static_cast<std::size_t>(i)] += added ? m(i, col) : -m(i, col);
    }
    cdouble prod = 1.0;
    for (const auto& s : row_sums) prod *= s;
    total += (std::popcount(gray) % 2 == 1) ? -prod : prod;
  }
  return n % 2 == 1 ? -total : total;
}

cdouble permanent_naive(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("permanent: matrix must be square");
  const auto n = static_cast<int>(m.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  cdouble total = 0.0;
  do {
    cdouble prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[static_cast<std::size_t>(i)]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

CorrelationResult rho_k(const EnsembleSpec& spec,
                        const std::vector<SurfacePoint>& points) {
  spec.validate();
  const auto k = static_cast<int>(points.size());
  if (k < 1 || k > 6) throw std::invalid_argument("rho_k: need 1 <= k <= 6 points");
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      if (dist(spec, points[static_cast<std::size_t>(a)],
               points[static_cast<std::size_t>(b)]) <= kMinSeparation) {
        throw std::invalid_argument("rho_k: points " + std::to_string(a) + " and " +
                                    std::to_string(b) + " coincide");
      }
    }
  }

  CorrelationResult res;
  res.k = k;
  res.chart_points = canonical_points(spec, points);
  const auto& z = res.chart_points;

  Eigen::MatrixXcd K(k, k), B(k, k), A(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const auto jet = kernel_jet_scaled(spec, z[static_cast<std::size_t>(a)],
                                         z[static_cast<std::size_t>(b)]);
      K(a, b) = jet.K;
      B(a, b) = jet.dK_dz;
      A(a, b) = jet.d2K_dz_dwbar;
    }
  }
  K = (K + K.adjoint()).eval() * 0.5;
  A = (A + A.adjoint()).eval() * 0.5;

  Eigen::VectorXd d = K.diagonal().real().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd C = d.asDiagonal() * K * d.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(C, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  res.cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(res.cond <= kMaxConditionNumber)) {
    throw NumericalError("rho_k: value covariance is ill-conditioned (cond " +
                         sci(res.cond) +
                         "); separate the points further");
  }

  const Eigen::LLT<Eigen::MatrixXcd> llt(K);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("rho_k: value covariance is not positive definite");
  }
  Eigen::MatrixXcd lambda = A - B * llt.solve(B.adjoint());
  lambda = (lambda + lambda.adjoint()).eval() * 0.5;

  const Eigen::MatrixXcd L = llt.matrixL();
  res.log_det_k = 0.0;
  for (int a = 0; a < k; ++a) res.log_det_k += 2.0 * std::log(L(a, a).real());
  res.permanent = permanent(lambda).real();
  res.pi_power = std::pow(kPi, k);
  res.volume_product = 1.0;
  for (const auto& c : z) {
    res.volume_product *= volume_density(spec, {working_chart(spec.model), c});
  }
  res.value = res.permanent * std::exp(-res.log_det_k) /
              (res.pi_power * res.volume_product);
  if (!std::isfinite(res.value)) throw NumericalError("rho_k: non-finite value");
  return res;
}

double rho_k_limit(const std::vector<cdouble>& u) {
  const auto spec = EnsembleSpec::gef(1.0);
  std::vector<SurfacePoint> pts;
  pts.reserve(u.size());
  for (const auto& c : u) pts.push_back({Chart::Plane, c});
  return rho_k(spec, pts).value;
}

double rescaled_rho_k(const EnsembleSpec& spec, const SurfacePoint& z0,
                      const std::vector<cdouble>& u) {
  const auto k = static_cast<int>(u.size());
  if (spec.model == Model::GEF) {
    std::vector<SurfacePoint> pts;
    for (const auto& c : u) pts.push_back({Chart::Plane, z0.coord + c});
    return rho_k(spec, pts).value;
  }
  const double n = spec.degree;
  const double window = std::pow(std::log(n), 2);
  for (const auto& c : u) {
    if (std::abs(c) > window) {
      throw std::invalid_argument("rescaled_rho_k: |u| exceeds log^2 n");
    }
  }
  std::vector<SurfacePoint> pts;
  pts.reserve(u.size());
  if (spec.model == Model::SU2) {
    // A rotation moves z0 to 0 and is an exact symmetry, so the points can be
    // placed around the chart-0 origin directly.
    for (const auto& c : u) pts.push_back({Chart::Affine0, c / std::sqrt(n)});
  } else {
    for (const auto& c : u) {
      pts.push_back(make_point(spec, z0.coord + c / std::sqrt(kPi * n)));
    }
  }
  return rho_k(spec, pts).value / std::pow(n, k);
}

double limit_density(int k, double x) {
  if (k < 1) throw std::invalid_argument("limit_density: k must be >= 1");
  if (!(x >= 0.0)) throw std::domain_error("limit_density: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double x4 = std::pow(x, 4);
  return 4.0 * std::exp((4.0 * k - 1.0) * std::log(x) - x4 - log_factorial(k - 1));
}

double limit_survival(int k, double x) {
  if (k < 1) throw std::invalid_argument("limit_survival: k must be >= 1");
  if (!(x >= 0.0)) throw std::domain_error("limit_survival: x must be >= 0");
  const double x4 = std::pow(x, 4);
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < k; ++j) {
    term *= x4 / j;
    sum += term;
  }
  return std::exp(-x4) * sum;
}

double intensity(double a, double region_measure) {
  if (!(a >= 0.0)) throw std::invalid_argument("intensity: a must be >= 0");
  if (!(region_measure >= 0.0 && region_measure <= 1.0)) {
    throw std::invalid_argument("intensity: region measure must lie in [0, 1]");
  }
  return std::pow(a, 4) / 8.0 * region_measure;
}

BallIntegral ball_integral_rho2(const EnsembleSpec& spec,
                                const SurfacePoint& z0, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball_integral_rho2: radius must be > 0");
  double chart_radius = radius;
  SurfacePoint center = z0;
  switch (spec.model) {
    case Model::SU2:
      if (radius >= kPi / 2.0) {
        throw std::invalid_argument("ball_integral_rho2: radius beyond the sphere");
      }
      // Rotation invariance: integrate around the chart-0 origin, where the
      // geodesic ball is |w| <= tan(radius).
      chart_radius = std::tan(radius);
      center = {Chart::Affine0, 0.0};
      break;
    case Model::TorusTheta:
      chart_radius = radius / std::sqrt(kPi);
      if (chart_radius >= 0.5) {
        throw std::invalid_argument("ball_integral_rho2: radius beyond the injectivity scale");
      }
      break;
    case Model::GEF:
      break;
  }

  auto ring_sum = [&](double s, int m) {
    double acc = 0.0;
    for (int t = 0; t < m; ++t) {
      const cdouble w = center.coord + std::polar(s, 2.0 * kPi * t / m);
      const SurfacePoint p = spec.model == Model::SU2 ? SurfacePoint{Chart::Affine0, w}
                                                      : make_point(spec, w);
      acc += rho_k(spec, {center, p}).value * volume_density(spec, p);
    }
    return acc * 2.0 * kPi / m * s;
  };
  // Rough size of the whole integral, assuming ring(s) ~ s^3.
  const double total_scale = std::abs(ring_sum(chart_radius, 16)) * chart_radius / 4.0;

  // Angular trapezoid, doubled until the change is negligible against the
  // whole integral; the worst change bounds the angular error.
  int max_angular = 0;
  double angular_error = 0.0;
  auto ring = [&](double s) {
    int m = 8;
    double prev = ring_sum(s, m);
    for (;;) {
      m *= 2;
      const double cur = ring_sum(s, m);
      const double change = std::abs(cur - prev) * chart_radius;
      prev = cur;
      if (change <= 1e-11 * total_scale || m >= 1024) {
        angular_error = std::max(angular_error, change);
        break;
      }
    }
    max_angular = std::max(max_angular, m);
    return prev;
  };

  // Near the center the two points almost coincide and K is singular. Rings
  // below s_min are replaced by the leading behaviour rho_2 ~ s^2, which
  // makes the inner disk contribute ring(s_min) * s_min / 4.
  const double kernel_scale =
      spec.model == Model::GEF ? 1.0 : 1.0 / std::sqrt(spec.bundle_power());
  const double s_min =
      std::min(std::max(3e-3 * kernel_scale, 1e-3 * chart_radius), 0.5 * chart_radius);
  BallIntegral out;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      ring, s_min, chart_radius, 12, 1e-10, &out.error, &l1);
  out.value += ring(s_min) * s_min / 4.0;
  out.angular_points = max_angular;
  out.error += angular_error;
  if (!(out.error <= 1e-8 * std::abs(out.value))) {
    throw NumericalError("ball_integral_rho2: quadrature did not reach 1e-8 relative (error " +
                         sci(out.error) + ")");
  }
  return out;
}

double limit_ball_integral(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("limit_ball_integral: eps must be >= 0");
  // pi^{-1} * 2 pi * int_0^eps H(r^2/2) r dr.
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [](double r) { return 2.0 * H(r * r / 2.0) * r; }, 0.0, eps, 15, 1e-14,
      &err);
}

}  // namespace gafz
