#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gafzeros/ensembles.hpp"
#include "gafzeros/geometry.hpp"

namespace gafz {

/// ((sinh^2 t + t^2) cosh t - 2t sinh t) / sinh^3 t, with the series
/// t - 2t^3/9 + 2t^5/45 below t = 1e-2. Throws std::domain_error for t < 0.
double H(double t);

/// Limiting two-point function H(|z - w|^2 / 2).
double rho2_inf(cdouble z, cdouble w);

/// Ryser's formula with Gray-code column order. Throws std::invalid_argument
/// for non-square input or size above 8.
cdouble permanent(const Eigen::MatrixXcd& m);

/// Plain sum over all k! permutations (test oracle).
cdouble permanent_naive(const Eigen::MatrixXcd& m);

/// k-point correlation with respect to (omega/pi)^k.
struct CorrelationResult {
  int k = 0;
  double value = 0.0;
  /// Condition number of the value covariance normalized to unit diagonal.
  double cond = 0.0;
  /// Normalization applied: value = permanent / (pi^k det K prod density),
  /// with permanent and det K taken from the scaled jets.
  double permanent = 0.0;
  double log_det_k = 0.0;
  double pi_power = 0.0;
  double volume_product = 0.0;
  /// Chart coordinates actually used after moving the points by a symmetry.
  std::vector<cdouble> chart_points;
};

inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr double kMinSeparation = 1e-8;

/// Kac-Rice correlation from the kernel jets. The points are first moved by
/// an exact symmetry of the ensemble into one chart: an SU(2) rotation that
/// sends their centroid to z = 0, minimal torus images around the first
/// point, or a translation of the plane that centers them.
/// Throws std::invalid_argument for k outside 1..6 or points closer than
/// kMinSeparation, NumericalError when K is too ill-conditioned.
CorrelationResult rho_k(const EnsembleSpec& spec,
                        const std::vector<SurfacePoint>& points);

/// rho_k^infinity(u_1..u_k): the GEF correlation, which is the universal
/// limit.
double rho_k_limit(const std::vector<cdouble>& u);

/// n^{-k} rho_k at the points z0 + u_i / sqrt(n) of a normal coordinate
/// around z0: the affine chart for SU2 (z0 is rotated to 0 first), and
/// sqrt(pi) times the flat coordinate for the torus. The GEF is already at
/// the limit scale, so its points are z0 + u_i with no factor.
/// Throws std::invalid_argument when some |u_i| > log^2 n (SU2, torus).
double rescaled_rho_k(const EnsembleSpec& spec, const SurfacePoint& z0,
                      const std::vector<cdouble>& u);

/// 4 x^{4k-1} e^{-x^4} / (k-1)!.
double limit_density(int k, double x);
/// e^{-x^4} sum_{j<k} x^{4j}/j!.
double limit_survival(int k, double x);

/// (a^4 / 8) * region_measure.
double intensity(double a, double region_measure);

struct BallIntegral {
  double value = 0.0;
  double error = 0.0;
  int angular_points = 0;
};

/// Integral of rho_2(z0, w) omega(w)/pi over the geodesic ball of `radius`
/// around z0, by adaptive Gauss-Kronrod in the radius and the trapezoid
/// rule in the angle, to 1e-8 relative. Throws NumericalError when the
/// quadrature does not reach that accuracy.
BallIntegral ball_integral_rho2(const EnsembleSpec& spec,
                                const SurfacePoint& z0, double radius);

/// pi^{-1} times the integral of H(|z|^2/2) over |z| <= eps.
double limit_ball_integral(double eps);

}  // namespace gafz
