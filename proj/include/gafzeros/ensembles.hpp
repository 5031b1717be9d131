#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "gafzeros/rng.hpp"

namespace gafz {

using cdouble = std::complex<double>;

enum class Model { SU2, TorusTheta, GEF };

std::string_view model_name(Model model);
/// Accepts "su2", "torus", "gef" (case-sensitive). Throws std::invalid_argument.
Model parse_model(std::string_view name);

/// Which Gaussian ensemble, and its scale parameters.
///
/// SU2 and TorusTheta use the degree `degree` (n); the GEF uses the disk
/// radius `radius` (R) and the series truncation degree `truncation` (J).
struct EnsembleSpec {
  Model model = Model::SU2;
  int degree = 1;
  double radius = 0.0;
  int truncation = 0;

  static EnsembleSpec su2(int n);
  static EnsembleSpec torus(int n);
  /// truncation <= 0 selects the default ceil(R^2 + 12R + 20).
  static EnsembleSpec gef(double radius, int truncation = 0);

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// Length of the coefficient vector: n+1, n, or J+1.
  int coefficient_count() const;
  /// Power of the line bundle in the weight e^{-p phi / 2}: n for the compact
  /// models, 1 for the GEF.
  double bundle_power() const;
  /// n for SU2/TorusTheta; R^2 for the GEF restricted to the disk B_R.
  double expected_zero_count() const;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

int default_gef_truncation(double radius);

/// Relative tail of the Bargmann-Fock kernel series,
/// sum_{j>J} R^{2j}/j! divided by e^{R^2} (a Poisson(R^2) upper tail).
double gef_tail_bound(double radius, int truncation);

inline constexpr double kGefTailLimit = 1e-24;
/// Lattice cutoff: theta terms with pi n (l/n + y)^2 above this are dropped.
inline constexpr double kThetaCutoff = 60.0;

/// One sampled section.
///
/// `coefficients` are the i.i.d. standard complex Gaussians b_j. For SU2 and
/// the GEF, `scaled` holds c_j = b_j w_j e^{-s}, where w_j is the basis weight
/// (sqrt(C(n,j)) for SU2, R^j / sqrt(j!) for the GEF in the variable z/R) and
/// s = log_shift = max_j log(w_j |b_j|), so that max_j |c_j| = 1. For the
/// torus `scaled` is a copy of `coefficients` and s = 0.
struct RandomSection {
  EnsembleSpec spec;
  std::vector<cdouble> coefficients;
  std::vector<cdouble> scaled;
  double log_shift = 0.0;
  SeedRecord seed;
};

RandomSection sample_section(const EnsembleSpec& spec, Stream& stream);

/// Builds a section from explicit coefficients b_j. Shorter vectors are
/// zero-padded to spec.coefficient_count(); longer ones are rejected.
RandomSection make_section(const EnsembleSpec& spec, std::vector<cdouble> b,
                           SeedRecord seed = {});

/// sum_j b_j f_j(z) in the model chart: the affine coordinate for SU2, the
/// plane for TorusTheta and the GEF. Torus points outside the fundamental
/// square are reduced with the quasi-periodicity relations.
/// Throws NumericalError if the value leaves double range.
cdouble evaluate_raw(const RandomSection& section, cdouble z);

/// evaluate_raw(z) * e^{-p phi(z)/2}.
cdouble evaluate_weighted(const RandomSection& section, cdouble z);

/// Kahler potential of the model: log(1+|z|^2), 2 pi y^2, or |z|^2.
double potential(Model model, cdouble z);

/// Covariance kernel and its first mixed derivatives at (z, w).
struct KernelJet {
  cdouble K;
  cdouble dK_dz;
  cdouble dK_dwbar;
  cdouble d2K_dz_dwbar;
  bool weighted = false;
};

/// Unweighted (weighted = false): the holomorphic kernel F(z, w) and its
/// exact derivatives. Weighted: F(z,w) e^{-p phi(z)/2 - p phi(w)/2} with
/// Wirtinger derivatives that include the weight factor.
/// Throws NumericalError on non-finite output.
KernelJet kernel_jet(const EnsembleSpec& spec, cdouble z, cdouble w,
                     bool weighted);

/// Unweighted jet entries each multiplied by the constant (underived)
/// factor e^{-p phi(z)/2 - p phi(w)/2}. This is a diagonal congruence of the
/// unweighted Kac-Rice matrices, so zero statistics are unchanged, and it
/// never overflows.
KernelJet kernel_jet_scaled(const EnsembleSpec& spec, cdouble z, cdouble w);

namespace detail {

/// Theta data for the section sum_l b_{l mod n} e^{-pi l^2/n} e^{2 pi i l z}
/// evaluated as value and z-derivative, both multiplied by
/// pi^{-1/2} (2n)^{1/4} e^{-pi n y^2}. `abs_sum` accumulates |term| for
/// relative residuals (skipped when `with_abs_sum` is false).
struct ThetaValue {
  cdouble value;
  cdouble derivative;
  double abs_sum = 0.0;
};

ThetaValue theta_section(const std::vector<cdouble>& b, int n, cdouble z,
                         bool with_derivative, double cutoff = kThetaCutoff,
                         bool with_abs_sum = true);

/// e^{-pi n y^2} theta_j(z) and its derivative for all j at once.
void theta_basis(int n, cdouble z, std::vector<cdouble>& values,
                 std::vector<cdouble>& derivatives,
                 double cutoff = kThetaCutoff);

/// Value of sum_j c_j z^j as mantissa * e^{log_scale}; uses the reversed
/// polynomial for |z| > 1 so large arguments never overflow.
struct ScaledValue {
  cdouble mantissa;
  double log_scale = 0.0;
};
ScaledValue polynomial_scaled(const std::vector<cdouble>& c, cdouble z);

}  // namespace detail

}  // namespace gafz
