#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gafzeros/ensembles.hpp"
#include "gafzeros/geometry.hpp"

namespace gafz {

struct ZeroSet {
  EnsembleSpec spec;
  std::vector<SurfacePoint> zeros;
  /// Relative residual of each zero, same order as `zeros`.
  std::vector<double> residuals;
  /// GEF only: zeros with R < |z| <= R + 1/R, excluded from `zeros`.
  std::vector<SurfacePoint> boundary;
  int iterations = 0;
  /// Torus only: grid offsets tried before the winding counts closed.
  int jitters = 0;
};

struct RootOptions {
  int max_iterations = 500;
  int polish_steps = 2;
};

/// Roots of sum_j c_j z^j (coefficients in ascending order) by Aberth-Ehrlich
/// iteration. Exact zero coefficients at either end are stripped first.
/// `initial`, when its size equals the trimmed degree, replaces the
/// Newton-polygon starting circles. Throws RootFindError when some root has
/// relative residual above 1e-12 after `max_iterations`.
std::vector<cdouble> roots_polynomial(const std::vector<cdouble>& coefficients,
                                      const std::vector<cdouble>& initial = {},
                                      const RootOptions& options = {},
                                      int* iterations = nullptr);

/// |p(z)| / sum_j |c_j| |z|^j, evaluated stably for any z.
double polynomial_relative_residual(const std::vector<cdouble>& coefficients,
                                    cdouble z);

/// Roots of the scaled SU2 polynomial in chart 0 and of the reversed one in
/// chart 1, before any filtering.
std::pair<std::vector<cdouble>, std::vector<cdouble>> su2_chart_roots(
    const RandomSection& section);

ZeroSet zeros_su2(const RandomSection& section);
ZeroSet zeros_torus(const RandomSection& section);
ZeroSet zeros_gef(const RandomSection& section);
/// Dispatches on the section's model.
ZeroSet find_zeros(const RandomSection& section);

/// Residual of one point, relative to the local scale of the section
/// (sum of absolute values of the terms).
double relative_residual(const RandomSection& section, const SurfacePoint& p);

/// Winding number of the weighted torus section around the unit square with
/// lower-left corner `origin`.
int torus_winding(const RandomSection& section, cdouble origin = 0.0);

struct ZeroDiagnostics {
  bool pass = true;
  std::string failure;
  int count = 0;
  int expected_count = -1;
  int winding = 0;
  int worst_index = -1;
  double worst_residual = 0.0;
};

inline constexpr double kResidualTolerance = 1e-10;

ZeroDiagnostics verify_zeroset(const RandomSection& section,
                               const ZeroSet& zeros);

}  // namespace gafz
