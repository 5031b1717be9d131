#pragma once

#include <array>
#include <string_view>

#include "gafzeros/ensembles.hpp"

namespace gafz {

/// Affine0 is z on the sphere, Affine1 is zeta = 1/z (used for |z| > 1).
enum class Chart { Affine0, Affine1, Torus, Plane };

std::string_view chart_name(Chart chart);

struct SurfacePoint {
  Chart chart = Chart::Plane;
  cdouble coord;

  friend bool operator==(const SurfacePoint&, const SurfacePoint&) = default;
};

/// Canonical point for a chart value: SU2 picks Affine0 when |z| <= 1 and
/// Affine1 otherwise; torus coordinates are reduced to [0,1)^2.
SurfacePoint make_point(const EnsembleSpec& spec, cdouble z);

/// Reduction of a torus coordinate to the fundamental square [0,1)^2.
cdouble reduce_torus(cdouble z);

/// Unit 3-vector of a sphere point (SU2 charts only).
std::array<double, 3> sphere_embedding(const SurfacePoint& p);

/// Affine0 coordinate of an SU2 point; throws std::domain_error at z = infinity.
cdouble affine0_coordinate(const SurfacePoint& p);

/// Geodesic distance. SU2: Fubini-Study (d(0,1) = pi/4, diameter pi/2);
/// TorusTheta: sqrt(pi) times the flat distance on C/(Z+iZ); GEF: |z - w|.
double dist(const EnsembleSpec& spec, const SurfacePoint& p,
            const SurfacePoint& q);

/// Density of omega/pi with respect to Lebesgue measure in the point's chart.
double volume_density(const EnsembleSpec& spec, const SurfacePoint& p);

/// n^{3/4} (SU2, torus) or R^{1/2} (GEF).
double rescale_factor(const EnsembleSpec& spec);

enum class Region { Whole, Hemisphere, TorusHalf, DiskSector };

std::string_view region_name(Region region);
/// "whole", "hemisphere", "torus-half", "disk-sector".
Region parse_region(std::string_view name);

/// Whether the region is defined for the model (Whole always is).
bool region_supported(Model model, Region region);

/// omega/pi measure of the region, normalized so the whole window is 1.
/// For the GEF the window is the disk B_R.
double region_measure(const EnsembleSpec& spec, Region region);

/// Hemisphere: |z| <= 1 in chart 0. TorusHalf: x < 1/2. DiskSector: the upper
/// half of B_R.
bool region_contains(const EnsembleSpec& spec, Region region,
                     const SurfacePoint& p);

}  // namespace gafz
