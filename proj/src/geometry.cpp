#include "gafzeros/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gafz {

namespace {

constexpr double kPi = std::numbers::pi;

// Homogeneous coordinates [a : b] of a sphere point, z = b / a.
std::array<cdouble, 2> homogeneous(const SurfacePoint& p) {
  if (p.chart == Chart::Affine1) return {p.coord, cdouble(1.0)};
  return {cdouble(1.0), p.coord};
}

void require_sphere(const SurfacePoint& p) {
  if (p.chart != Chart::Affine0 && p.chart != Chart::Affine1) {
    throw std::invalid_argument("point is not in a sphere chart");
  }
}

}  // namespace

std::string_view chart_name(Chart chart) {
  switch (chart) {
    case Chart::Affine0:
      return "affine0";
    case Chart::Affine1:
      return "affine1";
    case Chart::Torus:
      return "torus";
    case Chart::Plane:
      return "plane";
  }
  return "unknown";
}

cdouble reduce_torus(cdouble z) {
  double x = z.real() - std::floor(z.real());
  double y = z.imag() - std::floor(z.imag());
  // floor can leave exactly 1.0 after rounding of tiny negatives.
  if (x >= 1.0) x = 0.0;
  if (y >= 1.0) y = 0.0;
  return {x, y};
}

SurfacePoint make_point(const EnsembleSpec& spec, cdouble z) {
  switch (spec.model) {
    case Model::SU2:
      if (std::abs(z) <= 1.0) return {Chart::Affine0, z};
      return {Chart::Affine1, 1.0 / z};
    case Model::TorusTheta:
      return {Chart::Torus, reduce_torus(z)};
    case Model::GEF:
      return {Chart::Plane, z};
  }
  return {};
}

std::array<double, 3> sphere_embedding(const SurfacePoint& p) {
  require_sphere(p);
  const cdouble z = p.coord;
  const double r2 = std::norm(z);
  const double d = 1.0 + r2;
  if (p.chart == Chart::Affine0) {
    return {2.0 * z.real() / d, 2.0 * z.imag() / d, (r2 - 1.0) / d};
  }
  return {2.0 * z.real() / d, -2.0 * z.imag() / d, (1.0 - r2) / d};
}

cdouble affine0_coordinate(const SurfacePoint& p) {
  require_sphere(p);
  if (p.chart == Chart::Affine0) return p.coord;
  if (p.coord == 0.0) {
    throw std::domain_error("point at infinity has no chart-0 coordinate");
  }
  return 1.0 / p.coord;
}

double dist(const EnsembleSpec& spec, const SurfacePoint& p,
            const SurfacePoint& q) {
  switch (spec.model) {
    case Model::SU2: {
      require_sphere(p);
      require_sphere(q);
      const auto u = homogeneous(p);
      const auto v = homogeneous(q);
      const double wedge = std::abs(u[0] * v[1] - u[1] * v[0]);
      const double inner =
          std::abs(u[0] * std::conj(v[0]) + u[1] * std::conj(v[1]));
      return std::atan2(wedge, inner);
    }
    case Model::TorusTheta: {
      const cdouble a = reduce_torus(p.coord);
      const cdouble b = reduce_torus(q.coord);
      double best = std::numeric_limits<double>::infinity();
      for (int m = -1; m <= 1; ++m) {
        for (int k = -1; k <= 1; ++k) {
          best = std::min(best, std::abs(a - b + cdouble(m, k)));
        }
      }
      return std::sqrt(kPi) * best;
    }
    case Model::GEF:
      return std::abs(p.coord - q.coord);
  }
  return 0.0;
}

double volume_density(const EnsembleSpec& spec, const SurfacePoint& p) {
  switch (spec.model) {
    case Model::SU2: {
      const double d = 1.0 + std::norm(p.coord);
      return 1.0 / (kPi * d * d);
    }
    case Model::TorusTheta:
      return 1.0;
    case Model::GEF:
      return 1.0 / kPi;
  }
  return 0.0;
}

double rescale_factor(const EnsembleSpec& spec) {
  if (spec.model == Model::GEF) return std::sqrt(spec.radius);
  return std::pow(static_cast<double>(spec.degree), 0.75);
}

std::string_view region_name(Region region) {
  switch (region) {
    case Region::Whole:
      return "whole";
    case Region::Hemisphere:
      return "hemisphere";
    case Region::TorusHalf:
      return "torus-half";
    case Region::DiskSector:
      return "disk-sector";
  }
  return "unknown";
}

Region parse_region(std::string_view name) {
  if (name == "whole") return Region::Whole;
  if (name == "hemisphere") return Region::Hemisphere;
  if (name == "torus-half") return Region::TorusHalf;
  if (name == "disk-sector") return Region::DiskSector;
  throw std::invalid_argument(
      "unknown region '" + std::string(name) +
      "' (expected whole, hemisphere, torus-half or disk-sector)");
}

bool region_supported(Model model, Region region) {
  switch (region) {
    case Region::Whole:
      return true;
    case Region::Hemisphere:
      return model == Model::SU2;
    case Region::TorusHalf:
      return model == Model::TorusTheta;
    case Region::DiskSector:
      return model == Model::GEF;
  }
  return false;
}

double region_measure(const EnsembleSpec& spec, Region region) {
  if (!region_supported(spec.model, region)) {
    throw std::invalid_argument("region '" + std::string(region_name(region)) +
                                "' is not defined for model '" +
                                std::string(model_name(spec.model)) + "'");
  }
  return region == Region::Whole ? 1.0 : 0.5;
}

bool region_contains(const EnsembleSpec& spec, Region region,
                     const SurfacePoint& p) {
  switch (region) {
    case Region::Whole:
      return spec.model != Model::GEF || std::abs(p.coord) <= spec.radius;
    case Region::Hemisphere:
      if (p.chart == Chart::Affine0) return std::abs(p.coord) <= 1.0;
      return std::abs(p.coord) > 1.0;
    case Region::TorusHalf:
      return reduce_torus(p.coord).real() < 0.5;
    case Region::DiskSector:
      return p.coord.imag() >= 0.0 && std::abs(p.coord) <= spec.radius;
  }
  return false;
}

}  // namespace gafz
