#include "gafzeros/rng.hpp"

#include <cmath>
#include <numbers>

namespace gafz {

std::complex<double> Stream::complex_gaussian() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double Stream::gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto z = complex_gaussian();
  spare_ = std::sqrt(2.0) * z.imag();
  has_spare_ = true;
  return std::sqrt(2.0) * z.real();
}

}  // namespace gafz
