#pragma once

#include <stdexcept>
#include <string>

namespace gafz {

/// Unrecoverable numerical failure (root finder divergence, non-finite kernel,
/// ill-conditioned Kac-Rice system). The harness maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootFindError : public NumericalError {
 public:
  RootFindError(const std::string& what, double worst_residual)
      : NumericalError(what), worst_residual_(worst_residual) {}
  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

}  // namespace gafz
