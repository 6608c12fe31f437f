#pragma once

// Globally adaptive Gauss-Kronrod (10/21 point) integration. Only interior
// nodes are evaluated, so integrands may be singular or undefined at the
// interval endpoints.

#include <cstddef>
#include <functional>

namespace eiv::quad {

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  std::size_t max_subdivisions = 200;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  std::size_t subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// Single 21-point Kronrod estimate over [a, b]; the embedded 10-point Gauss
/// rule provides the error estimate.
Result gauss_kronrod21(const Integrand& f, double a, double b);

/// Bisects the interval with the largest error estimate until the summed
/// error meets max(abs_tol, rel_tol |value|). Throws Error(QuadratureFailure)
/// when the subdivision cap is reached first.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

}  // namespace eiv::quad
