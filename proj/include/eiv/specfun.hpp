#pragma once

// Special functions needed by the slope posterior: log-gamma, the regularized
// incomplete beta function, Student t density/CDF and the F CDF, and the
// Gauss hypergeometric series used by the small-sample closed forms.
//
// All functions are pure. Failures raise eiv::Error (Domain or
// NonConvergence).

#include <cstddef>

namespace eiv::specfun {

struct Tolerance {
  double rel_eps = 1e-12;
  double abs_eps = 1e-15;
  int max_iter = 500;

  void validate() const;
};

double ln_gamma(double x);

/// ln B(a, b) = lnΓ(a) + lnΓ(b) − lnΓ(a + b).
double ln_beta(double a, double b);

/// I_z(a, b) by Lentz's continued fraction, switching to 1 − I_{1−z}(b, a)
/// above z = (a + 1)/(a + b + 2).
double reg_inc_beta(double z, double a, double b, const Tolerance& tol = {});

/// Same as reg_inc_beta but with the complement 1 − z passed separately, so
/// callers that know 1 − z to full relative precision do not lose it.
double reg_inc_beta(double z, double zc, double a, double b,
                    const Tolerance& tol = {});

double student_t_pdf(double t, double nu);
double student_t_cdf(double t, double nu, const Tolerance& tol = {});
/// Inverse of student_t_cdf for p in (0, 1); bisection on the CDF.
double student_t_quantile(double p, double nu, const Tolerance& tol = {});

/// Beta arguments at or above this value make f_cdf return exactly 1.
inline constexpr double kFCdfUnitClamp = 1.0 - 1e-16;

/// P_F(x; nu1, nu2) = I_{nu1 x/(nu1 x + nu2)}(nu1/2, nu2/2). Infinite x is
/// accepted and yields 1.
double f_cdf(double x, double nu1, double nu2, const Tolerance& tol = {});

/// Series 2F1(a, b; c; z) for 0 <= z < 1. The default tolerance allows a
/// long series since the terms decay like z^k.
inline constexpr Tolerance kHypergeometricTolerance{1e-13, 0.0, 200000};
double gauss_2f1(double a, double b, double c, double z,
                 const Tolerance& tol = kHypergeometricTolerance);

}  // namespace eiv::specfun
