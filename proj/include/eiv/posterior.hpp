#pragma once

// Marginal posterior density of the slope in the bivariate normal
// errors-in-variables model with a rotation-invariant (Cauchy) prior on the
// scale-invariant slope beta~ = beta / l.
//
// The density depends on the data only through nu = n - 1, the sample
// correlation r and the ratio of standard deviations l:
//
//   p(beta | y)  = p(beta~ | y) / l
//   p(beta~ | y) = p(beta~) J(beta~, nu, r, 1) / Z
//   J(beta, nu, r, l) = I(|beta|/l, nu, r sgn beta) + I(l/|beta|, nu, r sgn beta)
//   I(b, nu, r) = int_{t-}^{t+} p_t(t; nu) P_F(F(t, b, nu, r); nu + 1, nu - 1) dt
//
// Everything downstream (CDF, quantiles, intervals) is computed on a grid in
// theta = atan(beta~), where the prior is uniform.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "eiv/dataset.hpp"
#include "eiv/quadrature.hpp"

namespace eiv {

struct SufficientStats {
  std::size_t n = 0;
  double nu = 0.0;
  double mean1 = 0.0;
  double mean2 = 0.0;
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;
  double r = 0.0;
  double l = 0.0;
};

/// |r| at or above this bound is rejected as a perfect correlation.
inline constexpr double kMaxAbsCorrelation = 1.0 - 1e-12;

/// Divisor-(n-1) moments, correlation and SD ratio. Throws TooFewPoints,
/// DegenerateVariance or PerfectCorrelation.
SufficientStats sufficient_stats(const Dataset& data);

struct TLimits {
  double t_minus = 0.0;
  double t_plus = 0.0;
};

/// Integration limits of I: t- = -sqrt(nu) r / sqrt(1-r^2) and
/// t+ = sqrt(nu) (beta~ - r) / sqrt(1-r^2).
TLimits t_limits(double beta_tilde, double nu, double r);

/// F(t, beta~, nu, r) for t strictly inside (t-, t+).
double f_stat(double t, double beta_tilde, double nu, double r);

/// I(beta~, nu, r) in [0, 1].
double inner_integral(double beta_tilde, double nu, double r, const quad::Options& opts = {});

/// Stand-in for beta~ = infinity when J is evaluated at beta = 0.
inline constexpr double kLargeSlopeSurrogate = 1e8;

/// J(beta, nu, r, l).
double slope_kernel(double beta, double nu, double r, double l, const quad::Options& opts = {});

/// Standard Cauchy density, the rotation-invariant prior on beta~.
double cauchy_prior(double beta_tilde);

struct QuadSettings {
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
  std::size_t max_subdivisions = 200;
  /// Points of the theta grid carrying the CDF; odd so that theta = 0 is a
  /// node.
  std::size_t grid_points = 4001;

  void validate() const;
  quad::Options options() const { return {abs_tol, rel_tol, max_subdivisions}; }
};

struct IntervalEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  double median = 0.0;
  /// False when the grid scan found the interval width not unimodal in the
  /// lower tail probability; the returned interval is then the refined
  /// global grid minimum.
  bool unimodal = true;
};

struct GridSpec {
  std::size_t points = 1001;
  /// When both are set the grid is uniform in beta over [beta_lo, beta_hi];
  /// otherwise it is uniform in theta over [-pi/2, pi/2].
  std::optional<double> beta_lo;
  std::optional<double> beta_hi;
};

struct GridRow {
  double beta = 0.0;
  double theta = 0.0;
  double density = 0.0;
  double cdf = 0.0;
};

/// Immutable after construction; all queries are const and thread-safe.
class PosteriorModel {
 public:
  static PosteriorModel build(double nu, double r, double l, const QuadSettings& quad = {});
  static PosteriorModel build(const SufficientStats& stats, const QuadSettings& quad = {});

  double nu() const noexcept { return nu_; }
  double r() const noexcept { return r_; }
  double l() const noexcept { return l_; }
  /// Z = int p(beta~) J(beta~, nu, r, 1) d beta~.
  double norm_const() const noexcept { return norm_const_; }
  const QuadSettings& quad() const noexcept { return quad_; }

  /// p(beta | y).
  double density(double beta) const;
  /// p(beta~ | y).
  double scaled_density(double beta_tilde) const;
  /// Posterior density of theta = atan(beta~), uniform prior scale.
  double theta_density(double theta) const;

  double cdf(double beta) const;
  double cdf_theta(double theta) const;
  double quantile(double p) const;
  double quantile_theta(double p) const;
  double median() const { return quantile(0.5); }

  IntervalEstimate shortest_interval(double level) const;

  std::vector<GridRow> density_grid(const GridSpec& spec = {}) const;

  std::span<const double> theta_nodes() const noexcept { return theta_; }
  std::span<const double> cdf_nodes() const noexcept { return cdf_; }

 private:
  PosteriorModel() = default;

  double nu_ = 0.0;
  double r_ = 0.0;
  double l_ = 1.0;
  double norm_const_ = 0.0;
  QuadSettings quad_;
  std::vector<double> theta_;
  std::vector<double> theta_density_;
  std::vector<double> cdf_;
};

inline PosteriorModel build_model(double nu, double r, double l, const QuadSettings& quad = {}) {
  return PosteriorModel::build(nu, r, l, quad);
}
inline PosteriorModel build_model(const SufficientStats& stats, const QuadSettings& quad = {}) {
  return PosteriorModel::build(stats, quad);
}

/// Exact p(beta~ | y) for n = 4 (nu = 3) and n = 6 (nu = 5).
double closed_form_density(double beta_tilde, double r, int n);

}  // namespace eiv
