#pragma once

// Classical slope estimators used for comparison with the posterior, basic
// bootstrap intervals around them, and Bland-Altman agreement statistics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "eiv/dataset.hpp"
#include "eiv/posterior.hpp"

namespace eiv {

/// All slopes in units of y2 per y1. Everything except b1 is undefined when
/// S12 = 0.
struct SlopeEstimates {
  double b1 = 0.0;                       // S12 / S11
  std::optional<double> b2;              // S22 / S12
  std::optional<double> geometric_mean;  // sgn(S12) sqrt(b1 b2)
  std::optional<double> ols_bisector;    // tan((atan b1 + atan b2) / 2)
  std::optional<double> orthogonal;      // B + sgn(S12) sqrt(B^2 + 1), B = (b2 - 1/b1) / 2

  bool defined() const noexcept { return b2.has_value(); }
};

SlopeEstimates slope_estimates(const SufficientStats& stats);

/// Limits of the bisector and orthogonal slopes as the y1 axis is rescaled
/// to 0 or infinity: harmonic mean, arithmetic mean, b2, b1.
struct LimitVariants {
  double olsb_0 = 0.0;
  double olsb_inf = 0.0;
  double or_0 = 0.0;
  double or_inf = 0.0;
};

LimitVariants limit_variants(double b1, double b2);

enum class Estimator {
  OlsY2OnY1,
  OlsY1OnY2,
  GeometricMean,
  OlsBisector,
  Orthogonal,
};

std::string_view to_string(Estimator e) noexcept;
std::optional<Estimator> estimator_from_string(std::string_view name) noexcept;

/// Value of one estimator from raw moments; nullopt when undefined.
std::optional<double> estimate_slope(Estimator e, double s11, double s22, double s12);

struct BootstrapCI {
  Estimator estimator = Estimator::GeometricMean;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  std::size_t replicates = 0;
  /// Resamples that were drawn again because an estimator was undefined.
  std::size_t redrawn = 0;
  std::uint64_t seed = 0;
};

/// Basic bootstrap intervals [2 t - q(1 - a/2), 2 t - q(a/2)] from
/// resampled (y1, y2) pairs. Every estimator is evaluated on the same
/// resamples. Replicate i draws from an RNG seeded by (seed, i), so results
/// do not depend on scheduling. Throws EstimatorUndefined when more than 10%
/// of the replicates had to be redrawn, or when an estimator is undefined on
/// the original data.
std::vector<BootstrapCI> bootstrap_cis(const Dataset& data, std::span<const Estimator> estimators,
                                       double level, std::size_t replicates, std::uint64_t seed);

BootstrapCI bootstrap_ci(const Dataset& data, Estimator estimator, double level,
                         std::size_t replicates, std::uint64_t seed);

/// Order-statistic quantile at (R + 1) p with linear interpolation between
/// neighbours, clamped to the sample range. `sorted` must be ascending.
double bootstrap_quantile(std::span<const double> sorted, double p);

/// Standard t intervals for the two least-squares regressions. The y1-on-y2
/// interval is inverted into y2-per-y1 units; it is unbounded when the
/// interval for the inverse slope contains zero.
struct OlsIntervals {
  double b1 = 0.0;
  double b1_lower = 0.0;
  double b1_upper = 0.0;
  std::optional<double> b2;
  std::optional<double> b2_lower;
  std::optional<double> b2_upper;
  double level = 0.0;
};

OlsIntervals ols_intervals(const SufficientStats& stats, double level);

struct AgreementStats {
  std::size_t n = 0;
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  double loa_lower = 0.0;
  double loa_upper = 0.0;
  /// Sample covariance (divisor n - 1) of differences and means.
  double cov_diff_mean = 0.0;
};

inline constexpr double kLimitsOfAgreementZ = 1.96;

/// Differences d = y2 - y1. Throws TooFewPoints for n < 2.
AgreementStats agreement_stats(const Dataset& data);

struct AgreementPoint {
  double mean = 0.0;
  double diff = 0.0;
};

std::vector<AgreementPoint> agreement_points(const Dataset& data);

}  // namespace eiv
