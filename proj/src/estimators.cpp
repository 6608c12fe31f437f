#include "eiv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "eiv/error.hpp"
#include "eiv/rng.hpp"
#include "eiv/specfun.hpp"

namespace eiv {

namespace {

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

double bisector(double b1, double b2) {
  return std::tan(0.5 * (std::atan(b1) + std::atan(b2)));
}

double orthogonal_slope(double b1, double b2, double s12) {
  const double b = 0.5 * (b2 - 1.0 / b1);
  return b + sign_of(s12) * std::sqrt(b * b + 1.0);
}

struct Moments {
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;
};

template <typename Index>
Moments moments(const Dataset& data, std::size_t n, Index index) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += data.y1[index(i)];
    m2 += data.y2[index(i)];
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = data.y1[index(i)] - m1;
    const double d2 = data.y2[index(i)] - m2;
    m.s11 += d1 * d1;
    m.s22 += d2 * d2;
    m.s12 += d1 * d2;
  }
  const double nu = static_cast<double>(n - 1);
  m.s11 /= nu;
  m.s22 /= nu;
  m.s12 /= nu;
  return m;
}

}  // namespace

SlopeEstimates slope_estimates(const SufficientStats& stats) {
  require(stats.s11 > 0.0, "slope estimates require S11 > 0");
  SlopeEstimates out;
  out.b1 = stats.s12 / stats.s11;
  if (stats.s12 == 0.0) return out;
  const double b2 = stats.s22 / stats.s12;
  out.b2 = b2;
  out.geometric_mean = sign_of(stats.s12) * std::sqrt(out.b1 * b2);
  out.ols_bisector = bisector(out.b1, b2);
  out.orthogonal = orthogonal_slope(out.b1, b2, stats.s12);
  return out;
}

LimitVariants limit_variants(double b1, double b2) {
  require(b1 > 0.0 && b2 > 0.0, "limit variants require positive OLS slopes");
  return {2.0 / (1.0 / b1 + 1.0 / b2), 0.5 * (b1 + b2), b2, b1};
}

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::OlsY2OnY1: return "ols_y2_on_y1";
    case Estimator::OlsY1OnY2: return "ols_y1_on_y2";
    case Estimator::GeometricMean: return "geometric_mean";
    case Estimator::OlsBisector: return "ols_bisector";
    case Estimator::Orthogonal: return "orthogonal";
  }
  return "unknown";
}

std::optional<Estimator> estimator_from_string(std::string_view name) noexcept {
  for (Estimator e : {Estimator::OlsY2OnY1, Estimator::OlsY1OnY2, Estimator::GeometricMean,
                      Estimator::OlsBisector, Estimator::Orthogonal}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

std::optional<double> estimate_slope(Estimator e, double s11, double s22, double s12) {
  if (!(s11 > 0.0) || !(s22 > 0.0)) return std::nullopt;
  const double b1 = s12 / s11;
  if (e == Estimator::OlsY2OnY1) return b1;
  if (s12 == 0.0) return std::nullopt;
  const double b2 = s22 / s12;
  switch (e) {
    case Estimator::OlsY1OnY2: return b2;
    case Estimator::GeometricMean: return sign_of(s12) * std::sqrt(b1 * b2);
    case Estimator::OlsBisector: return bisector(b1, b2);
    case Estimator::Orthogonal: return orthogonal_slope(b1, b2, s12);
    case Estimator::OlsY2OnY1: break;
  }
  return b1;
}

double bootstrap_quantile(std::span<const double> sorted, double p) {
  require(!sorted.empty(), "bootstrap quantile of an empty sample");
  const std::size_t r = sorted.size();
  const double pos = static_cast<double>(r + 1) * p;
  if (pos <= 1.0) return sorted.front();
  if (pos >= static_cast<double>(r)) return sorted.back();
  const auto j = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(j);
  return sorted[j - 1] + frac * (sorted[j] - sorted[j - 1]);
}

std::vector<BootstrapCI> bootstrap_cis(const Dataset& data, std::span<const Estimator> estimators,
                                       double level, std::size_t replicates, std::uint64_t seed) {
  require(level > 0.0 && level < 1.0, "bootstrap level must lie in (0, 1)");
  require(replicates >= 100, "bootstrap needs at least 100 replicates");
  require(!estimators.empty(), "no estimators requested");
  const std::size_t n = data.size();
  if (n < 3) fail(ErrorCode::TooFewPoints, "bootstrap needs at least 3 observations");

  const Moments full = moments(data, n, [](std::size_t i) { return i; });
  std::vector<double> point(estimators.size());
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    const auto v = estimate_slope(estimators[e], full.s11, full.s22, full.s12);
    if (!v) {
      fail(ErrorCode::EstimatorUndefined,
           std::string(to_string(estimators[e])) + " is undefined on the original data");
    }
    point[e] = *v;
  }

  const std::size_t max_redraws = replicates / 10;
  std::size_t redrawn = 0;
  std::vector<std::vector<double>> reps(estimators.size(), std::vector<double>(replicates));
  std::vector<std::size_t> index(n);
  std::vector<double> values(estimators.size());
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      std::mt19937_64 rng(derive_seed(seed, {rep, attempt}));
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& i : index) i = pick(rng);
      const Moments m = moments(data, n, [&](std::size_t i) { return index[i]; });
      bool ok = true;
      for (std::size_t e = 0; e < estimators.size() && ok; ++e) {
        const auto v = estimate_slope(estimators[e], m.s11, m.s22, m.s12);
        ok = v.has_value() && std::isfinite(*v);
        if (ok) values[e] = *v;
      }
      if (ok) break;
      if (++redrawn > max_redraws) {
        fail(ErrorCode::EstimatorUndefined,
             "more than 10% of bootstrap replicates left an estimator undefined");
      }
    }
    for (std::size_t e = 0; e < estimators.size(); ++e) reps[e][rep] = values[e];
  }

  const double alpha = 1.0 - level;
  std::vector<BootstrapCI> out(estimators.size());
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    auto& sample = reps[e];
    std::sort(sample.begin(), sample.end());
    BootstrapCI& ci = out[e];
    ci.estimator = estimators[e];
    ci.estimate = point[e];
    ci.lower = 2.0 * point[e] - bootstrap_quantile(sample, 1.0 - 0.5 * alpha);
    ci.upper = 2.0 * point[e] - bootstrap_quantile(sample, 0.5 * alpha);
    ci.level = level;
    ci.replicates = replicates;
    ci.redrawn = redrawn;
    ci.seed = seed;
  }
  return out;
}

BootstrapCI bootstrap_ci(const Dataset& data, Estimator estimator, double level,
                         std::size_t replicates, std::uint64_t seed) {
  const Estimator one[] = {estimator};
  return bootstrap_cis(data, one, level, replicates, seed).front();
}

OlsIntervals ols_intervals(const SufficientStats& stats, double level) {
  require(level > 0.0 && level < 1.0, "interval level must lie in (0, 1)");
  if (stats.n < 3) fail(ErrorCode::TooFewPoints, "OLS intervals need n >= 3");
  require(stats.s11 > 0.0 && stats.s22 > 0.0, "OLS intervals need positive variances");
  const double dof = static_cast<double>(stats.n - 2);
  const double tq = specfun::student_t_quantile(0.5 * (1.0 + level), dof);

  OlsIntervals out;
  out.level = level;
  out.b1 = stats.s12 / stats.s11;
  const double se1 =
      std::sqrt(std::max(0.0, stats.s22 - stats.s12 * stats.s12 / stats.s11) / (dof * stats.s11));
  out.b1_lower = out.b1 - tq * se1;
  out.b1_upper = out.b1 + tq * se1;

  const double c = stats.s12 / stats.s22;
  const double se2 =
      std::sqrt(std::max(0.0, stats.s11 - stats.s12 * stats.s12 / stats.s22) / (dof * stats.s22));
  const double c_lo = c - tq * se2;
  const double c_hi = c + tq * se2;
  if (stats.s12 != 0.0) out.b2 = 1.0 / c;
  if (c_lo > 0.0 || c_hi < 0.0) {
    out.b2_lower = 1.0 / c_hi;
    out.b2_upper = 1.0 / c_lo;
  }
  return out;
}

AgreementStats agreement_stats(const Dataset& data) {
  const std::size_t n = data.size();
  if (n < 2) fail(ErrorCode::TooFewPoints, "agreement statistics need at least 2 observations");
  double mean_d = 0.0;
  double mean_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_d += data.y2[i] - data.y1[i];
    mean_m += 0.5 * (data.y1[i] + data.y2[i]);
  }
  mean_d /= static_cast<double>(n);
  mean_m /= static_cast<double>(n);
  double ss = 0.0;
  double sc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dd = data.y2[i] - data.y1[i] - mean_d;
    const double dm = 0.5 * (data.y1[i] + data.y2[i]) - mean_m;
    ss += dd * dd;
    sc += dd * dm;
  }
  AgreementStats out;
  out.n = n;
  out.mean_diff = mean_d;
  out.sd_diff = std::sqrt(ss / static_cast<double>(n - 1));
  out.loa_lower = mean_d - kLimitsOfAgreementZ * out.sd_diff;
  out.loa_upper = mean_d + kLimitsOfAgreementZ * out.sd_diff;
  out.cov_diff_mean = sc / static_cast<double>(n - 1);
  return out;
}

std::vector<AgreementPoint> agreement_points(const Dataset& data) {
  std::vector<AgreementPoint> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = {0.5 * (data.y1[i] + data.y2[i]), data.y2[i] - data.y1[i]};
  }
  return out;
}

}  // namespace eiv
