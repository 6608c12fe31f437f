#include "eiv/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "eiv/error.hpp"
#include "eiv/specfun.hpp"

namespace eiv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

void check_params(double nu, double r) {
  require(nu > 1.0 && std::isfinite(nu), "degrees of freedom must exceed 1");
  require(std::isfinite(r), "correlation must be finite");
  if (std::fabs(r) >= kMaxAbsCorrelation) {
    fail(ErrorCode::PerfectCorrelation, "|r| must be below 1 - 1e-12");
  }
}

double column_scale(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// P_F(F; nu+1, nu-1) for a point at distance dt = t - t- from the lower limit,
// with width = t+ - t-. D <= 0 only happens by rounding at t+, where the CDF
// tends to 1.
double f_cdf_at(double t, double dt, double width, double nu) {
  const double denom = (width - dt) * (width + dt);
  if (!(denom > 0.0)) return 1.0;
  const double f = (nu - 1.0) / (nu + 1.0) * (nu + t * t) / denom;
  return specfun::f_cdf(f, nu + 1.0, nu - 1.0);
}

}  // namespace

SufficientStats sufficient_stats(const Dataset& data) {
  const std::size_t n = data.size();
  if (data.y2.size() != n) fail(ErrorCode::Domain, "dataset columns differ in length");
  if (n <= 2) {
    fail(ErrorCode::TooFewPoints, "posterior needs n > 2 observations, got " + std::to_string(n));
  }
  SufficientStats s;
  s.n = n;
  s.nu = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    s.mean1 += data.y1[i];
    s.mean2 += data.y2[i];
  }
  s.mean1 /= static_cast<double>(n);
  s.mean2 /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = data.y1[i] - s.mean1;
    const double d2 = data.y2[i] - s.mean2;
    s.s11 += d1 * d1;
    s.s22 += d2 * d2;
    s.s12 += d1 * d2;
  }
  s.s11 /= s.nu;
  s.s22 /= s.nu;
  s.s12 /= s.nu;

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double floor1 = std::pow(64.0 * kEps * column_scale(data.y1), 2);
  const double floor2 = std::pow(64.0 * kEps * column_scale(data.y2), 2);
  if (!(s.s11 > floor1) || !(s.s22 > floor2)) {
    fail(ErrorCode::DegenerateVariance, "a column has zero sample variance");
  }
  s.r = s.s12 / std::sqrt(s.s11 * s.s22);
  s.l = std::sqrt(s.s22 / s.s11);
  if (std::fabs(s.r) >= kMaxAbsCorrelation) {
    fail(ErrorCode::PerfectCorrelation, "observations are perfectly correlated");
  }
  return s;
}

TLimits t_limits(double beta_tilde, double nu, double r) {
  require(beta_tilde >= 0.0, "t limits require beta~ >= 0");
  require(nu > 0.0, "t limits require nu > 0");
  require(std::fabs(r) < 1.0, "t limits require |r| < 1");
  const double scale = std::sqrt(nu) / std::sqrt(1.0 - r * r);
  return {-scale * r, scale * (beta_tilde - r)};
}

double f_stat(double t, double beta_tilde, double nu, double r) {
  require(nu > 1.0, "F statistic requires nu > 1");
  const TLimits lim = t_limits(beta_tilde, nu, r);
  const double width = lim.t_plus - lim.t_minus;
  const double dt = t - lim.t_minus;
  const double denom = width * width - dt * dt;
  require(denom > 0.0 && dt >= 0.0, "F statistic requires t inside (t-, t+)");
  return (nu - 1.0) / (nu + 1.0) * (nu + t * t) / denom;
}

double inner_integral(double beta_tilde, double nu, double r, const quad::Options& opts) {
  require(beta_tilde >= 0.0, "I requires beta~ >= 0");
  require(nu > 1.0, "I requires nu > 1");
  require(std::fabs(r) < 1.0, "I requires |r| < 1");
  if (beta_tilde == 0.0) return 0.0;
  if (std::isinf(beta_tilde)) return 0.0;

  // Substituting t = sqrt(nu) tan(phi) turns p_t(t; nu) dt into
  // c_nu cos^(nu-1)(phi) dphi on a bounded interval.
  const double root = std::sqrt(1.0 - r * r);
  const double sqrt_nu = std::sqrt(nu);
  const double t_minus = -sqrt_nu * r / root;
  const double width = sqrt_nu * beta_tilde / root;
  const double phi_lo = -std::asin(r);
  const double phi_hi = std::atan((beta_tilde - r) / root);
  const double c_nu = std::exp(specfun::ln_gamma(0.5 * (nu + 1.0)) - specfun::ln_gamma(0.5 * nu)) /
                      std::sqrt(kPi);

  auto integrand = [&](double phi) {
    const double c = std::cos(phi);
    const double t = sqrt_nu * std::tan(phi);
    const double weight = c_nu * std::exp((nu - 1.0) * std::log(c));
    return weight * f_cdf_at(t, t - t_minus, width, nu);
  };

  // The t density peaks at phi = 0; keep it on a segment boundary.
  double total = 0.0;
  if (phi_lo < 0.0 && phi_hi > 0.0) {
    total = quad::integrate(integrand, phi_lo, 0.0, opts).value +
            quad::integrate(integrand, 0.0, phi_hi, opts).value;
  } else if (phi_hi > phi_lo) {
    total = quad::integrate(integrand, phi_lo, phi_hi, opts).value;
  }
  return std::clamp(total, 0.0, 1.0);
}

double slope_kernel(double beta, double nu, double r, double l, const quad::Options& opts) {
  require(l > 0.0 && std::isfinite(l), "J requires l > 0");
  require(nu > 1.0, "J requires nu > 1");
  require(std::fabs(r) < 1.0, "J requires |r| < 1");
  const double r_signed = std::signbit(beta) ? -r : r;
  if (beta == 0.0) return inner_integral(kLargeSlopeSurrogate, nu, r_signed, opts);
  if (std::isinf(beta)) return inner_integral(kLargeSlopeSurrogate, nu, r_signed, opts);
  const double mag = std::fabs(beta);
  return inner_integral(mag / l, nu, r_signed, opts) + inner_integral(l / mag, nu, r_signed, opts);
}

double cauchy_prior(double beta_tilde) {
  return 1.0 / (kPi * (1.0 + beta_tilde * beta_tilde));
}

void QuadSettings::validate() const {
  require(rel_tol > 0.0, "quadrature rel_tol must be positive");
  require(abs_tol >= 0.0, "quadrature abs_tol must be nonnegative");
  require(max_subdivisions >= 1, "quadrature needs at least one subdivision");
  require(grid_points >= 5 && grid_points % 2 == 1, "theta grid size must be odd and >= 5");
}

PosteriorModel PosteriorModel::build(const SufficientStats& stats, const QuadSettings& quad) {
  return build(stats.nu, stats.r, stats.l, quad);
}

PosteriorModel PosteriorModel::build(double nu, double r, double l, const QuadSettings& quad) {
  check_params(nu, r);
  require(l > 0.0 && std::isfinite(l), "SD ratio l must be positive");
  quad.validate();

  PosteriorModel m;
  m.nu_ = nu;
  m.r_ = r;
  m.l_ = l;
  m.quad_ = quad;
  const quad::Options opts = quad.options();
  auto kernel_theta = [&](double theta) { return slope_kernel(std::tan(theta), nu, r, 1.0, opts); };

  // J(b) = J(1/b) maps theta onto pi/2 - theta within each half, so each
  // half integral is twice the integral over its inner quarter.
  const double quarter = 0.25 * kPi;
  const double neg = quad::integrate(kernel_theta, -quarter, 0.0, opts).value;
  const double pos = quad::integrate(kernel_theta, 0.0, quarter, opts).value;
  m.norm_const_ = 2.0 * (neg + pos) / kPi;
  if (!(m.norm_const_ > 0.0)) {
    fail(ErrorCode::QuadratureFailure, "posterior normalization is not positive");
  }

  const std::size_t n = quad.grid_points;
  const std::size_t half = (n - 1) / 2;
  const double h = kHalfPi / static_cast<double>(half);
  m.theta_.resize(n);
  std::vector<double> kernel(n, 0.0);
  for (std::size_t j = 0; j <= half; ++j) {
    const double theta = static_cast<double>(j) * h;
    m.theta_[half + j] = j == half ? kHalfPi : theta;
    m.theta_[half - j] = j == half ? -kHalfPi : -theta;
    if (j <= half - j) {
      const double b = std::tan(theta);
      kernel[half + j] = slope_kernel(b, nu, r, 1.0, opts);
      kernel[half - j] = slope_kernel(-b, nu, r, 1.0, opts);
    } else {
      kernel[half + j] = kernel[half + (half - j)];
      kernel[half - j] = kernel[half - (half - j)];
    }
  }
  m.theta_density_.resize(n);
  for (std::size_t k = 0; k < n; ++k) m.theta_density_[k] = kernel[k] / (kPi * m.norm_const_);

  // Cell integrals with the highest-order local polynomial rule whose stencil
  // stays inside one half; the density has kinks at theta = 0, +-pi/2.
  const auto& f = m.theta_density_;
  std::vector<double> cell(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t lo = k < half ? 0 : half;
    const std::size_t hi = k < half ? half : n - 1;
    const bool left = k >= lo + 1;
    const bool right = k + 2 <= hi;
    double v = 0.0;
    if (left && right) {
      v = h / 24.0 * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]);
    } else if (right) {
      v = h / 12.0 * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]);
    } else if (left) {
      v = h / 12.0 * (-f[k - 1] + 8.0 * f[k] + 5.0 * f[k + 1]);
    } else {
      v = 0.5 * h * (f[k] + f[k + 1]);
    }
    cell[k] = std::max(v, 0.0);
  }
  m.cdf_.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) m.cdf_[k + 1] = m.cdf_[k] + cell[k];
  const double total = m.cdf_.back();
  if (!(total > 0.0)) fail(ErrorCode::QuadratureFailure, "posterior CDF grid carries no mass");
  for (double& c : m.cdf_) c /= total;
  m.cdf_.back() = 1.0;
  return m;
}

double PosteriorModel::scaled_density(double beta_tilde) const {
  if (!std::isfinite(beta_tilde)) return 0.0;
  return cauchy_prior(beta_tilde) * slope_kernel(beta_tilde, nu_, r_, 1.0, quad_.options()) /
         norm_const_;
}

double PosteriorModel::density(double beta) const { return scaled_density(beta / l_) / l_; }

double PosteriorModel::theta_density(double theta) const {
  require(std::fabs(theta) <= kHalfPi, "theta must lie in [-pi/2, pi/2]");
  return slope_kernel(std::tan(theta), nu_, r_, 1.0, quad_.options()) / (kPi * norm_const_);
}

namespace {

// Fraction of a cell's mass below s in [0, 1], from the linear interpolant of
// the density between the cell's end nodes.
double cell_fraction(double f0, double f1, double s) {
  const double sum = f0 + f1;
  if (!(sum > 0.0)) return s;
  return (f0 * s + 0.5 * (f1 - f0) * s * s) / (0.5 * sum);
}

}  // namespace

double PosteriorModel::cdf_theta(double theta) const {
  if (theta <= theta_.front()) return 0.0;
  if (theta >= theta_.back()) return 1.0;
  const auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
  const std::size_t k = static_cast<std::size_t>(it - theta_.begin()) - 1;
  const double width = theta_[k + 1] - theta_[k];
  const double s = (theta - theta_[k]) / width;
  const double frac = cell_fraction(theta_density_[k], theta_density_[k + 1], s);
  return std::clamp(cdf_[k] + (cdf_[k + 1] - cdf_[k]) * frac, 0.0, 1.0);
}

double PosteriorModel::cdf(double beta) const {
  if (std::isnan(beta)) fail(ErrorCode::Domain, "cdf argument is NaN");
  return cdf_theta(std::atan(beta / l_));
}

double PosteriorModel::quantile_theta(double p) const {
  require(p >= 0.0 && p <= 1.0, "probability must lie in [0, 1]");
  if (p <= 0.0) return theta_.front();
  if (p >= 1.0) return theta_.back();
  // First node whose CDF reaches p; the quantile lies in the cell before it.
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  const std::size_t k = static_cast<std::size_t>(it - cdf_.begin()) - 1;
  const double mass = cdf_[k + 1] - cdf_[k];
  const double target = (p - cdf_[k]) / mass;
  double lo = 0.0;
  double hi = 1.0;
  const double f0 = theta_density_[k];
  const double f1 = theta_density_[k + 1];
  for (int i = 0; i < 100 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cell_fraction(f0, f1, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return theta_[k] + 0.5 * (lo + hi) * (theta_[k + 1] - theta_[k]);
}

double PosteriorModel::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "quantile requires p in (0, 1)");
  return l_ * std::tan(quantile_theta(p));
}

IntervalEstimate PosteriorModel::shortest_interval(double level) const {
  require(level > 0.0 && level < 1.0, "interval level must lie in (0, 1)");
  const double span = 1.0 - level;
  auto width = [&](double a) {
    return l_ * (std::tan(quantile_theta(a + level)) - std::tan(quantile_theta(a)));
  };

  constexpr std::size_t kScan = 256;
  std::vector<double> widths(kScan);
  for (std::size_t i = 0; i < kScan; ++i) {
    widths[i] = width(span * static_cast<double>(i) / static_cast<double>(kScan - 1));
  }
  const std::size_t best =
      static_cast<std::size_t>(std::min_element(widths.begin(), widths.end()) - widths.begin());

  IntervalEstimate out;
  out.level = level;
  const double slack = 1e-9 * widths[best];
  for (std::size_t i = 1; i < kScan && out.unimodal; ++i) {
    if (i <= best && widths[i] > widths[i - 1] + slack) out.unimodal = false;
    if (i > best && widths[i] < widths[i - 1] - slack) out.unimodal = false;
  }

  // Golden-section refinement inside the bracket around the grid minimum.
  const double step = span / static_cast<double>(kScan - 1);
  double lo = best == 0 ? 0.0 : span * static_cast<double>(best - 1) / (kScan - 1);
  double hi = std::min(span, lo + (best == 0 ? 1.0 : 2.0) * step);
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double w1 = width(x1);
  double w2 = width(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    if (w1 <= w2) {
      hi = x2;
      x2 = x1;
      w2 = w1;
      x1 = hi - inv_phi * (hi - lo);
      w1 = width(x1);
    } else {
      lo = x1;
      x1 = x2;
      w1 = w2;
      x2 = lo + inv_phi * (hi - lo);
      w2 = width(x2);
    }
  }
  double a = 0.5 * (lo + hi);
  if (width(a) > widths[best]) a = span * static_cast<double>(best) / (kScan - 1);

  out.lower = l_ * std::tan(quantile_theta(a));
  out.upper = l_ * std::tan(quantile_theta(a + level));
  out.median = median();
  return out;
}

std::vector<GridRow> PosteriorModel::density_grid(const GridSpec& spec) const {
  require(spec.points >= 2, "density grid needs at least 2 points");
  const bool by_beta = spec.beta_lo.has_value() && spec.beta_hi.has_value();
  if (by_beta) {
    require(std::isfinite(*spec.beta_lo) && std::isfinite(*spec.beta_hi) &&
                *spec.beta_lo < *spec.beta_hi,
            "beta grid bounds must be finite with lo < hi");
  }
  std::vector<GridRow> rows(spec.points);
  const double last = static_cast<double>(spec.points - 1);
  for (std::size_t i = 0; i < spec.points; ++i) {
    GridRow& row = rows[i];
    const double s = static_cast<double>(i) / last;
    if (by_beta) {
      row.beta = *spec.beta_lo + s * (*spec.beta_hi - *spec.beta_lo);
      row.theta = std::atan(row.beta / l_);
    } else {
      row.theta = i + 1 == spec.points ? kHalfPi : -kHalfPi + s * kPi;
      row.beta = l_ * std::tan(row.theta);
      if (i == 0 || i + 1 == spec.points) {
        row.beta = std::copysign(std::numeric_limits<double>::infinity(), row.theta);
        row.density = 0.0;
        row.cdf = i == 0 ? 0.0 : 1.0;
        continue;
      }
    }
    row.density = density(row.beta);
    row.cdf = cdf_theta(row.theta);
  }
  return rows;
}

double closed_form_density(double beta_tilde, double r, int n) {
  require(std::fabs(r) < 1.0, "closed form requires |r| < 1");
  const double b = beta_tilde;
  const double q = b * b - 2.0 * r * b + 1.0;
  const double prior_part = 1.0 / (1.0 + b * b);
  if (n == 4) {
    const double k = 1.0 / specfun::gauss_2f1(1.0, 1.0, 1.5, r * r);
    return k * prior_part * std::fabs(b) / q;
  }
  if (n == 6) {
    const double k = 1.0 / specfun::gauss_2f1(2.0, 1.0, 1.5, r * r);
    return k * prior_part * std::fabs(b) * (b * b - r * b + 1.0) / (q * q);
  }
  fail(ErrorCode::Domain, "closed forms exist only for n = 4 and n = 6");
}

}  // namespace eiv
