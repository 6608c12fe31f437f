#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "eiv/error.hpp"
#include "eiv/posterior.hpp"

using namespace eiv;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double gk(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-10);
}

// Inner integral straight from the definition, in t, with boost distributions.
double oracle_inner(double bt, double nu, double r) {
  const double s = std::sqrt(1.0 - r * r);
  const double tm = -std::sqrt(nu) * r / s;
  const double tp = std::sqrt(nu) * (bt - r) / s;
  if (bt == 0.0) return 0.0;
  boost::math::students_t tdist(nu);
  boost::math::fisher_f fdist(nu + 1.0, nu - 1.0);
  auto f = [&](double t) {
    const double w = tp - tm, u = t - tm;
    const double den = w * w - u * u;
    if (den <= 0.0) return boost::math::pdf(tdist, t);
    const double F = (nu - 1.0) / (nu + 1.0) * (nu + t * t) / den;
    return boost::math::pdf(tdist, t) * (std::isfinite(F) ? boost::math::cdf(fdist, F) : 1.0);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, tm, tp, 1e-13);
}

// Closed form of I at nu = 3.
double inner_nu3(double bt, double r) {
  return 2.0 / kPi * std::pow(1.0 - r * r, 1.5) * bt /
         ((1.0 + bt * bt) * (bt * bt - 2.0 * r * bt + 1.0));
}

double total_mass(const PosteriorModel& m) {
  auto f = [&](double th) {
    const double c = std::cos(th);
    return m.density(m.l() * std::tan(th)) * m.l() / (c * c);
  };
  const double h = kPi / 2.0;
  return gk(f, -h, -h / 2) + gk(f, -h / 2, 0.0) + gk(f, 0.0, h / 2) + gk(f, h / 2, h);
}

SufficientStats stats_from(std::vector<double> a, std::vector<double> b) {
  return sufficient_stats(Dataset{std::move(a), std::move(b)});
}

bool throws_code(auto&& fn, ErrorCode code) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("sufficient statistics") {
  const auto s = stats_from({0, 1, 2, 3}, {0, 1, 0, 1});
  CHECK(s.n == 4);
  CHECK(s.nu == 3.0);
  CHECK(s.s11 == Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(s.s22 == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(s.s12 == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(s.r == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(s.l == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(std::fabs(s.r - s.s12 / std::sqrt(s.s11 * s.s22)) <= 1e-12);

  const auto w = stats_from({0, 1, 0, 1}, {0, 1, 2, 3});
  CHECK(w.r == Approx(s.r).epsilon(1e-14));
  CHECK(w.l == Approx(1.0 / s.l).epsilon(1e-14));

  CHECK(throws_code([] { stats_from({1, 2}, {3, 5}); }, ErrorCode::TooFewPoints));
  CHECK(throws_code([] { stats_from({1, 1, 1}, {3, 5, 4}); }, ErrorCode::DegenerateVariance));
  CHECK(throws_code([] { stats_from({1, 2, 3}, {2, 4, 6}); }, ErrorCode::PerfectCorrelation));
}

TEST_CASE("t limits") {
  auto z = t_limits(0.0, 7.0, 0.3);
  CHECK(z.t_minus == z.t_plus);
  auto a = t_limits(1.0, 3.0, 0.0);
  CHECK(a.t_minus == 0.0);
  CHECK(a.t_plus == Approx(std::sqrt(3.0)).epsilon(1e-15));
  auto b = t_limits(1.0, 19.0, 0.909);
  const double s = std::sqrt(1.0 - 0.909 * 0.909);
  CHECK(b.t_minus == Approx(-std::sqrt(19.0) * 0.909 / s).epsilon(1e-14));
  CHECK(b.t_plus == Approx(std::sqrt(19.0) * 0.091 / s).epsilon(1e-14));
  CHECK(b.t_minus == Approx(-9.505).epsilon(1e-3));
  CHECK(b.t_plus == Approx(0.951).epsilon(1e-3));
  for (double bt : {0.1, 2.0, 50.0}) {
    const auto l = t_limits(bt, 9.0, -0.4);
    CHECK(l.t_plus - l.t_minus == Approx(3.0 * bt / std::sqrt(1.0 - 0.16)).epsilon(1e-13));
  }
  CHECK(throws_code([] { t_limits(-1.0, 3.0, 0.0); }, ErrorCode::Domain));
  CHECK(throws_code([] { t_limits(1.0, 3.0, 1.0); }, ErrorCode::Domain));
}

TEST_CASE("F statistic") {
  const double nu = 11.0, r = 0.35, bt = 1.7;
  const auto lim = t_limits(bt, nu, r);
  const double w = lim.t_plus - lim.t_minus;
  for (double frac : {0.0, 0.25, 0.5, 0.9}) {
    const double t = lim.t_minus + frac * w;
    const double want =
        (nu - 1) / (nu + 1) * (nu + t * t) / (w * w - (t - lim.t_minus) * (t - lim.t_minus));
    CHECK(f_stat(t, bt, nu, r) == Approx(want).epsilon(1e-13));
  }
  CHECK(f_stat(lim.t_minus, bt, nu, r) ==
        Approx((nu - 1) / (nu + 1) * (nu + lim.t_minus * lim.t_minus) / (w * w)).epsilon(1e-13));
  CHECK(f_stat(lim.t_plus - 1e-9, bt, nu, r) > 1e6);
  CHECK(throws_code([&] { f_stat(lim.t_plus + 0.1, bt, nu, r); }, ErrorCode::Domain));

  const double bt2 = 3.1;
  const auto lim2 = t_limits(bt2, nu, r);
  const double t2 = lim2.t_minus + 0.3 * (lim2.t_plus - lim2.t_minus);
  const double w2 = lim2.t_plus - lim2.t_minus;
  CHECK(f_stat(t2, bt2, nu, r) ==
        Approx((nu - 1) / (nu + 1) * (nu + t2 * t2) /
               (w2 * w2 - (t2 - lim2.t_minus) * (t2 - lim2.t_minus))).epsilon(1e-13));
}

TEST_CASE("inner integral") {
  CHECK(inner_integral(0.0, 5.0, 0.3) == 0.0);
  CHECK(inner_integral(1.0, 3.0, 0.0) == Approx(1.0 / (2.0 * kPi)).epsilon(1e-11));
  for (double r : {-0.9, -0.3, 0.0, 0.6, 0.95}) {
    for (double bt : {0.01, 0.4, 1.0, 2.5, 30.0}) {
      CHECK(std::fabs(inner_integral(bt, 3.0, r) - inner_nu3(bt, r)) <= 1e-11);
    }
  }
  for (double nu : {2.5, 9.0, 39.0}) {
    for (double r : {-0.7, 0.0, 0.909}) {
      for (double bt : {0.2, 1.0, 4.0}) {
        const double got = inner_integral(bt, nu, r);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
        CHECK(std::fabs(got - oracle_inner(bt, nu, r)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("inner integral vanishes for very large slopes") {
  for (double nu : {3.0, 19.0}) {
    for (double r : {-0.5, 0.0, 0.9}) {
      CHECK(inner_integral(1e6, nu, r) < 1e-5);
      CHECK(inner_integral(kLargeSlopeSurrogate, nu, r) < 1e-7);
    }
  }
  CHECK(inner_integral(1e6, 3.0, 0.5) == Approx(inner_nu3(1e6, 0.5)).epsilon(1e-6));
}

TEST_CASE("slope kernel invariances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ub(-6.0, 6.0), ur(-0.95, 0.95), ul(0.1, 8.0),
      un(2.0, 40.0);
  for (int i = 0; i < 40; ++i) {
    const double beta = ub(rng), r = ur(rng), l = ul(rng), nu = un(rng);
    CHECK(std::fabs(slope_kernel(beta, nu, r, l) - slope_kernel(beta / l, nu, r, 1.0)) <= 1e-10);
    const double bt = std::fabs(beta) + 0.01;
    CHECK(std::fabs(slope_kernel(bt, nu, r, 1.0) - slope_kernel(1.0 / bt, nu, r, 1.0)) <= 1e-10);
    CHECK(std::fabs(slope_kernel(-bt, nu, r, 1.0) - slope_kernel(bt, nu, -r, 1.0)) <= 1e-10);
  }
  CHECK(slope_kernel(0.0, 3.0, 0.4, 1.0) < 1e-12);
}

TEST_CASE("Cauchy prior") {
  CHECK(cauchy_prior(0.0) == Approx(1.0 / kPi).epsilon(1e-15));
  CHECK(cauchy_prior(1.0) == Approx(0.5 / kPi).epsilon(1e-15));
  for (int i = 0; i < 20; ++i) {
    const double bt = -4.0 + 0.37 * i;
    const double th = std::atan(bt) + kPi / 4.0;
    const double bp = std::tan(th);
    const double jac = (1.0 + bp * bp) / (1.0 + bt * bt);
    CHECK(cauchy_prior(bt) == Approx(cauchy_prior(bp) * jac).epsilon(1e-12));
  }
  const double mass = gk([](double th) {
    const double c = std::cos(th);
    return cauchy_prior(std::tan(th)) / (c * c);
  }, -kPi / 2, kPi / 2);
  CHECK(mass == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed forms") {
  CHECK(closed_form_density(1.0, 0.0, 4) == Approx(0.25).epsilon(1e-14));
  CHECK(throws_code([] { closed_form_density(1.0, 0.0, 5); }, ErrorCode::Domain));
  CHECK(throws_code([] { closed_form_density(1.0, 1.0, 4); }, ErrorCode::Domain));
  for (int n : {4, 6}) {
    for (double r : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
      const double mass = gk([&](double th) {
        const double c = std::cos(th);
        return closed_form_density(std::tan(th), r, n) / (c * c);
      }, -kPi / 2, 0.0) + gk([&](double th) {
        const double c = std::cos(th);
        return closed_form_density(std::tan(th), r, n) / (c * c);
      }, 0.0, kPi / 2);
      CHECK(mass == Approx(1.0).epsilon(1e-8));
    }
  }
  // n = 4 normalization constant in terms of arcsin.
  for (double r : {0.2, 0.7}) {
    const double k = r * std::sqrt(1.0 - r * r) / std::asin(r);
    const double bt = 1.3;
    CHECK(closed_form_density(bt, r, 4) ==
          Approx(k * bt / ((1 + bt * bt) * (bt * bt - 2 * r * bt + 1))).epsilon(1e-10));
  }
}

TEST_CASE("theta-form maxima of the n = 4 closed form") {
  const double r = 0.5;
  auto theta_density = [r](double th) {
    const double c = std::cos(th);
    return closed_form_density(std::tan(th), r, 4) / (c * c);
  };
  double best_pos = 0.0, best_neg = 0.0, arg_pos = 0.0, arg_neg = 0.0;
  for (int i = 1; i < 20000; ++i) {
    const double th = -kPi / 2 + kPi * i / 20000.0;
    const double v = theta_density(th);
    if (th > 0 && v > best_pos) best_pos = v, arg_pos = th;
    if (th < 0 && v > best_neg) best_neg = v, arg_neg = th;
  }
  CHECK(arg_pos == Approx(kPi / 4).epsilon(1e-3));
  CHECK(arg_neg == Approx(-kPi / 4).epsilon(1e-3));
  CHECK(best_pos > best_neg);
}

TEST_CASE("numeric posterior matches the closed forms") {
  for (double r : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    const auto m3 = build_model(3.0, r, 1.0);
    const auto m5 = build_model(5.0, r, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double bt = -10.0 + 20.0 * (i + 0.5) / 200.0;
      CHECK(std::fabs(m3.scaled_density(bt) - closed_form_density(bt, r, 4)) <= 1e-6);
      CHECK(std::fabs(m5.scaled_density(bt) - closed_form_density(bt, r, 6)) <= 1e-6);
    }
  }
  const auto m = build_model(3.0, 0.0, 1.0);
  for (double bt : {0.3, 1.0, 4.0}) {
    CHECK(m.scaled_density(bt) ==
          Approx(bt / ((1 + bt * bt) * (1 + bt * bt))).epsilon(1e-9));
  }
}

TEST_CASE("normalization") {
  for (auto [nu, r, l] : {std::tuple{3.0, 0.5, 1.0}, std::tuple{19.0, 0.909, 0.963},
                          std::tuple{39.0, -0.3, 5.0}, std::tuple{99.0, 0.99, 0.2}}) {
    const auto m = build_model(nu, r, l);
    CHECK(std::fabs(total_mass(m) - 1.0) <= 1e-8);
    CHECK(m.norm_const() > 0.0);
  }
}

TEST_CASE("interchange and scale identities") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ub(-5.0, 5.0);
  for (auto [nu, r, l] : {std::tuple{4.0, 0.3, 1.7}, std::tuple{19.0, -0.8, 0.4}}) {
    const auto f = build_model(nu, r, l);
    const auto g = build_model(nu, r, 1.0 / l);
    for (int i = 0; i < 30; ++i) {
      double beta = ub(rng);
      if (std::fabs(beta) < 0.05) beta = 0.05;
      CHECK(std::fabs(f.density(beta) - g.density(1.0 / beta) / (beta * beta)) <= 1e-9);
    }
    for (double c : {0.1, 3.0, 10.0}) {
      const auto h = build_model(nu, r, c * l);
      for (int i = 0; i < 30; ++i) {
        const double beta = ub(rng);
        CHECK(std::fabs(c * h.density(c * beta) - f.density(beta)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("r = 0 symmetry") {
  const auto m = build_model(9.0, 0.0, 2.0);
  for (double beta = 0.05; beta < 20.0; beta *= 1.3) {
    CHECK(std::fabs(m.density(beta) - m.density(-beta)) <= 1e-10);
  }
  CHECK(std::fabs(m.median()) <= 1e-6);
  const auto iv = m.shortest_interval(0.9);
  CHECK(std::fabs(iv.lower + iv.upper) <= 1e-4);
  CHECK(m.density(0.0) <= 1e-12);
}

TEST_CASE("cdf, quantile and grid") {
  const auto m = build_model(12.0, 0.6, 1.5);
  const auto nodes = m.cdf_nodes();
  CHECK(nodes.front() == 0.0);
  CHECK(nodes.back() == 1.0);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  for (double beta = -3.0; beta <= 6.0; beta += 0.25) {
    CHECK(std::fabs(m.quantile(m.cdf(beta)) - beta) <= 1e-6);
  }
  for (double p : {0.01, 0.2, 0.5, 0.77, 0.99}) {
    CHECK(std::fabs(m.cdf(m.quantile(p)) - p) <= 1e-6);
  }
  CHECK(m.median() == m.quantile(0.5));
  CHECK(throws_code([&] { m.quantile(0.0); }, ErrorCode::Domain));
  CHECK(throws_code([&] { m.quantile(1.0); }, ErrorCode::Domain));
  CHECK(throws_code([&] { m.shortest_interval(1.0); }, ErrorCode::Domain));

  const auto rows = m.density_grid({1001, {}, {}});
  REQUIRE(rows.size() == 1001);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].beta > rows[i - 1].beta);
    CHECK(rows[i].cdf >= rows[i - 1].cdf);
  }
  CHECK(rows.back().cdf == 1.0);
  // Density integrates to the cdf differences (trapezoid in theta).
  double acc = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double h = rows[i].theta - rows[i - 1].theta;
    acc += 0.5 * h * (m.theta_density(rows[i].theta) + m.theta_density(rows[i - 1].theta));
    if (i % 100 == 0) CHECK(std::fabs(acc - rows[i].cdf) <= 1e-5);
  }

  const auto three = m.density_grid({3, {}, {}});
  CHECK(three.size() == 3);
  CHECK(three.back().cdf == Approx(1.0));

  const auto by_beta = m.density_grid({5, -1.0, 3.0});
  CHECK(by_beta.front().beta == -1.0);
  CHECK(by_beta.back().beta == 3.0);
  CHECK(by_beta[2].density == m.density(1.0));
}

TEST_CASE("model from data equals model from parameters") {
  const Dataset d{{1.0, 2.2, 2.9, 4.1, 5.3, 5.8}, {0.7, 2.5, 2.6, 4.8, 4.9, 6.6}};
  const auto s = sufficient_stats(d);
  const auto a = build_model(s);
  const auto b = build_model(s.nu, s.r, s.l);
  for (double beta : {-1.0, 0.3, 1.0, 2.0}) CHECK(a.density(beta) == b.density(beta));
}

TEST_CASE("Zellner example") {
  const auto m = build_model(19.0, 0.909, 0.963);
  CHECK(m.median() == Approx(0.963).epsilon(0.002 / 0.963));
  const auto iv = m.shortest_interval(0.95);
  CHECK(std::fabs(iv.lower - 0.722) <= 0.005);
  CHECK(std::fabs(iv.upper - 1.237) <= 0.005);
  CHECK(iv.unimodal);
  CHECK(iv.lower < iv.median);
  CHECK(iv.median < iv.upper);
  CHECK(std::fabs(m.cdf(iv.upper) - m.cdf(iv.lower) - 0.95) <= 1e-6);
}

TEST_CASE("Faber-Jackson example") {
  const double r = std::sqrt(2.4 / 5.4), l = std::sqrt(2.4 * 5.4);
  const auto m = build_model(39.0, r, l);
  CHECK(std::fabs(m.median() - 3.6) <= 0.1);
  const auto iv = m.shortest_interval(0.95);
  CHECK(std::fabs(iv.lower - 1.8) <= 0.1);
  CHECK(std::fabs(iv.upper - 6.1) <= 0.1);
}

TEST_CASE("concentration near |r| = 1") {
  const auto p = build_model(99.0, 0.999, 1.0);
  CHECK(p.cdf(1.2) - p.cdf(0.8) >= 0.99);
  const auto n = build_model(99.0, -0.999, 1.0);
  CHECK(n.cdf(-0.8) - n.cdf(-1.2) >= 0.99);
}

TEST_CASE("interval width does not shrink to zero") {
  const double w99 = [] {
    const auto iv = build_model(99.0, 0.5, 1.0).shortest_interval(0.9);
    return iv.upper - iv.lower;
  }();
  const double w999 = [] {
    const auto iv = build_model(999.0, 0.5, 1.0).shortest_interval(0.9);
    return iv.upper - iv.lower;
  }();
  CHECK(w999 >= 0.5 * w99);
}

TEST_CASE("mass between the two OLS slopes") {
  const auto m = build_model(99.0, 0.9, 1.0);
  CHECK(m.cdf(2.0 / 0.9) - m.cdf(0.5 * 0.9) >= 0.9);
}

TEST_CASE("bimodal posterior is flagged") {
  const auto m = build_model(3.0, 0.0, 1.0);
  const auto iv = m.shortest_interval(0.5);
  CHECK(iv.lower < iv.upper);
  CHECK(std::fabs(m.cdf(iv.upper) - m.cdf(iv.lower) - 0.5) <= 1e-6);
}

TEST_CASE("parameter validation") {
  CHECK(throws_code([] { build_model(1.0, 0.0, 1.0); }, ErrorCode::Domain));
  CHECK(throws_code([] { build_model(5.0, 1.0, 1.0); }, ErrorCode::PerfectCorrelation));
  CHECK(throws_code([] { build_model(5.0, 0.0, 0.0); }, ErrorCode::Domain));
  QuadSettings q;
  q.grid_points = 4000;
  CHECK(throws_code([&] { build_model(5.0, 0.0, 1.0, q); }, ErrorCode::Domain));
}
