// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eiv/error.hpp"
#include "eiv/estimators.hpp"
#include "eiv/posterior.hpp"
#include "eiv/simulate.hpp"

using namespace eiv;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run(int id, const char* title, double budget_seconds, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_seconds <= 0.0 || secs < budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failures;
  char timing[96];
  if (budget_seconds > 0.0) {
    std::snprintf(timing, sizeof timing, "%.2fs, budget %.0fs", secs, budget_seconds);
  } else {
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
  }
  std::printf("%s [%d] %s: %s (%s)\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), timing);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool near(double got, double want, double tol) { return std::fabs(got - want) <= tol; }

double total_mass(const PosteriorModel& m) {
  auto f = [&](double th) {
    const double c = std::cos(th);
    return m.density(m.l() * std::tan(th)) * m.l() / (c * c);
  };
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double a = -kPi / 2 + k * kPi / 4;
    acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, a + kPi / 4, 10,
                                                                          1e-10);
  }
  return acc;
}

Outcome zellner() {
  const auto m = build_model(19.0, 0.909, 0.963);
  const double med = m.median();
  const auto iv = m.shortest_interval(0.95);
  const bool ok = near(med, 0.963, 0.002) && near(iv.lower, 0.722, 0.005) &&
                  near(iv.upper, 1.237, 0.005);
  return {ok, fmt("median %.4f, 95%% interval (%.4f, %.4f)", med, iv.lower, iv.upper)};
}

Outcome faber_jackson() {
  const double r = std::sqrt(2.4 / 5.4), l = std::sqrt(2.4 * 5.4);
  const auto m = build_model(39.0, r, l);
  const double med = m.median();
  const auto iv = m.shortest_interval(0.95);
  const bool ok = near(med, 3.6, 0.1) && near(iv.lower, 1.8, 0.15) && near(iv.upper, 6.1, 0.15);
  return {ok, fmt("r %.4f, l %.2f, median %.3f, 95%% interval (%.3f, %.3f)", r, l, med, iv.lower,
                  iv.upper)};
}

Outcome estimator_formulas() {
  SufficientStats s;
  s.n = 40;
  s.nu = 39;
  s.s11 = 1.0;
  s.s12 = 2.4;
  s.s22 = 2.4 * 5.4;
  s.r = s.s12 / std::sqrt(s.s22);
  s.l = std::sqrt(s.s22);
  const auto e = slope_estimates(s);
  const auto lv = limit_variants(2.4, 5.4);
  const bool ok = near(*e.ols_bisector, 3.4, 0.05) && near(*e.orthogonal, 5.2, 0.05) &&
                  near(lv.olsb_0, 3.3, 0.05) && near(lv.olsb_inf, 3.9, 0.05) &&
                  lv.or_0 == 5.4 && lv.or_inf == 2.4;
  return {ok, fmt("olsb %.3f, or %.3f, olsb limits %.3f/%.3f, or limits %.1f/%.1f",
                  *e.ols_bisector, *e.orthogonal, lv.olsb_0, lv.olsb_inf, lv.or_0, lv.or_inf)};
}

Outcome closed_forms() {
  double worst = 0.0;
  for (double r : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    for (auto [nu, n] : {std::pair{3.0, 4}, std::pair{5.0, 6}}) {
      const auto m = build_model(nu, r, 1.0);
      for (int i = 0; i < 200; ++i) {
        const double bt = -10.0 + 20.0 * (i + 0.5) / 200.0;
        worst = std::max(worst, std::fabs(m.scaled_density(bt) - closed_form_density(bt, r, n)));
      }
    }
  }
  return {worst <= 1e-6, fmt("max |numeric - closed form| = %.2e over 2000 points", worst)};
}

Outcome invariances() {
  std::mt19937_64 rng(20110727);
  std::uniform_real_distribution<double> unu(2.0, 60.0), ur(-0.95, 0.95), ulog(-1.5, 1.5),
      ub(-6.0, 6.0);
  double norm = 0.0, inter = 0.0, scale = 0.0, sym = 0.0, kern = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const double nu = unu(rng), r = ur(rng), l = std::pow(10.0, ulog(rng));
    const auto f = build_model(nu, r, l);
    const auto g = build_model(nu, r, 1.0 / l);
    norm = std::max(norm, std::fabs(total_mass(f) - 1.0));
    for (int i = 0; i < 25; ++i) {
      double beta = ub(rng);
      if (std::fabs(beta) < 0.05) beta = std::copysign(0.05, beta);
      inter = std::max(inter, std::fabs(f.density(beta) - g.density(1.0 / beta) / (beta * beta)));
      kern = std::max(kern, std::fabs(slope_kernel(beta, nu, r, l) -
                                      slope_kernel(beta / l, nu, r, 1.0)));
    }
    for (double c : {0.1, 3.0, 10.0}) {
      const auto h = build_model(nu, r, c * l);
      for (int i = 0; i < 25; ++i) {
        const double beta = ub(rng);
        scale = std::max(scale, std::fabs(c * h.density(c * beta) - f.density(beta)));
      }
    }
    const auto z = build_model(nu, 0.0, l);
    for (int i = 0; i < 25; ++i) {
      const double beta = ub(rng);
      sym = std::max(sym, std::fabs(z.density(beta) - z.density(-beta)));
    }
  }
  const bool ok = norm <= 1e-8 && inter <= 1e-9 && scale <= 1e-9 && sym <= 1e-10 && kern <= 1e-10;
  return {ok, fmt("normalization %.1e, interchange %.1e, scale %.1e, r=0 symmetry %.1e, "
                  "J scale %.1e",
                  norm, inter, scale, sym, kern)};
}

CoverageRow coverage_row(CoverageSetting setting) {
  CoverageOptions opts;
  opts.datasets = 200;
  opts.boot_reps = 199;
  opts.level = 0.90;
  const CoverageSetting s[] = {setting};
  return coverage_experiment(s, opts).rows.front();
}

Outcome coverage_desk() {
  const auto row = coverage_row({20, 0.2, 0.2});
  const bool ok = near(row.posterior, 92.8, 6.0) && near(row.orthogonal, 85.3, 6.0);
  return {ok, fmt("posterior %.1f%%, gm %.1f%%, olsb %.1f%%, or %.1f%% (used %zu, excluded %zu)",
                  row.posterior, row.geometric_mean, row.ols_bisector, row.orthogonal, row.used,
                  row.excluded)};
}

Outcome coverage_divergence() {
  const auto row = coverage_row({100, 1.0, 0.05});
  const bool ok = near(row.posterior, 42.1, 8.0) && row.geometric_mean < 5.0 &&
                  row.ols_bisector < 5.0 && row.orthogonal < 5.0;
  return {ok, fmt("posterior %.1f%%, gm %.1f%%, olsb %.1f%%, or %.1f%% (used %zu, excluded %zu)",
                  row.posterior, row.geometric_mean, row.ols_bisector, row.orthogonal, row.used,
                  row.excluded)};
}

Outcome agreement_moments() {
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 8;
  for (auto [beta, tau, s1, s2] : {std::tuple{1.0, 1.0, 0.2, 0.2}, std::tuple{0.8, 2.0, 0.5, 0.1},
                                   std::tuple{1.3, 1.0, 0.1, 0.6}}) {
    ModelConfig cfg;
    cfg.n = 100000;
    cfg.beta = beta;
    cfg.tau = tau;
    cfg.sigma1 = s1;
    cfg.sigma2 = s2;
    cfg.mu1 = 3.0;
    cfg.alpha = 0.5;
    cfg.seed = seed++;
    const auto a = agreement_stats(generate_dataset(cfg));
    const double n = static_cast<double>(cfg.n);
    const double t2 = tau * tau, v1 = s1 * s1, v2 = s2 * s2;
    const double var_d = t2 * (beta - 1) * (beta - 1) + v1 + v2;
    const double cov_dm = 0.5 * (t2 * (beta * beta - 1) + (v2 - v1));
    const double var_m = 0.25 * t2 * (1 + beta) * (1 + beta) + 0.25 * (v1 + v2);
    const double se_var = var_d * std::sqrt(2.0 / (n - 1));
    const double se_cov = std::sqrt((var_d * var_m + cov_dm * cov_dm) / (n - 1));
    const double zv = (a.sd_diff * a.sd_diff - var_d) / se_var;
    const double zc = (a.cov_diff_mean - cov_dm) / se_cov;
    ok = ok && std::fabs(zv) <= 3.0 && std::fabs(zc) <= 3.0;
    detail += fmt("%sbeta=%.1f: var z=%+.2f, cov z=%+.2f", detail.empty() ? "" : "; ", beta, zv, zc);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  run(1, "Zellner reproduction", 1.0, zellner);
  run(2, "Faber-Jackson reproduction", 1.0, faber_jackson);
  run(3, "estimator formulas", 0.0, estimator_formulas);
  run(4, "closed-form equivalence", 10.0, closed_forms);
  run(5, "invariance suite", 30.0, invariances);
  run(6, "coverage, n=20, sigma 0.2/0.2", 600.0, coverage_desk);
  run(7, "coverage divergence, n=100, sigma 1.0/0.05", 600.0, coverage_divergence);
  run(8, "agreement moments at n=1e5", 0.0, agreement_moments);
  std::printf("%d of 8 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
