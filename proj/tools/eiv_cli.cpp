// eiv: command-line front end over the C API.
//
//   eiv fit        --input data.csv [--level 0.95]
//   eiv fit        --nu 19 --r 0.909 --l 0.963
//   eiv density    --input data.csv [--grid 1001] [--format csv|json]
//   eiv estimators --input data.csv [--boot-reps 999] [--seed 1]
//   eiv agreement  --input data.csv
//   eiv simulate   [--replicates 200] [--boot-reps 199] [--full-table1]
//
// Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 numeric failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eiv/eiv.h"
#include "eiv/format.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string output_path;
  double level = 0.95;
  std::size_t grid_points = 1001;
  std::uint64_t seed = 1;
  std::size_t replicates = 200;
  std::size_t boot_reps = 999;
  std::string format;
  bool full_table1 = false;
  std::optional<double> nu, r, l;
  std::optional<double> beta_min, beta_max;
  std::vector<std::string> settings;
  unsigned threads = 0;
};

/// Carries a status from the C API up to main.
struct CommandError {
  eiv_status status;
  std::string message;
  std::size_t line = 0;
};

struct UsageError {
  std::string message;
};

void check(eiv_status status) {
  if (status != EIV_OK) throw CommandError{status, eiv_last_error(), eiv_last_error_line()};
}

double num(double v) { return eiv::round_sig(v); }

json num_or_null(double v) { return std::isfinite(v) ? json(num(v)) : json(nullptr); }

struct DatasetDeleter {
  void operator()(eiv_dataset* d) const { eiv_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(eiv_model* m) const { eiv_model_free(m); }
};
struct ReportDeleter {
  void operator()(eiv_coverage_report* r) const { eiv_coverage_report_free(r); }
};
using DatasetPtr = std::unique_ptr<eiv_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<eiv_model, ModelDeleter>;
using ReportPtr = std::unique_ptr<eiv_coverage_report, ReportDeleter>;

DatasetPtr load(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw UsageError{cfg.command + " requires --input"};
  eiv_dataset* raw = nullptr;
  check(eiv_dataset_read(cfg.input_path.c_str(), &raw));
  return DatasetPtr(raw);
}

std::string resolve_format(const RunConfig& cfg, const char* fallback) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  if (f != "csv" && f != "json") throw UsageError{"--format must be csv or json"};
  return f;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw CommandError{EIV_ERR_IO, "cannot open output file '" + cfg.output_path + "'"};
  out << text;
}

std::string key_value_csv(const json& flat) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : flat.items()) {
    out << k << ',' << (v.is_null() ? std::string() : v.dump()) << '\n';
  }
  return out.str();
}

ModelPtr build_model(const RunConfig& cfg, std::optional<eiv_stats>& stats) {
  eiv_model* raw = nullptr;
  const bool by_params = cfg.nu || cfg.r || cfg.l;
  if (by_params) {
    if (!(cfg.nu && cfg.r && cfg.l)) throw UsageError{"--nu, --r and --l must be given together"};
    if (!cfg.input_path.empty()) throw UsageError{"give either --input or --nu/--r/--l"};
    check(eiv_model_build(*cfg.nu, *cfg.r, *cfg.l, nullptr, &raw));
    return ModelPtr(raw);
  }
  const DatasetPtr data = load(cfg);
  eiv_stats s{};
  check(eiv_sufficient_stats(data.get(), &s));
  stats = s;
  check(eiv_model_from_stats(&s, nullptr, &raw));
  return ModelPtr(raw);
}

void run_fit(const RunConfig& cfg) {
  std::optional<eiv_stats> stats;
  const ModelPtr model = build_model(cfg, stats);
  double nu = 0, r = 0, l = 0, z = 0;
  check(eiv_model_params(model.get(), &nu, &r, &l, &z));
  eiv_interval iv{};
  check(eiv_shortest_interval(model.get(), cfg.level, &iv));

  json out;
  out["n"] = stats ? json(stats->n) : json(static_cast<long long>(std::llround(nu + 1.0)));
  out["nu"] = num(nu);
  out["r"] = num(r);
  out["l"] = num(l);
  out["median"] = num(iv.median);
  out["level"] = num(iv.level);
  out["interval"] = {{"lower", num(iv.lower)}, {"upper", num(iv.upper)}};
  out["unimodal_width"] = iv.unimodal != 0;
  if (stats) {
    out["mean1"] = num(stats->mean1);
    out["mean2"] = num(stats->mean2);
    out["intercept_plugin"] = num(stats->mean2 - iv.median * stats->mean1);
  } else {
    out["intercept_plugin"] = nullptr;
  }
  if (resolve_format(cfg, "json") == "json") {
    emit(cfg, out.dump(2) + "\n");
  } else {
    json flat = out;
    flat.erase("interval");
    flat["lower"] = out["interval"]["lower"];
    flat["upper"] = out["interval"]["upper"];
    emit(cfg, key_value_csv(flat));
  }
}

void run_density(const RunConfig& cfg) {
  if (cfg.grid_points < 3) throw UsageError{"--grid must be at least 3"};
  if (cfg.beta_min.has_value() != cfg.beta_max.has_value()) {
    throw UsageError{"--beta-min and --beta-max must be given together"};
  }
  std::optional<eiv_stats> stats;
  const ModelPtr model = build_model(cfg, stats);
  std::vector<eiv_grid_row> rows(cfg.grid_points);
  if (cfg.beta_min) {
    check(eiv_density_grid_beta(model.get(), *cfg.beta_min, *cfg.beta_max, rows.size(),
                                rows.data()));
  } else {
    check(eiv_density_grid(model.get(), rows.size(), rows.data()));
  }

  if (resolve_format(cfg, "csv") == "csv") {
    std::ostringstream out;
    out << "beta,theta,density,cdf\n";
    for (const auto& row : rows) {
      out << eiv::format_number(row.beta) << ',' << eiv::format_number(row.theta) << ','
          << eiv::format_number(row.density) << ',' << eiv::format_number(row.cdf) << '\n';
    }
    emit(cfg, out.str());
    return;
  }
  double nu = 0, r = 0, l = 0;
  check(eiv_model_params(model.get(), &nu, &r, &l, nullptr));
  json out = {{"nu", num(nu)}, {"r", num(r)}, {"l", num(l)}, {"rows", json::array()}};
  for (const auto& row : rows) {
    out["rows"].push_back({{"beta", num(row.beta)},
                           {"theta", num(row.theta)},
                           {"density", num(row.density)},
                           {"cdf", num(row.cdf)}});
  }
  emit(cfg, out.dump(2) + "\n");
}

void run_estimators(const RunConfig& cfg) {
  const DatasetPtr data = load(cfg);
  eiv_stats stats{};
  check(eiv_sufficient_stats(data.get(), &stats));
  eiv_slope_estimates est{};
  check(eiv_estimate_slopes(&stats, &est));
  eiv_ols_intervals ols{};
  check(eiv_compute_ols_intervals(&stats, cfg.level, &ols));

  const eiv_estimator kinds[] = {EIV_EST_OLS_Y2_ON_Y1, EIV_EST_OLS_Y1_ON_Y2,
                                 EIV_EST_GEOMETRIC_MEAN, EIV_EST_OLS_BISECTOR,
                                 EIV_EST_ORTHOGONAL};
  std::vector<eiv_bootstrap_ci> cis(std::size(kinds));
  check(eiv_bootstrap_cis(data.get(), kinds, std::size(kinds), cfg.level, cfg.boot_reps,
                          cfg.seed, cis.data()));

  json out;
  out["n"] = stats.n;
  out["r"] = num(stats.r);
  out["l"] = num(stats.l);
  out["estimates"] = {{"b1", num(est.b1)},
                      {"b2", num(est.b2)},
                      {"geometric_mean", num(est.geometric_mean)},
                      {"ols_bisector", num(est.ols_bisector)},
                      {"orthogonal", num(est.orthogonal)}};
  eiv_limit_variants lv{};
  if (est.b1 > 0 && est.b2 > 0 && eiv_compute_limit_variants(est.b1, est.b2, &lv) == EIV_OK) {
    out["limit_variants"] = {{"olsb_0", num(lv.olsb_0)},
                             {"olsb_inf", num(lv.olsb_inf)},
                             {"or_0", num(lv.or_0)},
                             {"or_inf", num(lv.or_inf)}};
  }
  out["ols_intervals"] = {{"level", num(ols.level)},
                          {"b1", {{"lower", num(ols.b1_lower)}, {"upper", num(ols.b1_upper)}}},
                          {"b2", {{"lower", num_or_null(ols.b2_lower)},
                                  {"upper", num_or_null(ols.b2_upper)}}}};
  out["bootstrap"] = json::array();
  for (const auto& ci : cis) {
    out["bootstrap"].push_back({{"estimator", eiv_estimator_name(ci.estimator)},
                                {"estimate", num(ci.estimate)},
                                {"lower", num(ci.lower)},
                                {"upper", num(ci.upper)},
                                {"level", num(ci.level)},
                                {"replicates", ci.replicates},
                                {"redrawn", ci.redrawn},
                                {"seed", ci.seed}});
  }

  if (resolve_format(cfg, "json") == "json") {
    emit(cfg, out.dump(2) + "\n");
    return;
  }
  std::ostringstream csv;
  csv << "estimator,estimate,lower,upper,level,replicates,seed\n";
  for (const auto& ci : cis) {
    csv << eiv_estimator_name(ci.estimator) << ',' << eiv::format_number(ci.estimate) << ','
        << eiv::format_number(ci.lower) << ',' << eiv::format_number(ci.upper) << ','
        << eiv::format_number(ci.level) << ',' << ci.replicates << ',' << ci.seed << '\n';
  }
  emit(cfg, csv.str());
}

void run_agreement(const RunConfig& cfg) {
  eiv_dataset* raw = nullptr;
  if (cfg.input_path.empty()) throw UsageError{"agreement requires --input"};
  check(eiv_dataset_read(cfg.input_path.c_str(), &raw));
  const DatasetPtr data(raw);
  eiv_agreement a{};
  check(eiv_agreement_stats(data.get(), &a));
  const std::size_t n = eiv_dataset_size(data.get());
  std::vector<double> means(n), diffs(n);
  check(eiv_agreement_points(data.get(), means.data(), diffs.data()));

  if (resolve_format(cfg, "json") == "json") {
    json out = {{"n", a.n},
                {"mean_diff", num(a.mean_diff)},
                {"sd_diff", num(a.sd_diff)},
                {"loa_lower", num(a.loa_lower)},
                {"loa_upper", num(a.loa_upper)},
                {"cov_diff_mean", num(a.cov_diff_mean)},
                {"points", json::array()}};
    for (std::size_t i = 0; i < n; ++i) {
      out["points"].push_back({{"mean", num(means[i])}, {"diff", num(diffs[i])}});
    }
    emit(cfg, out.dump(2) + "\n");
    return;
  }
  std::ostringstream csv;
  csv << "# n=" << a.n << '\n'
      << "# mean_diff=" << eiv::format_number(a.mean_diff) << '\n'
      << "# sd_diff=" << eiv::format_number(a.sd_diff) << '\n'
      << "# loa_lower=" << eiv::format_number(a.loa_lower) << '\n'
      << "# loa_upper=" << eiv::format_number(a.loa_upper) << '\n'
      << "# cov_diff_mean=" << eiv::format_number(a.cov_diff_mean) << '\n'
      << "mean,diff\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv << eiv::format_number(means[i]) << ',' << eiv::format_number(diffs[i]) << '\n';
  }
  emit(cfg, csv.str());
}

eiv_setting parse_setting(const std::string& text) {
  std::istringstream in(text);
  eiv_setting s{};
  char c1 = 0, c2 = 0;
  if (!(in >> s.n >> c1 >> s.sigma1 >> c2 >> s.sigma2) || c1 != ',' || c2 != ',' ||
      !(in >> std::ws).eof()) {
    throw UsageError{"--setting expects n,sigma1,sigma2 (got '" + text + "')"};
  }
  return s;
}

void run_simulate(const RunConfig& cfg, bool replicates_given, bool boot_given,
                  bool level_given, bool seed_given) {
  std::vector<eiv_setting> settings;
  if (!cfg.settings.empty()) {
    for (const auto& s : cfg.settings) settings.push_back(parse_setting(s));
  } else if (cfg.full_table1) {
    settings.resize(eiv_table1_settings(nullptr, 0));
    eiv_table1_settings(settings.data(), settings.size());
  } else {
    settings.resize(eiv_desk_settings(nullptr, 0));
    eiv_desk_settings(settings.data(), settings.size());
  }
  eiv_coverage_options opts{};
  eiv_coverage_options_default(&opts);
  if (cfg.full_table1) {
    opts.datasets = 1000;
    opts.boot_reps = 999;
  }
  if (replicates_given) opts.datasets = cfg.replicates;
  if (boot_given) opts.boot_reps = cfg.boot_reps;
  if (level_given) opts.level = cfg.level;
  if (seed_given) opts.seed = cfg.seed;
  opts.threads = cfg.threads;

  eiv_coverage_report* raw = nullptr;
  check(eiv_coverage_experiment(settings.data(), settings.size(), &opts, &raw));
  const ReportPtr report(raw);
  char* text = nullptr;
  const eiv_format fmt =
      resolve_format(cfg, "csv") == "csv" ? EIV_FORMAT_CSV : EIV_FORMAT_JSON;
  check(eiv_coverage_report_serialize(report.get(), fmt, &text));
  const std::string body(text);
  eiv_string_free(text);
  emit(cfg, body);
}

int exit_code_for(eiv_status status) {
  switch (status) {
    case EIV_ERR_PARSE:
    case EIV_ERR_IO:
    case EIV_ERR_TOO_FEW_POINTS: return kExitParse;
    case EIV_ERR_INVALID_ARGUMENT: return kExitUsage;
    default: return kExitNumeric;
  }
}

int report_error(const std::string& code, const std::string& message, std::size_t line,
                 int exit_code) {
  json err = {{"code", code}, {"message", message}, {"exit_code", exit_code}};
  if (line > 0) err["line"] = line;
  std::cerr << json{{"error", err}}.dump() << '\n';
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slope posterior for bivariate errors-in-variables data"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output,-o", cfg.output_path, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv or json");
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input,-i", cfg.input_path, "Two-column CSV or whitespace file");
  };
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--nu", cfg.nu, "Degrees of freedom (instead of --input)");
    sub->add_option("--r", cfg.r, "Correlation (instead of --input)");
    sub->add_option("--l", cfg.l, "SD ratio (instead of --input)");
  };

  CLI::App* fit = app.add_subcommand("fit", "Posterior median and shortest interval");
  add_input(fit);
  add_params(fit);
  add_common(fit);
  fit->add_option("--level", cfg.level, "Interval probability")->check(CLI::Range(0.0, 1.0));

  CLI::App* density = app.add_subcommand("density", "Posterior density and CDF on a grid");
  add_input(density);
  add_params(density);
  add_common(density);
  density->add_option("--grid", cfg.grid_points, "Number of grid points");
  density->add_option("--beta-min", cfg.beta_min, "Lower end of a uniform beta grid");
  density->add_option("--beta-max", cfg.beta_max, "Upper end of a uniform beta grid");

  CLI::App* estimators = app.add_subcommand("estimators", "Classical slopes and bootstrap CIs");
  add_input(estimators);
  add_common(estimators);
  estimators->add_option("--level", cfg.level, "Interval level")->check(CLI::Range(0.0, 1.0));
  estimators->add_option("--boot-reps", cfg.boot_reps, "Bootstrap replicates");
  estimators->add_option("--seed", cfg.seed, "Bootstrap seed");

  CLI::App* agreement = app.add_subcommand("agreement", "Bland-Altman statistics");
  add_input(agreement);
  add_common(agreement);

  CLI::App* simulate = app.add_subcommand("simulate", "Coverage experiment");
  add_common(simulate);
  CLI::Option* level_opt =
      simulate->add_option("--level", cfg.level, "Nominal level (default 0.90)")
          ->check(CLI::Range(0.0, 1.0));
  CLI::Option* reps_opt =
      simulate->add_option("--replicates", cfg.replicates, "Datasets per setting (default 200)");
  CLI::Option* boot_opt =
      simulate->add_option("--boot-reps", cfg.boot_reps, "Bootstrap replicates (default 199)");
  CLI::Option* seed_opt = simulate->add_option("--seed", cfg.seed, "Master seed (default 20110727)");
  simulate->add_option("--setting", cfg.settings, "n,sigma1,sigma2 (repeatable)");
  simulate->add_flag("--full-table1", cfg.full_table1,
                     "All fifteen settings with 1000 datasets x 999 replicates");
  simulate->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), 0, kExitUsage);
  }

  try {
    if (fit->parsed()) {
      cfg.command = "fit";
      run_fit(cfg);
    } else if (density->parsed()) {
      cfg.command = "density";
      run_density(cfg);
    } else if (estimators->parsed()) {
      cfg.command = "estimators";
      run_estimators(cfg);
    } else if (agreement->parsed()) {
      cfg.command = "agreement";
      run_agreement(cfg);
    } else if (simulate->parsed()) {
      cfg.command = "simulate";
      if (!level_opt->count()) cfg.level = 0.90;
      run_simulate(cfg, reps_opt->count() > 0, boot_opt->count() > 0, level_opt->count() > 0,
                   seed_opt->count() > 0);
    }
  } catch (const UsageError& e) {
    return report_error("UsageError", e.message, 0, kExitUsage);
  } catch (const CommandError& e) {
    return report_error(eiv_status_name(e.status), e.message, e.line, exit_code_for(e.status));
  }
  return 0;
}
