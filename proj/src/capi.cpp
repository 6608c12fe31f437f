#include "eiv/eiv.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "eiv/dataset.hpp"
#include "eiv/error.hpp"
#include "eiv/estimators.hpp"
#include "eiv/posterior.hpp"
#include "eiv/simulate.hpp"

struct eiv_dataset {
  eiv::Dataset data;
};

struct eiv_model {
  eiv::PosteriorModel model;
};

struct eiv_coverage_report {
  eiv::CoverageReport report;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_line = 0;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

eiv_status map_code(eiv::ErrorCode code) {
  using eiv::ErrorCode;
  switch (code) {
    case ErrorCode::Domain: return EIV_ERR_DOMAIN;
    case ErrorCode::NonConvergence: return EIV_ERR_NONCONVERGENCE;
    case ErrorCode::QuadratureFailure: return EIV_ERR_QUADRATURE;
    case ErrorCode::TooFewPoints: return EIV_ERR_TOO_FEW_POINTS;
    case ErrorCode::DegenerateVariance: return EIV_ERR_DEGENERATE_VARIANCE;
    case ErrorCode::PerfectCorrelation: return EIV_ERR_PERFECT_CORRELATION;
    case ErrorCode::ZeroCovariance: return EIV_ERR_ZERO_COVARIANCE;
    case ErrorCode::EstimatorUndefined: return EIV_ERR_ESTIMATOR_UNDEFINED;
    case ErrorCode::ParseError: return EIV_ERR_PARSE;
    case ErrorCode::Io: return EIV_ERR_IO;
  }
  return EIV_ERR_INTERNAL;
}

eiv_status set_error(eiv_status status, const std::string& message, std::size_t line = 0) {
  g_last_error = message;
  g_last_line = line;
  return status;
}

template <typename Fn>
eiv_status guarded(Fn&& fn) {
  try {
    fn();
    return EIV_OK;
  } catch (const eiv::ParseError& e) {
    return set_error(EIV_ERR_PARSE, e.what(), e.line());
  } catch (const eiv::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(EIV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(EIV_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(EIV_ERR_INTERNAL, "unknown exception");
  }
}

eiv_status null_arg(const char* what) {
  return set_error(EIV_ERR_INVALID_ARGUMENT, std::string("null argument: ") + what);
}

eiv::QuadSettings to_cpp(const eiv_quad_settings* q) {
  eiv::QuadSettings s;
  if (q != nullptr) {
    s.rel_tol = q->rel_tol;
    s.abs_tol = q->abs_tol;
    s.max_subdivisions = q->max_subdivisions;
    s.grid_points = q->grid_points;
  }
  return s;
}

eiv::SufficientStats to_cpp(const eiv_stats& s) {
  return {s.n, s.nu, s.mean1, s.mean2, s.s11, s.s22, s.s12, s.r, s.l};
}

bool valid_estimator(int e) { return e >= EIV_EST_OLS_Y2_ON_Y1 && e <= EIV_EST_ORTHOGONAL; }

eiv_bootstrap_ci to_c(const eiv::BootstrapCI& ci) {
  return {static_cast<eiv_estimator>(ci.estimator), ci.estimate, ci.lower, ci.upper,
          ci.level, ci.replicates, ci.redrawn, ci.seed};
}

eiv_status fill_grid(const eiv_model* model, const eiv::GridSpec& spec, eiv_grid_row* rows) {
  if (model == nullptr) return null_arg("model");
  if (rows == nullptr) return null_arg("rows");
  return guarded([&] {
    const auto grid = model->model.density_grid(spec);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rows[i] = {grid[i].beta, grid[i].theta, grid[i].density, grid[i].cdf};
    }
  });
}

std::size_t copy_settings(const std::vector<eiv::CoverageSetting>& s, eiv_setting* out,
                          std::size_t cap) {
  if (out != nullptr) {
    for (std::size_t i = 0; i < s.size() && i < cap; ++i) {
      out[i] = {s[i].n, s[i].sigma1, s[i].sigma2};
    }
  }
  return s.size();
}

}  // namespace

extern "C" {

const char* eiv_status_name(eiv_status status) {
  switch (status) {
    case EIV_OK: return "Ok";
    case EIV_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case EIV_ERR_DOMAIN: return "DomainError";
    case EIV_ERR_NONCONVERGENCE: return "NonConvergence";
    case EIV_ERR_QUADRATURE: return "QuadratureFailure";
    case EIV_ERR_TOO_FEW_POINTS: return "TooFewPoints";
    case EIV_ERR_DEGENERATE_VARIANCE: return "DegenerateVariance";
    case EIV_ERR_PERFECT_CORRELATION: return "PerfectCorrelation";
    case EIV_ERR_ZERO_COVARIANCE: return "ZeroCovariance";
    case EIV_ERR_ESTIMATOR_UNDEFINED: return "EstimatorUndefined";
    case EIV_ERR_PARSE: return "ParseError";
    case EIV_ERR_IO: return "IoError";
    case EIV_ERR_INTERNAL: return "InternalError";
  }
  return "Unknown";
}

const char* eiv_last_error(void) { return g_last_error.c_str(); }
size_t eiv_last_error_line(void) { return g_last_line; }
const char* eiv_version(void) { return "1.0.0"; }

eiv_status eiv_dataset_create(const double* y1, const double* y2, size_t n, eiv_dataset** out) {
  if (out == nullptr) return null_arg("out");
  if (n > 0 && (y1 == nullptr || y2 == nullptr)) return null_arg("y1/y2");
  return guarded([&] {
    auto* d = new eiv_dataset{};
    d->data.y1.assign(y1, y1 + n);
    d->data.y2.assign(y2, y2 + n);
    *out = d;
  });
}

eiv_status eiv_dataset_read(const char* path, eiv_dataset** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = new eiv_dataset{eiv::read_dataset(path)}; });
}

eiv_status eiv_dataset_parse(const char* text, eiv_dataset** out) {
  if (text == nullptr) return null_arg("text");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = new eiv_dataset{eiv::parse_dataset(text)}; });
}

size_t eiv_dataset_size(const eiv_dataset* data) { return data == nullptr ? 0 : data->data.size(); }

eiv_status eiv_dataset_copy(const eiv_dataset* data, double* y1, double* y2) {
  if (data == nullptr) return null_arg("data");
  if (y1 == nullptr || y2 == nullptr) return null_arg("y1/y2");
  std::memcpy(y1, data->data.y1.data(), data->data.size() * sizeof(double));
  std::memcpy(y2, data->data.y2.data(), data->data.size() * sizeof(double));
  return EIV_OK;
}

void eiv_dataset_free(eiv_dataset* data) { delete data; }

eiv_status eiv_sufficient_stats(const eiv_dataset* data, eiv_stats* out) {
  if (data == nullptr) return null_arg("data");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto s = eiv::sufficient_stats(data->data);
    *out = {s.n, s.nu, s.mean1, s.mean2, s.s11, s.s22, s.s12, s.r, s.l};
  });
}

void eiv_quad_settings_default(eiv_quad_settings* out) {
  if (out == nullptr) return;
  const eiv::QuadSettings s;
  *out = {s.rel_tol, s.abs_tol, s.max_subdivisions, s.grid_points};
}

eiv_status eiv_model_build(double nu, double r, double l, const eiv_quad_settings* quad,
                           eiv_model** out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = new eiv_model{eiv::PosteriorModel::build(nu, r, l, to_cpp(quad))}; });
}

eiv_status eiv_model_from_stats(const eiv_stats* stats, const eiv_quad_settings* quad,
                                eiv_model** out) {
  if (stats == nullptr) return null_arg("stats");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new eiv_model{eiv::PosteriorModel::build(to_cpp(*stats), to_cpp(quad))};
  });
}

void eiv_model_free(eiv_model* model) { delete model; }

eiv_status eiv_model_params(const eiv_model* model, double* nu, double* r, double* l,
                            double* norm_const) {
  if (model == nullptr) return null_arg("model");
  if (nu != nullptr) *nu = model->model.nu();
  if (r != nullptr) *r = model->model.r();
  if (l != nullptr) *l = model->model.l();
  if (norm_const != nullptr) *norm_const = model->model.norm_const();
  return EIV_OK;
}

eiv_status eiv_density(const eiv_model* model, double beta, double* out) {
  if (model == nullptr) return null_arg("model");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = model->model.density(beta); });
}

eiv_status eiv_cdf(const eiv_model* model, double beta, double* out) {
  if (model == nullptr) return null_arg("model");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = model->model.cdf(beta); });
}

eiv_status eiv_quantile(const eiv_model* model, double p, double* out) {
  if (model == nullptr) return null_arg("model");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = model->model.quantile(p); });
}

eiv_status eiv_median(const eiv_model* model, double* out) {
  if (model == nullptr) return null_arg("model");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = model->model.median(); });
}

eiv_status eiv_shortest_interval(const eiv_model* model, double level, eiv_interval* out) {
  if (model == nullptr) return null_arg("model");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto iv = model->model.shortest_interval(level);
    *out = {iv.lower, iv.upper, iv.level, iv.median, iv.unimodal ? 1 : 0};
  });
}

eiv_status eiv_density_grid(const eiv_model* model, size_t points, eiv_grid_row* rows) {
  eiv::GridSpec spec;
  spec.points = points;
  return fill_grid(model, spec, rows);
}

eiv_status eiv_density_grid_beta(const eiv_model* model, double beta_lo, double beta_hi,
                                 size_t points, eiv_grid_row* rows) {
  eiv::GridSpec spec;
  spec.points = points;
  spec.beta_lo = beta_lo;
  spec.beta_hi = beta_hi;
  return fill_grid(model, spec, rows);
}

eiv_status eiv_closed_form_density(double beta_tilde, double r, int n, double* out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = eiv::closed_form_density(beta_tilde, r, n); });
}

const char* eiv_estimator_name(eiv_estimator estimator) {
  if (!valid_estimator(estimator)) return "unknown";
  return eiv::to_string(static_cast<eiv::Estimator>(estimator)).data();
}

eiv_status eiv_estimate_slopes(const eiv_stats* stats, eiv_slope_estimates* out) {
  if (stats == nullptr) return null_arg("stats");
  if (out == nullptr) return null_arg("out");
  eiv::SlopeEstimates est;
  const eiv_status st = guarded([&] { est = eiv::slope_estimates(to_cpp(*stats)); });
  if (st != EIV_OK) return st;
  *out = {est.b1,
          est.b2.value_or(kNaN),
          est.geometric_mean.value_or(kNaN),
          est.ols_bisector.value_or(kNaN),
          est.orthogonal.value_or(kNaN),
          est.defined() ? 1 : 0};
  if (!est.defined()) {
    return set_error(EIV_ERR_ZERO_COVARIANCE, "S12 = 0: only b1 is defined");
  }
  return EIV_OK;
}

eiv_status eiv_compute_limit_variants(double b1, double b2, eiv_limit_variants* out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto v = eiv::limit_variants(b1, b2);
    *out = {v.olsb_0, v.olsb_inf, v.or_0, v.or_inf};
  });
}

eiv_status eiv_compute_ols_intervals(const eiv_stats* stats, double level, eiv_ols_intervals* out) {
  if (stats == nullptr) return null_arg("stats");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto v = eiv::ols_intervals(to_cpp(*stats), level);
    *out = {v.b1,
            v.b1_lower,
            v.b1_upper,
            v.b2.value_or(kNaN),
            v.b2_lower.value_or(kNaN),
            v.b2_upper.value_or(kNaN),
            v.level};
  });
}

eiv_status eiv_bootstrap_interval(const eiv_dataset* data, eiv_estimator estimator, double level,
                            size_t replicates, uint64_t seed, eiv_bootstrap_ci* out) {
  return eiv_bootstrap_cis(data, &estimator, 1, level, replicates, seed, out);
}

eiv_status eiv_bootstrap_cis(const eiv_dataset* data, const eiv_estimator* estimators,
                             size_t count, double level, size_t replicates, uint64_t seed,
                             eiv_bootstrap_ci* out) {
  if (data == nullptr) return null_arg("data");
  if (estimators == nullptr || count == 0) return null_arg("estimators");
  if (out == nullptr) return null_arg("out");
  std::vector<eiv::Estimator> list;
  for (size_t i = 0; i < count; ++i) {
    if (!valid_estimator(estimators[i])) {
      return set_error(EIV_ERR_INVALID_ARGUMENT, "unknown estimator");
    }
    list.push_back(static_cast<eiv::Estimator>(estimators[i]));
  }
  return guarded([&] {
    const auto cis = eiv::bootstrap_cis(data->data, list, level, replicates, seed);
    for (size_t i = 0; i < cis.size(); ++i) out[i] = to_c(cis[i]);
  });
}

eiv_status eiv_agreement_stats(const eiv_dataset* data, eiv_agreement* out) {
  if (data == nullptr) return null_arg("data");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto a = eiv::agreement_stats(data->data);
    *out = {a.n, a.mean_diff, a.sd_diff, a.loa_lower, a.loa_upper, a.cov_diff_mean};
  });
}

eiv_status eiv_agreement_points(const eiv_dataset* data, double* means, double* diffs) {
  if (data == nullptr) return null_arg("data");
  if (means == nullptr || diffs == nullptr) return null_arg("means/diffs");
  return guarded([&] {
    const auto pts = eiv::agreement_points(data->data);
    for (size_t i = 0; i < pts.size(); ++i) {
      means[i] = pts[i].mean;
      diffs[i] = pts[i].diff;
    }
  });
}

eiv_status eiv_generate_dataset(const eiv_model_config* config, eiv_dataset** out) {
  if (config == nullptr) return null_arg("config");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    eiv::ModelConfig c;
    c.n = config->n;
    c.beta = config->beta;
    c.alpha = config->alpha;
    c.mu1 = config->mu1;
    c.tau = config->tau;
    c.sigma1 = config->sigma1;
    c.sigma2 = config->sigma2;
    c.seed = config->seed;
    *out = new eiv_dataset{eiv::generate_dataset(c)};
  });
}

void eiv_coverage_options_default(eiv_coverage_options* out) {
  if (out == nullptr) return;
  const eiv::CoverageOptions o;
  *out = {o.datasets, o.boot_reps, o.level, o.seed, o.threads};
}

size_t eiv_table1_settings(eiv_setting* out, size_t cap) {
  return copy_settings(eiv::table1_settings(), out, cap);
}

size_t eiv_desk_settings(eiv_setting* out, size_t cap) {
  return copy_settings(eiv::desk_settings(), out, cap);
}

eiv_status eiv_coverage_experiment(const eiv_setting* settings, size_t count,
                                   const eiv_coverage_options* options,
                                   eiv_coverage_report** out) {
  if (settings == nullptr && count > 0) return null_arg("settings");
  if (out == nullptr) return null_arg("out");
  std::vector<eiv::CoverageSetting> list;
  for (size_t i = 0; i < count; ++i) {
    list.push_back({settings[i].n, settings[i].sigma1, settings[i].sigma2});
  }
  eiv::CoverageOptions opts;
  if (options != nullptr) {
    opts.datasets = options->datasets;
    opts.boot_reps = options->boot_reps;
    opts.level = options->level;
    opts.seed = options->seed;
    opts.threads = options->threads;
  }
  return guarded([&] { *out = new eiv_coverage_report{eiv::coverage_experiment(list, opts)}; });
}

size_t eiv_coverage_report_rows(const eiv_coverage_report* report) {
  return report == nullptr ? 0 : report->report.rows.size();
}

eiv_status eiv_coverage_report_row(const eiv_coverage_report* report, size_t index,
                                   eiv_coverage_row* out) {
  if (report == nullptr) return null_arg("report");
  if (out == nullptr) return null_arg("out");
  if (index >= report->report.rows.size()) {
    return set_error(EIV_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const auto& r = report->report.rows[index];
  *out = {r.setting.n, r.setting.sigma1, r.setting.sigma2, r.posterior, r.geometric_mean,
          r.ols_bisector, r.orthogonal, r.used, r.excluded};
  return EIV_OK;
}

eiv_status eiv_coverage_report_serialize(const eiv_coverage_report* report, eiv_format format,
                                         char** out) {
  if (report == nullptr) return null_arg("report");
  if (out == nullptr) return null_arg("out");
  if (format != EIV_FORMAT_CSV && format != EIV_FORMAT_JSON) {
    return set_error(EIV_ERR_INVALID_ARGUMENT, "unknown format");
  }
  return guarded([&] {
    const std::string text =
        format == EIV_FORMAT_CSV ? report->report.to_csv() : report->report.to_json();
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void eiv_coverage_report_free(eiv_coverage_report* report) { delete report; }
void eiv_string_free(char* s) { delete[] s; }

}  // extern "C"
