#pragma once

// Synthetic data from the structural model
//   y1 = xi + u1,  y2 = alpha + beta xi + u2,
//   xi ~ N(mu1, tau^2), u1 ~ N(0, sigma1^2), u2 ~ N(0, sigma2^2),
// and the coverage experiment comparing shortest posterior intervals with
// basic bootstrap intervals of the classical estimators.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eiv/dataset.hpp"
#include "eiv/posterior.hpp"

namespace eiv {

struct ModelConfig {
  std::size_t n = 20;
  double beta = 1.0;
  double alpha = 0.0;
  double mu1 = 0.0;
  double tau = 1.0;
  double sigma1 = 0.2;
  double sigma2 = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Deterministic given config.seed.
Dataset generate_dataset(const ModelConfig& config);

struct CoverageSetting {
  std::size_t n = 20;
  double sigma1 = 0.2;
  double sigma2 = 0.2;
};

/// The fifteen (n, sigma1, sigma2) settings of the published coverage table.
std::vector<CoverageSetting> table1_settings();
/// The two settings run by default at desk scale.
std::vector<CoverageSetting> desk_settings();

struct CoverageOptions {
  std::size_t datasets = 200;
  std::size_t boot_reps = 199;
  double level = 0.90;
  std::uint64_t seed = 20110727;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  QuadSettings quad{};
};

struct CoverageRow {
  CoverageSetting setting;
  double posterior = 0.0;
  double geometric_mean = 0.0;
  double ols_bisector = 0.0;
  double orthogonal = 0.0;
  /// Datasets contributing to the percentages.
  std::size_t used = 0;
  /// Datasets dropped after a numeric failure (degenerate data, quadrature,
  /// bootstrap).
  std::size_t excluded = 0;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
  std::size_t datasets = 0;
  std::size_t boot_reps = 0;
  double level = 0.0;
  std::uint64_t seed = 0;

  std::string to_csv() const;
  std::string to_json() const;
};

/// Datasets use beta = 1, alpha = 0, mu1 = 0, tau = 1. Dataset d of setting s
/// is seeded by (seed, s, d); percentages count intervals containing 1.
CoverageReport coverage_experiment(std::span<const CoverageSetting> settings,
                                   const CoverageOptions& options = {});

}  // namespace eiv
