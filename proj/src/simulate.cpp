#include "eiv/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "eiv/error.hpp"
#include "eiv/estimators.hpp"
#include "eiv/format.hpp"
#include "eiv/rng.hpp"

namespace eiv {

namespace {

struct DatasetOutcome {
  bool ok = false;
  bool posterior = false;
  bool geometric_mean = false;
  bool ols_bisector = false;
  bool orthogonal = false;
};

bool contains(double lo, double hi, double value) { return lo <= value && value <= hi; }

DatasetOutcome run_one(const CoverageSetting& setting, std::uint64_t seed,
                       const CoverageOptions& opts) {
  constexpr double kTrueSlope = 1.0;
  DatasetOutcome out;
  try {
    ModelConfig cfg;
    cfg.n = setting.n;
    cfg.beta = kTrueSlope;
    cfg.alpha = 0.0;
    cfg.mu1 = 0.0;
    cfg.tau = 1.0;
    cfg.sigma1 = setting.sigma1;
    cfg.sigma2 = setting.sigma2;
    cfg.seed = seed;
    const Dataset data = generate_dataset(cfg);
    const SufficientStats stats = sufficient_stats(data);
    const PosteriorModel model = PosteriorModel::build(stats, opts.quad);
    const IntervalEstimate iv = model.shortest_interval(opts.level);

    constexpr Estimator kCompared[] = {Estimator::GeometricMean, Estimator::OlsBisector,
                                       Estimator::Orthogonal};
    const auto cis = bootstrap_cis(data, kCompared, opts.level, opts.boot_reps,
                                   derive_seed(seed, {0xb007}));
    out.posterior = contains(iv.lower, iv.upper, kTrueSlope);
    out.geometric_mean = contains(cis[0].lower, cis[0].upper, kTrueSlope);
    out.ols_bisector = contains(cis[1].lower, cis[1].upper, kTrueSlope);
    out.orthogonal = contains(cis[2].lower, cis[2].upper, kTrueSlope);
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

double percent(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

void ModelConfig::validate() const {
  require(n >= 3, "simulated datasets need n >= 3");
  require(tau > 0.0 && std::isfinite(tau), "tau must be positive");
  require(sigma1 >= 0.0 && sigma2 >= 0.0, "error SDs must be nonnegative");
  require(std::isfinite(beta) && std::isfinite(alpha) && std::isfinite(mu1),
          "model parameters must be finite");
}

Dataset generate_dataset(const ModelConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.y1.reserve(config.n);
  data.y2.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double xi = config.mu1 + config.tau * normal(rng);
    const double u1 = config.sigma1 * normal(rng);
    const double u2 = config.sigma2 * normal(rng);
    data.push_back(xi + u1, config.alpha + config.beta * xi + u2);
  }
  return data;
}

std::vector<CoverageSetting> table1_settings() {
  constexpr std::pair<double, double> kErrors[] = {
      {0.05, 1.00}, {0.10, 0.50}, {0.20, 0.20}, {0.50, 0.10}, {1.00, 0.05}};
  std::vector<CoverageSetting> out;
  for (std::size_t n : {20, 50, 100}) {
    for (auto [s1, s2] : kErrors) out.push_back({n, s1, s2});
  }
  return out;
}

std::vector<CoverageSetting> desk_settings() { return {{20, 0.20, 0.20}, {100, 1.00, 0.05}}; }

CoverageReport coverage_experiment(std::span<const CoverageSetting> settings,
                                   const CoverageOptions& opts) {
  require(opts.datasets >= 50, "coverage experiment needs at least 50 datasets");
  require(opts.level > 0.0 && opts.level < 1.0, "coverage level must lie in (0, 1)");
  require(opts.boot_reps >= 100, "coverage experiment needs at least 100 bootstrap replicates");
  opts.quad.validate();
  for (const auto& s : settings) {
    require(s.n >= 3, "coverage settings need n >= 3");
    require(s.sigma1 >= 0.0 && s.sigma2 >= 0.0, "error SDs must be nonnegative");
    require(s.sigma1 > 0.0 || s.sigma2 > 0.0,
            "noise-free settings give perfectly correlated data");
  }

  unsigned threads = opts.threads == 0 ? std::thread::hardware_concurrency() : opts.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(opts.datasets)));

  CoverageReport report;
  report.datasets = opts.datasets;
  report.boot_reps = opts.boot_reps;
  report.level = opts.level;
  report.seed = opts.seed;

  for (std::size_t s = 0; s < settings.size(); ++s) {
    std::vector<DatasetOutcome> outcomes(opts.datasets);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t d = next++; d < opts.datasets; d = next++) {
        outcomes[d] = run_one(settings[s], derive_seed(opts.seed, {s, d}), opts);
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    CoverageRow row;
    row.setting = settings[s];
    std::size_t post = 0, gm = 0, olsb = 0, orth = 0;
    for (const auto& o : outcomes) {
      if (!o.ok) {
        ++row.excluded;
        continue;
      }
      ++row.used;
      post += o.posterior;
      gm += o.geometric_mean;
      olsb += o.ols_bisector;
      orth += o.orthogonal;
    }
    row.posterior = percent(post, row.used);
    row.geometric_mean = percent(gm, row.used);
    row.ols_bisector = percent(olsb, row.used);
    row.orthogonal = percent(orth, row.used);
    report.rows.push_back(row);
  }
  return report;
}

std::string CoverageReport::to_csv() const {
  std::ostringstream out;
  out << "n,sigma1,sigma2,posterior,geometric_mean,ols_bisector,orthogonal,used,excluded\n";
  for (const auto& r : rows) {
    out << r.setting.n << ',' << format_number(r.setting.sigma1) << ','
        << format_number(r.setting.sigma2) << ',' << format_number(r.posterior) << ','
        << format_number(r.geometric_mean) << ',' << format_number(r.ols_bisector) << ','
        << format_number(r.orthogonal) << ',' << r.used << ',' << r.excluded << '\n';
  }
  return out.str();
}

std::string CoverageReport::to_json() const {
  nlohmann::json j;
  j["datasets"] = datasets;
  j["boot_reps"] = boot_reps;
  j["level"] = round_sig(level);
  j["seed"] = seed;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"n", r.setting.n},
                         {"sigma1", round_sig(r.setting.sigma1)},
                         {"sigma2", round_sig(r.setting.sigma2)},
                         {"posterior", round_sig(r.posterior)},
                         {"geometric_mean", round_sig(r.geometric_mean)},
                         {"ols_bisector", round_sig(r.ols_bisector)},
                         {"orthogonal", round_sig(r.orthogonal)},
                         {"used", r.used},
                         {"excluded", r.excluded}});
  }
  return j.dump(2) + "\n";
}

}  // namespace eiv
