#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gafzeros/errors.hpp"
#include "gafzeros/extremes.hpp"
#include "gafzeros/kacrice.hpp"
#include "gafzeros/stats.hpp"

namespace gafz {

inline constexpr std::string_view kVersion = "1.0.0";
/// First line of trials.csv; bumped when the columns change.
inline constexpr std::string_view kTrialsCsvSchema = "# gafzeros trials.csv schema 1";

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  Model model = Model::SU2;
  /// Degree for SU2 and the torus.
  int n = 64;
  /// Disk radius and series truncation for the GEF (0 = default).
  double radius = 6.0;
  int truncation = 0;
  std::int64_t trials = 100;
  std::uint64_t master_seed = 1;
  std::vector<double> thresholds{1.0};
  int k_max = 3;
  std::vector<Region> regions{Region::Whole};
  int workers = 1;
  std::string out_dir;
  OutputFormat format = OutputFormat::Csv;

  EnsembleSpec spec() const;
  TrialLayout layout() const;
  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
  /// Canonical key=value text; parse_config(to_text()) round-trips.
  std::string to_text() const;
};

/// Sets one key ("model", "n", "radius", "truncation", "trials", "seed", "a",
/// "kmax", "region", "workers", "out_dir", "format"). List keys take
/// comma-separated values. Throws std::invalid_argument.
void set_config_value(ExperimentConfig& config, std::string_view key,
                      std::string_view value);

/// Flat key=value lines; blank lines and '#' comments are skipped. Later
/// keys override earlier ones and `base`.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

std::uint64_t fnv1a64(std::string_view bytes);
/// fnv1a64 of to_text(), which is the config copy written to the output.
std::uint64_t config_hash(const ExperimentConfig& config);

/// A trial that could not be completed; `seed` replays it.
class TrialFailure : public NumericalError {
 public:
  TrialFailure(const std::string& what, SeedRecord seed)
      : NumericalError(what), seed_(seed) {}
  const SeedRecord& seed() const noexcept { return seed_; }

 private:
  SeedRecord seed_;
};

/// sample -> zeros -> verification -> record, from Stream(master, index).
/// Throws TrialFailure when the zero set does not verify.
TrialRecord run_trial(const EnsembleSpec& spec, const TrialLayout& layout,
                      std::uint64_t master_seed, std::uint64_t trial_index);

/// Trials [first, first + count) over `workers` threads pulling indices
/// from a shared counter. The result is ordered by trial index and does not
/// depend on the worker count. On failure, the lowest failing index among
/// the trials attempted is rethrown.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config,
                                    std::int64_t first = 0);

/// Fraction of trials with |I~_n| != |I_n|, per threshold.
std::vector<double> isolation_mismatch(const std::vector<TrialRecord>& records);

struct AggregateOutput {
  GofReport report;
  std::vector<TrialRecord> records;
  std::vector<double> isolation_mismatch;
  std::string version{kVersion};
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;
  /// Empty when out_dir is empty.
  std::string config_path;
  std::string csv_path;
  std::string summary_path;
};

/// Runs the trials, aggregates, and writes config.txt, trials.csv and
/// summary.json into config.out_dir when it is set.
AggregateOutput run_extremes(const ExperimentConfig& config);

void write_trials_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<TrialRecord>& records);
std::string summary_json(const ExperimentConfig& config,
                         const AggregateOutput& output);

/// JSON record of rho_k at the given chart points (k = points.size()).
/// Errors propagate from rho_k.
std::string run_rho(const EnsembleSpec& spec, const std::vector<cdouble>& points);

/// Zeros of one sampled section, as CSV (chart,re,im,residual) or JSON.
std::string run_sample(const EnsembleSpec& spec, std::uint64_t master_seed,
                       std::uint64_t trial_index, OutputFormat format);

}  // namespace gafz
