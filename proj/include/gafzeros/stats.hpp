#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gafzeros/extremes.hpp"

namespace gafz {

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of
/// `sorted` and `cdf`, evaluated on both sides of every jump.
/// Throws std::invalid_argument for empty or unsorted input.
double ks_stat(const std::vector<double>& sorted,
               const std::function<double(double)>& cdf);

/// sup |F_a - F_b| for two sorted samples.
double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

/// 1.36 / sqrt(m), and 1.36 sqrt((m + n) / (m n)) for two samples.
double ks_critical(std::size_t m);
double ks_critical(std::size_t m, std::size_t n);

/// Variance over mean with the 1/m variance. Throws std::invalid_argument
/// when the mean is zero or there are no counts.
double dispersion(const std::vector<std::int64_t>& counts);

/// 0.999 quantile of chi-square(dof), dof = 1..15.
double chi_square_quantile_999(int dof);

/// Cell of a mark among `bins` cells of equal omega/pi measure. SU2: bands of
/// 1/(1+|z|^2); torus: an r x c grid with r the largest divisor of `bins` not
/// above sqrt(bins); GEF: annuli of equal area in B_R.
int uniform_bin(const EnsembleSpec& spec, const SurfacePoint& mark, int bins);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
};

/// Pearson statistic against equal expected counts |marks| / bins.
/// Throws std::invalid_argument when the expected count is below 5.
ChiSquare chi_square_uniform(const std::vector<SurfacePoint>& marks,
                             const EnsembleSpec& spec, int bins);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean of N(a, U) and its standard error sd / sqrt(trials). `a` and
/// `region` must appear in `layout`.
MeanEstimate empirical_intensity(const std::vector<TrialRecord>& records,
                                 const TrialLayout& layout, double a,
                                 Region region);

/// Mean of N(N-1)...(N-k+1).
MeanEstimate factorial_moment(const std::vector<TrialRecord>& records,
                              const TrialLayout& layout, double a,
                              Region region, int k);

/// Sample mean and sd / sqrt(m) of arbitrary values.
MeanEstimate mean_estimate(const std::vector<double>& values);

struct KsEntry {
  int k = 0;
  Model model = Model::SU2;
  std::size_t samples = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct DispersionEntry {
  double a = 0.0;
  double value = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool pass = false;
};

struct ChiSquareEntry {
  std::string label;
  std::size_t marks = 0;
  double statistic = 0.0;
  int dof = 0;
  double threshold = 0.0;
  bool pass = false;
};

struct MeanCountEntry {
  double a = 0.0;
  Region region = Region::Whole;
  double mean = 0.0;
  double std_error = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct GofReport {
  std::int64_t trials = 0;
  std::vector<KsEntry> ks;
  std::vector<DispersionEntry> dispersion;
  /// "smallest-pair" over all trials, then the halves split at the median
  /// of sigma_1.
  std::vector<ChiSquareEntry> chi_square;
  std::vector<MeanCountEntry> mean_counts;

  bool pass() const;
};

struct GofOptions {
  /// Non-positive selects ks_critical(samples).
  double ks_threshold = 0.0;
  double dispersion_low = 0.95;
  double dispersion_high = 1.05;
  int bins = 8;
  /// Allowed |mean - expected| / expected.
  double mean_relative_tolerance = 0.1;
};

/// sigma-tilde_k over all records that have a k-th pair.
std::vector<double> sigma_samples(const std::vector<TrialRecord>& records,
                                  int k);

GofReport make_gof_report(const std::vector<TrialRecord>& records,
                          const EnsembleSpec& spec, const TrialLayout& layout,
                          const GofOptions& options = {});

}  // namespace gafz
