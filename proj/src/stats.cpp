#include "gafzeros/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "gafzeros/kacrice.hpp"

namespace gafz {

double ks_stat(const std::vector<double>& sorted,
               const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw std::invalid_argument("ks_stat: no samples");
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    throw std::invalid_argument("ks_stat: samples are not sorted");
  }
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f,
                  f - static_cast<double>(i) / m});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample(const std::vector<double>& a,
                     const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_two_sample: empty sample");
  }
  if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end())) {
    throw std::invalid_argument("ks_two_sample: samples are not sorted");
  }
  const double ma = static_cast<double>(a.size());
  const double mb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / ma -
                             static_cast<double>(j) / mb));
  }
  return d;
}

double ks_critical(std::size_t m) {
  return 1.36 / std::sqrt(static_cast<double>(m));
}

double ks_critical(std::size_t m, std::size_t n) {
  const double a = static_cast<double>(m), b = static_cast<double>(n);
  return 1.36 * std::sqrt((a + b) / (a * b));
}

double dispersion(const std::vector<std::int64_t>& counts) {
  if (counts.empty()) throw std::invalid_argument("dispersion: no counts");
  const double m = static_cast<double>(counts.size());
  double mean = 0.0;
  for (auto c : counts) mean += static_cast<double>(c);
  mean /= m;
  if (mean == 0.0) throw std::invalid_argument("dispersion: mean is zero");
  double var = 0.0;
  for (auto c : counts) {
    const double e = static_cast<double>(c) - mean;
    var += e * e;
  }
  return var / m / mean;
}

double chi_square_quantile_999(int dof) {
  static constexpr std::array<double, 15> table{
      10.8276, 13.8155, 16.2662, 18.4668, 20.5150, 22.4577, 24.3219, 26.1245,
      27.8772, 29.5883, 31.2641, 32.9095, 34.5282, 36.1233, 37.6973};
  if (dof < 1 || dof > 15) {
    throw std::invalid_argument("chi_square_quantile_999: dof must be in 1..15");
  }
  return table[static_cast<std::size_t>(dof - 1)];
}

namespace {

int bin_of(double t, int bins) {
  return std::clamp(static_cast<int>(std::floor(t * bins)), 0, bins - 1);
}

int grid_rows(int bins) {
  int r = 1;
  for (int d = 1; d * d <= bins; ++d) {
    if (bins % d == 0) r = d;
  }
  return r;
}

}  // namespace

int uniform_bin(const EnsembleSpec& spec, const SurfacePoint& mark, int bins) {
  if (bins < 1) throw std::invalid_argument("uniform_bin: bins < 1");
  switch (spec.model) {
    case Model::SU2: {
      const double r2 = std::norm(mark.coord);
      // Fraction of the sphere's measure with |z| > |mark|, in either chart.
      const double t = mark.chart == Chart::Affine1 ? r2 / (1.0 + r2)
                                                    : 1.0 / (1.0 + r2);
      return bin_of(t, bins);
    }
    case Model::TorusTheta: {
      const int rows = grid_rows(bins);
      const int cols = bins / rows;
      const cdouble z = reduce_torus(mark.coord);
      return bin_of(z.imag(), rows) * cols + bin_of(z.real(), cols);
    }
    case Model::GEF:
      return bin_of(std::norm(mark.coord) / (spec.radius * spec.radius), bins);
  }
  return 0;
}

ChiSquare chi_square_uniform(const std::vector<SurfacePoint>& marks,
                             const EnsembleSpec& spec, int bins) {
  if (bins < 2) throw std::invalid_argument("chi_square_uniform: bins < 2");
  const double expected = static_cast<double>(marks.size()) / bins;
  if (expected < 5.0) {
    throw std::invalid_argument(
        "chi_square_uniform: expected count per bin is below 5");
  }
  std::vector<std::int64_t> observed(static_cast<std::size_t>(bins), 0);
  for (const auto& p : marks) ++observed[static_cast<std::size_t>(uniform_bin(spec, p, bins))];
  double stat = 0.0;
  for (auto o : observed) {
    const double e = static_cast<double>(o) - expected;
    stat += e * e / expected;
  }
  return {stat, bins - 1};
}

MeanEstimate mean_estimate(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double m = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (m - 1.0) / m)};
}

namespace {

std::size_t count_index(const TrialLayout& layout, double a, Region region) {
  const auto ia = std::find(layout.thresholds.begin(), layout.thresholds.end(), a);
  const auto ir = std::find(layout.regions.begin(), layout.regions.end(), region);
  if (ia == layout.thresholds.end() || ir == layout.regions.end()) {
    throw std::invalid_argument("threshold or region is not part of the layout");
  }
  return static_cast<std::size_t>(ia - layout.thresholds.begin()) *
             layout.regions.size() +
         static_cast<std::size_t>(ir - layout.regions.begin());
}

}  // namespace

MeanEstimate empirical_intensity(const std::vector<TrialRecord>& records,
                                 const TrialLayout& layout, double a,
                                 Region region) {
  return factorial_moment(records, layout, a, region, 1);
}

MeanEstimate factorial_moment(const std::vector<TrialRecord>& records,
                              const TrialLayout& layout, double a,
                              Region region, int k) {
  if (k < 1) throw std::invalid_argument("factorial_moment: k < 1");
  const std::size_t idx = count_index(layout, a, region);
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& r : records) {
    const auto n = r.counts.at(idx);
    double f = 1.0;
    for (int j = 0; j < k; ++j) f *= static_cast<double>(n - j);
    values.push_back(f);
  }
  return mean_estimate(values);
}

std::vector<double> sigma_samples(const std::vector<TrialRecord>& records,
                                  int k) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (static_cast<int>(r.sigma.size()) >= k) {
      out.push_back(r.sigma[static_cast<std::size_t>(k - 1)]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool GofReport::pass() const {
  auto ok = [](const auto& v) {
    return std::all_of(v.begin(), v.end(), [](const auto& e) { return e.pass; });
  };
  return ok(ks) && ok(dispersion) && ok(chi_square) && ok(mean_counts);
}

GofReport make_gof_report(const std::vector<TrialRecord>& records,
                          const EnsembleSpec& spec, const TrialLayout& layout,
                          const GofOptions& options) {
  GofReport rep;
  rep.trials = static_cast<std::int64_t>(records.size());

  for (int k = 1; k <= layout.k_max; ++k) {
    const auto s = sigma_samples(records, k);
    if (s.empty()) continue;
    KsEntry e;
    e.k = k;
    e.model = spec.model;
    e.samples = s.size();
    e.statistic = ks_stat(s, [k](double x) { return 1.0 - limit_survival(k, x); });
    e.threshold = options.ks_threshold > 0 ? options.ks_threshold
                                           : ks_critical(s.size());
    e.pass = e.statistic <= e.threshold;
    rep.ks.push_back(e);
  }

  for (double a : layout.thresholds) {
    for (Region region : layout.regions) {
      const auto est = empirical_intensity(records, layout, a, region);
      MeanCountEntry e;
      e.a = a;
      e.region = region;
      e.mean = est.mean;
      e.std_error = est.std_error;
      e.expected = intensity(a, region_measure(spec, region));
      e.tolerance = options.mean_relative_tolerance * e.expected;
      e.pass = std::abs(e.mean - e.expected) <= e.tolerance;
      rep.mean_counts.push_back(e);
    }
    const std::size_t idx = count_index(layout, a, Region::Whole);
    std::vector<std::int64_t> counts;
    counts.reserve(records.size());
    for (const auto& r : records) counts.push_back(r.counts[idx]);
    DispersionEntry d;
    d.a = a;
    d.low = options.dispersion_low;
    d.high = options.dispersion_high;
    try {
      d.value = dispersion(counts);
      d.pass = d.value >= d.low && d.value <= d.high;
    } catch (const std::invalid_argument&) {
      d.value = 0.0;
      d.pass = false;
    }
    rep.dispersion.push_back(d);
  }

  // Marks of the smallest pair, overall and split at the median of sigma_1.
  std::vector<const TrialRecord*> with_pair;
  for (const auto& r : records) {
    if (!r.sigma.empty()) with_pair.push_back(&r);
  }
  std::vector<double> s1;
  for (const auto* r : with_pair) s1.push_back(r->sigma[0]);
  std::vector<double> sorted = s1;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];

  std::vector<SurfacePoint> all, low, high;
  for (const auto* r : with_pair) {
    all.push_back(r->marks[0]);
    (r->sigma[0] < median ? low : high).push_back(r->marks[0]);
  }
  auto add_chi = [&](const std::string& label, const std::vector<SurfacePoint>& m) {
    ChiSquareEntry e;
    e.label = label;
    e.marks = m.size();
    e.dof = options.bins - 1;
    e.threshold = chi_square_quantile_999(e.dof);
    try {
      const auto c = chi_square_uniform(m, spec, options.bins);
      e.statistic = c.statistic;
      e.pass = c.statistic <= e.threshold;
    } catch (const std::invalid_argument&) {
      e.pass = false;
    }
    rep.chi_square.push_back(e);
  };
  add_chi("smallest-pair", all);
  add_chi("below-median", low);
  add_chi("above-median", high);
  return rep;
}

}  // namespace gafz
