#include "gafzeros/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gafzeros/json_out.hpp"

namespace gafz {

namespace {

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
    throw std::invalid_argument("bad value '" + std::string(v) + "' for " +
                                std::string(key));
  }
  return out;
}

std::string_view format_name(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json";
}

}  // namespace

EnsembleSpec ExperimentConfig::spec() const {
  switch (model) {
    case Model::SU2:
      return EnsembleSpec::su2(n);
    case Model::TorusTheta:
      return EnsembleSpec::torus(n);
    case Model::GEF:
      return EnsembleSpec::gef(radius, truncation);
  }
  return {};
}

TrialLayout ExperimentConfig::layout() const {
  TrialLayout l;
  l.thresholds = thresholds;
  l.regions = regions;
  l.k_max = k_max;
  return l;
}

void ExperimentConfig::validate() const {
  spec().validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (k_max < 1) throw std::invalid_argument("kmax must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (thresholds.empty()) throw std::invalid_argument("at least one threshold a is needed");
  for (double a : thresholds) {
    if (!(a > 0.0)) throw std::invalid_argument("thresholds must be > 0");
  }
  if (regions.empty()) throw std::invalid_argument("at least one region is needed");
  for (Region r : regions) {
    const double m = region_measure(spec(), r);
    if (!(m > 0.0 && m <= 1.0)) throw std::invalid_argument("region measure outside (0,1]");
  }
}

std::string ExperimentConfig::to_text() const {
  std::string a, r;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    a += (i ? "," : "") + shortest(thresholds[i]);
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    r += (i ? "," : "") + std::string(region_name(regions[i]));
  }
  std::ostringstream os;
  os << "model=" << model_name(model) << '\n'
     << "n=" << n << '\n'
     << "radius=" << shortest(radius) << '\n'
     << "truncation=" << truncation << '\n'
     << "trials=" << trials << '\n'
     << "seed=" << master_seed << '\n'
     << "a=" << a << '\n'
     << "kmax=" << k_max << '\n'
     << "region=" << r << '\n'
     << "workers=" << workers << '\n'
     << "out_dir=" << out_dir << '\n'
     << "format=" << format_name(format) << '\n';
  return os.str();
}

void set_config_value(ExperimentConfig& c, std::string_view key,
                      std::string_view value) {
  value = trim(value);
  if (key == "model") {
    c.model = parse_model(value);
  } else if (key == "n") {
    c.n = parse_number<int>(key, value);
  } else if (key == "radius") {
    c.radius = parse_number<double>(key, value);
  } else if (key == "truncation") {
    c.truncation = parse_number<int>(key, value);
  } else if (key == "trials") {
    c.trials = parse_number<std::int64_t>(key, value);
  } else if (key == "seed") {
    c.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "a") {
    c.thresholds.clear();
    for (auto v : split_list(value)) c.thresholds.push_back(parse_number<double>(key, v));
  } else if (key == "kmax") {
    c.k_max = parse_number<int>(key, value);
  } else if (key == "region") {
    c.regions.clear();
    for (auto v : split_list(value)) c.regions.push_back(parse_region(v));
  } else if (key == "workers") {
    c.workers = parse_number<int>(key, value);
  } else if (key == "out_dir") {
    c.out_dir = std::string(value);
  } else if (key == "format") {
    if (value == "csv") {
      c.format = OutputFormat::Csv;
    } else if (value == "json") {
      c.format = OutputFormat::Json;
    } else {
      throw std::invalid_argument("format must be csv or json");
    }
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a64(config.to_text());
}

TrialRecord run_trial(const EnsembleSpec& spec, const TrialLayout& layout,
                      std::uint64_t master_seed, std::uint64_t trial_index) {
  auto where = [&] {
    return "trial " + std::to_string(trial_index) + " (seed " +
           std::to_string(master_seed) + ")";
  };
  Stream stream(master_seed, trial_index);
  try {
    const auto section = sample_section(spec, stream);
    const auto zeros = find_zeros(section);
    const auto diag = verify_zeroset(section, zeros);
    if (!diag.pass) throw TrialFailure(where() + ": " + diag.failure, stream.seed());
    return collect_trial(zeros, layout, stream);
  } catch (const TrialFailure&) {
    throw;
  } catch (const NumericalError& e) {
    throw TrialFailure(where() + ": " + e.what(), stream.seed());
  }
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config,
                                    std::int64_t first) {
  config.validate();
  const auto spec = config.spec();
  const auto layout = config.layout();
  const std::int64_t count = config.trials;
  std::vector<TrialRecord> records(static_cast<std::size_t>(count));

  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::int64_t failed = -1;
  std::string failure;
  std::exception_ptr other;

  auto work = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        records[static_cast<std::size_t>(i)] = run_trial(
            spec, layout, config.master_seed, static_cast<std::uint64_t>(first + i));
      } catch (const TrialFailure& e) {
        std::lock_guard lock(mu);
        if (failed < 0 || i < failed) {
          failed = i;
          failure = e.what();
        }
        stop = true;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!other) other = std::current_exception();
        stop = true;
      }
    }
  };

  const int workers = static_cast<int>(std::min<std::int64_t>(config.workers, count));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (other) std::rethrow_exception(other);
  if (failed >= 0) {
    throw TrialFailure(failure, {config.master_seed,
                                 static_cast<std::uint64_t>(first + failed)});
  }
  return records;
}

std::vector<double> isolation_mismatch(const std::vector<TrialRecord>& records) {
  std::vector<double> out;
  if (records.empty()) return out;
  const std::size_t m = records.front().pair_counts.size();
  out.assign(m, 0.0);
  for (const auto& r : records) {
    for (std::size_t t = 0; t < m; ++t) {
      if (r.pair_counts[t] != r.isolated_counts[t]) out[t] += 1.0;
    }
  }
  for (auto& v : out) v /= static_cast<double>(records.size());
  return out;
}

void write_trials_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<TrialRecord>& records) {
  out << kTrialsCsvSchema << '\n';
  out << "trial,model,k,sigma_rescaled,mark_chart,mark_re,mark_im";
  for (double a : config.thresholds) {
    for (Region r : config.regions) {
      out << ",count_a" << shortest(a) << '_' << region_name(r);
    }
  }
  out << '\n';
  const auto model = model_name(config.model);
  for (const auto& rec : records) {
    std::string counts;
    for (auto c : rec.counts) counts += ',' + std::to_string(c);
    for (std::size_t k = 0; k < rec.sigma.size(); ++k) {
      const auto& mark = rec.marks[k];
      out << rec.seed.trial_index << ',' << model << ',' << k + 1 << ','
          << format_double(rec.sigma[k]) << ',' << chart_name(mark.chart) << ','
          << format_double(mark.coord.real()) << ','
          << format_double(mark.coord.imag()) << counts << '\n';
    }
  }
}

namespace {

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 15u]; }

std::string hex64(std::uint64_t x) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = hex_digit(static_cast<unsigned>(x));
  return s;
}

constexpr double kHistogramWidth = 0.1;
constexpr int kHistogramBins = 30;

}  // namespace

std::string summary_json(const ExperimentConfig& config,
                         const AggregateOutput& output) {
  const auto& rep = output.report;
  JsonOut j;
  j.begin_object();
  j.field("version", std::string_view(output.version));
  j.field("config_hash", hex64(output.config_hash));
  j.field("model", model_name(config.model));
  j.field("trials", rep.trials);
  j.field("wall_seconds", output.wall_seconds);
  j.field("pass", rep.pass());

  j.key("ks").begin_array();
  for (const auto& e : rep.ks) {
    j.begin_object()
        .field("k", e.k)
        .field("samples", static_cast<std::int64_t>(e.samples))
        .field("statistic", e.statistic)
        .field("threshold", e.threshold)
        .field("pass", e.pass)
        .end_object();
  }
  j.end_array();

  j.key("mean_counts").begin_array();
  for (const auto& e : rep.mean_counts) {
    j.begin_object()
        .field("a", e.a)
        .field("region", region_name(e.region))
        .field("mean", e.mean)
        .field("std_error", e.std_error)
        .field("expected", e.expected)
        .field("tolerance", e.tolerance)
        .field("pass", e.pass)
        .end_object();
  }
  j.end_array();

  j.key("dispersion").begin_array();
  for (const auto& e : rep.dispersion) {
    j.begin_object()
        .field("a", e.a)
        .field("value", e.value)
        .field("low", e.low)
        .field("high", e.high)
        .field("pass", e.pass)
        .end_object();
  }
  j.end_array();

  j.key("chi_square").begin_array();
  for (const auto& e : rep.chi_square) {
    j.begin_object()
        .field("label", std::string_view(e.label))
        .field("marks", static_cast<std::int64_t>(e.marks))
        .field("statistic", e.statistic)
        .field("dof", e.dof)
        .field("threshold", e.threshold)
        .field("pass", e.pass)
        .end_object();
  }
  j.end_array();

  j.key("isolation_mismatch").begin_array();
  for (std::size_t t = 0; t < output.isolation_mismatch.size(); ++t) {
    j.begin_object()
        .field("a", config.thresholds[t])
        .field("fraction", output.isolation_mismatch[t])
        .end_object();
  }
  j.end_array();

  std::vector<std::int64_t> hist(kHistogramBins, 0);
  std::int64_t overflow = 0;
  for (const auto& r : output.records) {
    if (r.sigma.empty()) continue;
    const int b = static_cast<int>(r.sigma[0] / kHistogramWidth);
    if (b < kHistogramBins) {
      ++hist[static_cast<std::size_t>(b)];
    } else {
      ++overflow;
    }
  }
  j.key("sigma1_histogram").begin_object();
  j.field("bin_width", kHistogramWidth);
  j.key("counts").begin_array();
  for (auto c : hist) j.value(c);
  j.end_array();
  j.field("overflow", overflow);
  j.end_object();

  j.end_object();
  return j.str() + "\n";
}

AggregateOutput run_extremes(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  AggregateOutput out;
  out.config_hash = config_hash(config);
  out.records = run_trials(config);
  out.report = make_gof_report(out.records, config.spec(), config.layout());
  out.isolation_mismatch = isolation_mismatch(out.records);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.out_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    auto open = [](const fs::path& p) {
      std::ofstream f(p, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + p.string());
      return f;
    };
    out.config_path = (dir / "config.txt").string();
    out.csv_path = (dir / "trials.csv").string();
    out.summary_path = (dir / "summary.json").string();
    open(out.config_path) << config.to_text();
    {
      auto f = open(out.csv_path);
      write_trials_csv(f, config, out.records);
    }
    open(out.summary_path) << summary_json(config, out);
  }
  return out;
}

std::string run_rho(const EnsembleSpec& spec, const std::vector<cdouble>& points) {
  std::vector<SurfacePoint> pts;
  for (const auto& z : points) pts.push_back(make_point(spec, z));
  const auto r = rho_k(spec, pts);
  JsonOut j;
  j.begin_object();
  j.field("model", model_name(spec.model));
  if (spec.model == Model::GEF) {
    j.field("radius", spec.radius);
  } else {
    j.field("n", spec.degree);
  }
  j.field("k", r.k);
  j.key("points").begin_array();
  for (const auto& p : pts) {
    j.begin_object()
        .field("chart", chart_name(p.chart))
        .field("re", p.coord.real())
        .field("im", p.coord.imag())
        .end_object();
  }
  j.end_array();
  j.field("value", r.value);
  j.field("cond", r.cond);
  j.field("permanent", r.permanent);
  j.field("log_det_k", r.log_det_k);
  j.field("pi_power", r.pi_power);
  j.field("volume_product", r.volume_product);
  j.key("chart_points").begin_array();
  for (const auto& c : r.chart_points) {
    j.begin_array().value(c.real()).value(c.imag()).end_array();
  }
  j.end_array();
  j.end_object();
  return j.str() + "\n";
}

std::string run_sample(const EnsembleSpec& spec, std::uint64_t master_seed,
                       std::uint64_t trial_index, OutputFormat format) {
  Stream stream(master_seed, trial_index);
  const auto section = sample_section(spec, stream);
  const auto zs = find_zeros(section);
  if (format == OutputFormat::Csv) {
    std::string out = "chart,re,im,residual\n";
    for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
      const auto& p = zs.zeros[i];
      out += std::string(chart_name(p.chart)) + ',' + format_double(p.coord.real()) +
             ',' + format_double(p.coord.imag()) + ',' + format_double(zs.residuals[i]) +
             '\n';
    }
    return out;
  }
  JsonOut j;
  j.begin_object();
  j.field("model", model_name(spec.model));
  j.field("seed", master_seed);
  j.field("trial", trial_index);
  j.field("count", static_cast<std::int64_t>(zs.zeros.size()));
  j.key("zeros").begin_array();
  for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
    const auto& p = zs.zeros[i];
    j.begin_object()
        .field("chart", chart_name(p.chart))
        .field("re", p.coord.real())
        .field("im", p.coord.imag())
        .field("residual", zs.residuals[i])
        .end_object();
  }
  j.end_array();
  j.end_object();
  return j.str() + "\n";
}

}  // namespace gafz
