#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gafzeros/harness.hpp"
#include "gafzeros/json_out.hpp"
#include "gafzeros/verify.hpp"

using namespace gafz;

namespace {

enum Exit { kPass = 0, kVerdictFailure = 1, kUsage = 2, kNumerical = 3 };

struct ModelArgs {
  std::string model = "su2";
  int n = 64;
  double radius = 6.0;
  int truncation = 0;

  void add_to(CLI::App* app) {
    app->add_option("--model", model, "su2 | torus | gef")
        ->check(CLI::IsMember({"su2", "torus", "gef"}));
    app->add_option("--n", n, "degree (su2, torus)");
    app->add_option("--radius", radius, "disk radius R (gef)");
    app->add_option("--truncation", truncation, "series truncation J (gef, 0 = default)");
  }

  EnsembleSpec spec() const {
    switch (parse_model(model)) {
      case Model::SU2:
        return EnsembleSpec::su2(n);
      case Model::TorusTheta:
        return EnsembleSpec::torus(n);
      case Model::GEF:
        return EnsembleSpec::gef(radius, truncation);
    }
    return {};
  }
};

cdouble parse_point(const std::string& s) {
  const auto comma = s.find(',');
  try {
    const double re = std::stod(s.substr(0, comma));
    double im = 0.0;
    if (comma != std::string::npos) im = std::stod(s.substr(comma + 1));
    return {re, im};
  } catch (const std::exception&) {
    throw std::invalid_argument("bad point '" + s + "', expected re,im");
  }
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

void print_report(const ExperimentConfig& config, const AggregateOutput& out) {
  const auto& rep = out.report;
  std::cout << fmt::format("{} trials of {} in {:.1f} s, config hash {:016x}\n", rep.trials,
                           model_name(config.model), out.wall_seconds, out.config_hash);
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  for (const auto& e : rep.ks) {
    std::cout << fmt::format("{} ks k={} stat={:.4f} threshold={:.4f} samples={}\n",
                             verdict(e.pass), e.k, e.statistic, e.threshold, e.samples);
  }
  for (const auto& e : rep.mean_counts) {
    std::cout << fmt::format("{} mean N(a={:g}, {}) = {:.5f} +- {:.5f}, expected {:.5f} +- {:.5f}\n",
                             verdict(e.pass), e.a, region_name(e.region), e.mean, e.std_error,
                             e.expected, e.tolerance);
  }
  for (const auto& e : rep.dispersion) {
    std::cout << fmt::format("{} dispersion a={:g} value={:.4f} range=[{:g}, {:g}]\n",
                             verdict(e.pass), e.a, e.value, e.low, e.high);
  }
  for (const auto& e : rep.chi_square) {
    std::cout << fmt::format("{} chi-square {} stat={:.3f} dof={} threshold={:.4f} marks={}\n",
                             verdict(e.pass), e.label, e.statistic, e.dof, e.threshold, e.marks);
  }
  for (std::size_t t = 0; t < out.isolation_mismatch.size(); ++t) {
    std::cout << fmt::format("isolation mismatch a={:g}: {:.5f}\n", config.thresholds[t],
                             out.isolation_mismatch[t]);
  }
  if (!out.summary_path.empty()) std::cout << "wrote " << out.summary_path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeros of Gaussian analytic functions: sampling, near-pair statistics, "
               "correlation functions"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "zeros of one sampled section");
  ModelArgs sample_model;
  sample_model.add_to(sample);
  std::uint64_t sample_seed = 1, sample_trial = 0;
  std::string sample_format = "csv";
  sample->add_option("--seed", sample_seed, "master seed");
  sample->add_option("--trial", sample_trial, "trial index");
  sample->add_option("--format", sample_format)->check(CLI::IsMember({"csv", "json"}));

  // extremes
  auto* extremes = app.add_subcommand("extremes", "near-pair experiment");
  std::string config_file;
  std::string ex_model, ex_out_dir, ex_format;
  std::string ex_n, ex_radius, ex_trials, ex_seed, ex_kmax, ex_workers;
  std::vector<std::string> ex_a, ex_region;
  extremes->add_option("--config", config_file, "key=value config file");
  extremes->add_option("--model", ex_model, "su2 | torus | gef");
  extremes->add_option("--n", ex_n, "degree");
  extremes->add_option("--radius", ex_radius, "GEF disk radius");
  extremes->add_option("--trials", ex_trials, "number of trials");
  extremes->add_option("--seed", ex_seed, "master seed");
  extremes->add_option("--a", ex_a, "threshold a (repeatable)");
  extremes->add_option("--kmax", ex_kmax, "number of smallest distances per trial");
  extremes->add_option("--region", ex_region,
                       "whole | hemisphere | torus-half | disk-sector (repeatable)");
  extremes->add_option("--workers", ex_workers, "worker threads");
  extremes->add_option("--out-dir", ex_out_dir, "directory for config.txt, trials.csv, summary.json");
  extremes->add_option("--format", ex_format, "stdout format: csv (table) or json (summary)")
      ->check(CLI::IsMember({"csv", "json"}));

  // rho
  auto* rho = app.add_subcommand("rho", "Kac-Rice correlation at given points");
  ModelArgs rho_model;
  rho_model.add_to(rho);
  std::vector<std::string> rho_points;
  rho->add_option("--point", rho_points, "chart point re,im (repeatable, k = count)")
      ->required();
  std::string rho_format = "json";
  rho->add_option("--format", rho_format)->check(CLI::IsMember({"csv", "json"}));

  // verify
  auto* verify = app.add_subcommand("verify", "run a named acceptance suite");
  std::string suite = "all";
  int verify_workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double trial_scale = 1.0;
  verify->add_option("suite", suite, "suite name or 'all'");
  verify->add_option("--workers", verify_workers, "worker threads");
  verify->add_option("--trial-scale", trial_scale,
                     "multiply trial counts (smoke runs only; verdicts need 1)");
  verify->add_flag_callback(
      "--list",
      [] {
        for (const auto& s : verify_suites()) std::cout << s.name << ": " << s.description << '\n';
        std::exit(kPass);
      },
      "list suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sample) {
      const auto fmt_out = sample_format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
      std::cout << run_sample(sample_model.spec(), sample_seed, sample_trial, fmt_out);
      return kPass;
    }

    if (*extremes) {
      ExperimentConfig config;
      if (!config_file.empty()) {
        std::ifstream f(config_file);
        if (!f) throw std::invalid_argument("cannot read config file " + config_file);
        std::ostringstream os;
        os << f.rdbuf();
        config = parse_config(os.str());
      }
      auto set = [&](const char* key, const std::string& v, CLI::Option* opt) {
        if (opt->count() > 0) set_config_value(config, key, v);
      };
      set("model", ex_model, extremes->get_option("--model"));
      set("n", ex_n, extremes->get_option("--n"));
      set("radius", ex_radius, extremes->get_option("--radius"));
      set("trials", ex_trials, extremes->get_option("--trials"));
      set("seed", ex_seed, extremes->get_option("--seed"));
      set("a", join(ex_a), extremes->get_option("--a"));
      set("kmax", ex_kmax, extremes->get_option("--kmax"));
      set("region", join(ex_region), extremes->get_option("--region"));
      set("workers", ex_workers, extremes->get_option("--workers"));
      set("out_dir", ex_out_dir, extremes->get_option("--out-dir"));
      set("format", ex_format, extremes->get_option("--format"));
      config.validate();
      const auto out = run_extremes(config);
      if (config.format == OutputFormat::Json) {
        std::cout << summary_json(config, out);
      } else {
        print_report(config, out);
      }
      return out.report.pass() ? kPass : kVerdictFailure;
    }

    if (*rho) {
      std::vector<cdouble> pts;
      for (const auto& p : rho_points) pts.push_back(parse_point(p));
      const auto spec = rho_model.spec();
      if (rho_format == "json") {
        // Errors are reported as a JSON record as well, with the exit code.
        auto error_record = [](const char* kind, const char* what, int code) {
          JsonOut j;
          j.begin_object().field("error", kind).field("message", what).field("exit_code", code);
          std::cout << j.end_object().str() << '\n';
          return code;
        };
        try {
          std::cout << run_rho(spec, pts);
        } catch (const NumericalError& e) {
          return error_record("numerical", e.what(), kNumerical);
        } catch (const std::invalid_argument& e) {
          return error_record("invalid_argument", e.what(), kUsage);
        }
      } else {
        std::vector<SurfacePoint> sp;
        for (const auto& z : pts) sp.push_back(make_point(spec, z));
        const auto r = rho_k(spec, sp);
        std::cout << "k,value,cond,permanent,log_det_k\n"
                  << r.k << ',' << format_double(r.value) << ',' << format_double(r.cond) << ','
                  << format_double(r.permanent) << ',' << format_double(r.log_det_k) << '\n';
      }
      return kPass;
    }

    if (*verify) {
      VerifyContext ctx;
      ctx.workers = verify_workers;
      ctx.trial_scale = trial_scale;
      ctx.log = &std::cerr;
      return run_verify(suite, std::cout, ctx);
    }
  } catch (const TrialFailure& e) {
    std::cerr << "error: " << e.what() << "\nreplay with --seed " << e.seed().master_seed
              << " (trial index " << e.seed().trial_index << ")\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
