#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gafzeros/harness.hpp"

namespace gafz {

/// One measured claim. `criterion` is the acceptance item it belongs to.
struct Check {
  int criterion = 0;
  std::string claim;
  std::string target;
  std::string measured;
  bool pass = false;
};

struct SuiteInfo {
  std::string name;
  std::string description;
  std::vector<int> criteria;
};

/// Registered suites in running order. Together they cover criteria 1..16
/// once each.
const std::vector<SuiteInfo>& verify_suites();

/// Shared state for a verification session: Monte Carlo runs are cached by
/// configuration so suites that read the same experiment run it once.
class VerifyContext {
 public:
  int workers = 1;
  /// Multiplies every trial count (at least one trial is kept). 1 is the
  /// full acceptance scale; smaller values are for smoke runs only.
  double trial_scale = 1.0;
  /// Progress messages; may be null.
  std::ostream* log = nullptr;

  const std::vector<TrialRecord>& run(ExperimentConfig config);

 private:
  std::map<std::string, std::vector<TrialRecord>> cache_;
};

/// Checks of one suite. Throws std::invalid_argument for an unknown name.
std::vector<Check> run_suite(std::string_view name, VerifyContext& ctx);

/// Prints a claim / target / measured / verdict table for the suite ("all"
/// runs every suite). Returns 0 when every check passes, 1 otherwise, and 2
/// for an unknown suite name.
int run_verify(std::string_view suite, std::ostream& out, VerifyContext& ctx);

}  // namespace gafz
