#pragma once

// Property suites shared by the acceptance binary and `apcf verify`.

#include <cstdint>
#include <string>
#include <vector>

namespace apcf {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
};

CheckResult check_cf_oracle(const SuiteOptions& opt);        // round trips and qn bounds
CheckResult check_measure(const SuiteOptions& opt);          // normalisation and compatibility
CheckResult check_lambda_in_J(const SuiteOptions& opt);      // strict increase and block boundaries
CheckResult check_series(const SuiteOptions& opt);           // AP-sum and descending-sum grids
CheckResult check_local_dimension(const SuiteOptions& opt);  // ratio >= min(A_k, B_k)
CheckResult check_closed_forms(const SuiteOptions& opt);     // dimension formulas and scans
CheckResult check_bracketing(const SuiteOptions& opt);       // lower trend against upper scan
CheckResult check_neighbors(const SuiteOptions& opt);        // at most 4 cylinders per ball

// Suite names: qn-bounds, measure, series, certificates, lambda, ratio,
// bracket, neighbors, all. Throws Error(ValidationError) on unknown names.
std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& opt = {});

const std::vector<std::string>& suite_names();

}  // namespace apcf
