#pragma once

// Long logarithmic sums over index ranges that can hold up to 2^62 terms.
// Short ranges are summed term by term; long ranges go through log-gamma,
// digamma and Hurwitz-zeta evaluations in 160-bit MPFR arithmetic.

#include "apcf/cf_core.hpp"

namespace apcf {

struct LogSum {
  long double value = 0;
  long double error = 0;  // absolute bound
};

// Ranges up to this many terms are summed directly.
inline constexpr Index kDirectSumLimit = Index{1} << 20;

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(long double x);
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

// log((2i+1)^t - (2i)^t), evaluated without cancellation.
long double log_window_size(Index i, unsigned t);

// sum_{i=a}^{b} log(2i+1); zero for an empty range.
LogSum sum_log_odd(Index a, Index b);

// sum_{i=a}^{b} log(2i).
LogSum sum_log_even(Index a, Index b);

// sum_{i=a}^{b} log((2i+1)^t - (2i)^t), t in [2, 10000].
LogSum sum_log_window(Index a, Index b, unsigned t);

}  // namespace apcf
