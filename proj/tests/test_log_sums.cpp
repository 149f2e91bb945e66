#include <doctest.h>

#include <cmath>

#include "apcf/log_sums.hpp"
#include "oracles.hpp"

using namespace apcf;

namespace {

long double plain_sum_log_window(Index a, Index b, unsigned t) {
  long double s = 0, c = 0;  // Kahan
  for (Index i = a; i <= b; ++i) {
    long double y = oracle::plain_log_window(i, t) - c;
    long double u = s + y;
    c = (u - s) - y;
    s = u;
  }
  return s;
}

}  // namespace

TEST_CASE("window sizes") {
  for (unsigned t : {2u, 3u, 10u}) {
    for (Index i : {Index{1}, Index{2}, Index{17}, Index{1000}}) {
      BigInt w = oracle::ipow(BigInt(2 * i + 1), t) - oracle::ipow(BigInt(2 * i), t);
      CHECK(std::fabs(log_window_size(i, t) - log_abs(w)) < 1e-12L);
    }
  }
  CHECK(std::fabs(log_window_size(1, 2) - std::log(5.0L)) < 1e-15L);
}

TEST_CASE("short ranges match plain summation") {
  CHECK(sum_log_odd(5, 4).value == 0);
  CHECK(sum_log_window(7, 3, 2).value == 0);
  LogSum odd = sum_log_odd(1, 1000);
  CHECK(std::fabs(odd.value - oracle::plain_sum_log_odd(1, 1000)) < 1e-12L);
  CHECK(odd.error >= 0);
  long double even = 0;
  for (Index i = 3; i <= 500; ++i) even += std::log(2.0L * i);
  CHECK(std::fabs(sum_log_even(3, 500).value - even) < 1e-12L);
  for (unsigned t : {2u, 3u, 7u}) CHECK(std::fabs(sum_log_window(1, 3000, t).value - plain_sum_log_window(1, 3000, t)) < 1e-11L);
}

TEST_CASE("long ranges match plain summation") {
  // Beyond the direct-summation limit the asymptotic expansion takes over.
  const Index b = 3000000;
  REQUIRE(b > kDirectSumLimit);
  for (unsigned t : {2u, 3u, 10u}) {
    LogSum s = sum_log_window(1, b, t);
    long double want = plain_sum_log_window(1, b, t);
    CHECK(std::fabs(s.value - want) < 1e-8L);
    CHECK(s.error < 1e-9L);
  }
  LogSum mid = sum_log_window(70000, 70000 + 2 * kDirectSumLimit, 3);
  CHECK(std::fabs(mid.value - plain_sum_log_window(70000, 70000 + 2 * kDirectSumLimit, 3)) < 1e-8L);
  CHECK(std::fabs(sum_log_odd(1, b).value - oracle::plain_sum_log_odd(1, b)) < 1e-8L);
}

TEST_CASE("huge ranges against log-gamma") {
  // sum_{i=a}^{b} log(2i+1) = (b-a+1) log 2 + lgamma(b + 3/2) - lgamma(a + 1/2)
  const Index a = 1000, b = Index{1} << 40;
  LogSum s = sum_log_odd(a, b);
  long double want = (b - a + 1) * std::log(2.0L) + std::lgamma(b + 1.5L) - std::lgamma(a + 0.5L);
  CHECK(std::fabs(s.value - want) / want < 1e-15L);

  // For t = 2 the window is 4i+1, so the sum is (b-a+1) log 4 + lgamma(b + 5/4) - lgamma(a + 1/4).
  LogSum w = sum_log_window(a, b, 2);
  long double want_w = (b - a + 1) * std::log(4.0L) + std::lgamma(b + 1.25L) - std::lgamma(a + 0.25L);
  CHECK(std::fabs(w.value - want_w) / want_w < 1e-15L);
}

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(sum_log_window(1, 10, 1), Error);
  CHECK_THROWS_AS(sum_log_window(1, 10, 10001), Error);
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1.0L);
  for (int i = 0; i < 1000000; ++i) s.add(1e-20L);
  s.add(-1.0L);
  CHECK(std::fabs(s.value() - 1e-14L) < 1e-20L);
}
