#include "apcf/log_sums.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <vector>

namespace apcf {

namespace {

constexpr mpfr_prec_t kPrec = 160;
constexpr Index kAsymptoticStart = 65536;

class Mp {
 public:
  Mp() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
  explicit Mp(long double x) : Mp() { mpfr_set_ld(v_, x, MPFR_RNDN); }
  Mp(const Mp& o) : Mp() { mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mp& operator=(const Mp& o) { mpfr_set(v_, o.v_, MPFR_RNDN); return *this; }
  ~Mp() { mpfr_clear(v_); }

  static Mp from_index(Index n, double offset = 0.0) {
    Mp r;
    mpfr_set_ui(r.v_, static_cast<unsigned long>(n), MPFR_RNDN);
    mpfr_add_d(r.v_, r.v_, offset, MPFR_RNDN);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  long double ld() const { return mpfr_get_ld(v_, MPFR_RNDN); }

  Mp& operator+=(const Mp& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Mp& operator-=(const Mp& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Mp& operator*=(const Mp& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Mp& operator/=(const Mp& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  friend Mp operator+(Mp a, const Mp& b) { return a += b; }
  friend Mp operator-(Mp a, const Mp& b) { return a -= b; }
  friend Mp operator*(Mp a, const Mp& b) { return a *= b; }
  friend Mp operator/(Mp a, const Mp& b) { return a /= b; }

 private:
  mpfr_t v_;
};

Mp lngamma(const Mp& x) {
  Mp r;
  mpfr_lngamma(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Mp digamma(const Mp& x) {
  Mp r;
  mpfr_digamma(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Mp pow_si(const Mp& x, long e) {
  Mp r;
  mpfr_pow_si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}

Mp log2_times(Index count) {
  Mp r;
  mpfr_const_log2(r.get(), MPFR_RNDN);
  return r * Mp::from_index(count);
}

// Hurwitz zeta(s, x) for integer s >= 2 and x >= 2^16 by Euler-Maclaurin.
Mp hurwitz_zeta(unsigned s, const Mp& x) {
  static const long double kB2j[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730};
  Mp r = pow_si(x, 1 - static_cast<long>(s)) / Mp(static_cast<long double>(s - 1));
  r += pow_si(x, -static_cast<long>(s)) / Mp(2.0L);
  Mp rising(static_cast<long double>(s));  // (s)_{2j-1}
  Mp fact(2.0L);                           // (2j)!
  for (int j = 1; j <= 6; ++j) {
    Mp term = Mp(kB2j[j - 1]) * rising / fact * pow_si(x, -static_cast<long>(s) - 2 * j + 1);
    r += term;
    rising *= Mp(static_cast<long double>(s + 2 * j - 1)) * Mp(static_cast<long double>(s + 2 * j));
    fact *= Mp(static_cast<long double>((2 * j + 1) * (2 * j + 2)));
  }
  return r;
}

// sum_{i=a}^{b} log(2i+1) in MPFR.
Mp mp_sum_log_odd(Index a, Index b) {
  return log2_times(b - a + 1) + lngamma(Mp::from_index(b, 1.5)) - lngamma(Mp::from_index(a, 0.5));
}

template <class Term>
LogSum direct_sum(Index a, Index b, Term term) {
  CompensatedSum acc;
  long double magnitude = 0;
  for (Index i = a; i <= b; ++i) {
    long double v = term(i);
    acc.add(v);
    magnitude += std::fabs(v);
  }
  return {acc.value(), 4 * LDBL_EPSILON * magnitude};
}

// Taylor coefficients l_1..l_K of log Q(u), Q(u) = (1 - (1-u)^t) / (t u).
std::vector<Mp> log_q_coefficients(unsigned t, unsigned K) {
  std::vector<Mp> q(K + 1);
  // q_j = (-1)^j C(t, j+1) / t
  Mp binom(static_cast<long double>(t));  // C(t, 1)
  for (unsigned j = 0; j <= K && j < t; ++j) {
    Mp v = binom / Mp(static_cast<long double>(t));
    if (j % 2 == 1) mpfr_neg(v.get(), v.get(), MPFR_RNDN);
    q[j] = v;
    binom *= Mp(static_cast<long double>(t - j - 1));
    binom /= Mp(static_cast<long double>(j + 2));
  }
  std::vector<Mp> l(K + 1);
  for (unsigned k = 1; k <= K; ++k) {
    Mp acc = Mp(static_cast<long double>(k)) * q[k];
    for (unsigned j = 1; j < k; ++j) acc -= Mp(static_cast<long double>(j)) * l[j] * q[k - j];
    l[k] = acc / Mp(static_cast<long double>(k));
  }
  return l;
}

}  // namespace

void CompensatedSum::add(long double x) {
  long double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

long double log_window_size(Index i, unsigned t) {
  const long double odd = 2.0L * static_cast<long double>(i) + 1.0L;
  const long double lo = std::log(odd);
  // (2i+1)^t (1 - (1 - 1/(2i+1))^t)
  return t * lo + std::log(-std::expm1(t * std::log1p(-1.0L / odd)));
}

LogSum sum_log_odd(Index a, Index b) {
  if (b < a) return {};
  if (b - a < kDirectSumLimit)
    return direct_sum(a, b, [](Index i) { return std::log(2.0L * static_cast<long double>(i) + 1.0L); });
  long double v = mp_sum_log_odd(a, b).ld();
  return {v, 2 * LDBL_EPSILON * std::fabs(v)};
}

LogSum sum_log_even(Index a, Index b) {
  if (b < a) return {};
  if (a < 1) throw Error(ErrorCode::ParameterOutOfRange, "log(2i) needs i >= 1");
  if (b - a < kDirectSumLimit)
    return direct_sum(a, b, [](Index i) { return std::log(2.0L * static_cast<long double>(i)); });
  Mp r = log2_times(b - a + 1) + lngamma(Mp::from_index(b, 1.0)) - lngamma(Mp::from_index(a, 0.0));
  long double v = r.ld();
  return {v, 2 * LDBL_EPSILON * std::fabs(v)};
}

LogSum sum_log_window(Index a, Index b, unsigned t) {
  if (t < 2 || t > 10000) throw Error(ErrorCode::ParameterOutOfRange, "t must lie in [2, 10000]");
  if (b < a) return {};
  auto term = [t](Index i) { return log_window_size(i, t); };
  if (b - a < kDirectSumLimit) return direct_sum(a, b, term);

  // Nearest zero of Q sits at distance rho = 2 sin(pi/t) from the origin.
  const long double rho = 2.0L * std::sin(3.14159265358979323846264338327950288L / t);
  const Index series_start = std::max<Index>(kAsymptoticStart, static_cast<Index>(std::ceil(2.0L / rho)));
  const Index a0 = std::max(a, series_start);
  LogSum head = a0 > a ? direct_sum(a, a0 - 1, term) : LogSum{};
  if (a0 > b) return head;

  const Index count = b - a0 + 1;
  const long double umax = 1.0L / (2.0L * static_cast<long double>(a0) + 1.0L);
  const long double r = umax / rho;
  unsigned K = 1;
  long double remainder = 0;
  for (;; ++K) {
    remainder = static_cast<long double>(count) * (t - 1) / (K + 1) * std::pow(r, K + 1) / (1 - r);
    if (remainder < 1e-30L || K >= 80) break;
  }

  // (t-1) sum log(2i+1) + count log t + sum_k l_k sum_i (2i+1)^{-k}
  Mp total = mp_sum_log_odd(a0, b) * Mp(static_cast<long double>(t - 1));
  Mp logt;
  mpfr_log_ui(logt.get(), t, MPFR_RNDN);
  total += logt * Mp::from_index(count);

  const std::vector<Mp> l = log_q_coefficients(t, K);
  const Mp lo = Mp::from_index(a0, 0.5), hi = Mp::from_index(b, 1.5);
  Mp z1 = (digamma(hi) - digamma(lo)) / Mp(2.0L);
  total += l[1] * z1;
  Mp scale(0.5L);
  for (unsigned k = 2; k <= K; ++k) {
    scale /= Mp(2.0L);
    Mp zk = (hurwitz_zeta(k, lo) - hurwitz_zeta(k, hi)) * scale;
    total += l[k] * zk;
  }
  long double tail = total.ld();
  return {head.value + tail, head.error + remainder + 2 * LDBL_EPSILON * std::fabs(tail)};
}

}  // namespace apcf
