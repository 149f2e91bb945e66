#include "apcf/covering_bounds.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "apcf/log_sums.hpp"

namespace apcf {

namespace {

void check_s(long double s) {
  if (!(s > 0 && s <= 0.5L)) throw Error(ErrorCode::ParameterOutOfRange, "s must lie in (0, 1/2]");
}

void check_s(const Rational& s) {
  if (s <= 0 || s > Rational(1, 2)) throw Error(ErrorCode::ParameterOutOfRange, "s must lie in (0, 1/2]");
}

long double ld(const Rational& x) { return to_long_double(x.get_num()) / to_long_double(x.get_den()); }

BigInt big(Index n) { return BigInt(static_cast<unsigned long>(n)); }

// sum_{a >= c} a^{-gamma}: truncated at T plus the integral tail.
SeriesEstimate single_sum(Index c, long double gamma, Index T) {
  CompensatedSum acc;
  for (Index a = c; a <= T; ++a) acc.add(std::pow(static_cast<long double>(a), -gamma));
  SeriesEstimate e;
  e.lower = acc.value();
  e.upper = e.lower * (1 + 8 * LDBL_EPSILON) +
            std::pow(static_cast<long double>(std::max(T, c - 1)), 1 - gamma) / (gamma - 1);
  e.terms_used = T >= c ? T - c + 1 : 0;
  return e;
}

}  // namespace

Index usable_horizon(const SequenceSpec& spec, Index horizon) {
  Index h = horizon;
  if (auto size = spec.table_size()) {
    Index cap = spec.kind() == SeqKind::Sigma ? *size - 1 : *size;
    h = std::min(h, cap);
    if (h < 10) throw Error(ErrorCode::ParameterOutOfRange, "table too short for a certificate scan");
  } else if (h < 100) {
    throw Error(ErrorCode::ParameterOutOfRange, "certificate horizon must be >= 100");
  }
  return h;
}

SeriesBound ap_series_bound(Index a, unsigned ell, long double s, Index trunc) {
  check_s(s);
  if (a < 1) throw Error(ErrorCode::ParameterOutOfRange, "a must be >= 1");
  const long double e = 2 * s * ell;
  if (!(e > 1)) throw Error(ErrorCode::ParameterOutOfRange, "need 2 s ell > 1");
  if (trunc < 10) throw Error(ErrorCode::ParameterOutOfRange, "trunc must be >= 10");
  const long double fa = static_cast<long double>(a);
  CompensatedSum acc;
  for (Index M = 1; M <= trunc; ++M) {
    long double logs = 0;
    for (unsigned i = 0; i <= ell; ++i) logs += std::log(fa + static_cast<long double>(i) * static_cast<long double>(M));
    acc.add(std::exp(-2 * s * logs));
  }
  SeriesBound out;
  out.estimate.lower = acc.value();
  out.estimate.terms_used = trunc;
  // (a + iM) >= iM for i >= 1, so the tail is at most a^{-2s} (ell!)^{-2s} sum_{M > T} M^{-2s ell}.
  const long double log_fact = std::lgamma(static_cast<long double>(ell) + 1);
  const long double tail = std::exp(-2 * s * (std::log(fa) + log_fact)) *
                           std::pow(static_cast<long double>(trunc), 1 - e) / (e - 1);
  out.estimate.upper = out.estimate.lower * (1 + 16 * LDBL_EPSILON * ell) + tail;
  out.rhs = std::pow(fa, 1 - e) * e / (e - 1);
  out.holds = out.estimate.upper <= out.rhs;
  return out;
}

SeriesBound descend_sum_bound(Index c, unsigned n, long double s, long double gamma, Index trunc) {
  check_s(s);
  if (c < 2 || n < 2) throw Error(ErrorCode::ParameterOutOfRange, "need c >= 2 and n >= 2");
  const long double g_min = 2 - (n - 1) * (2 * s - 1);
  if (gamma < g_min - 1e-12L)
    throw Error(ErrorCode::ParameterOutOfRange, "gamma below 2 - (n-1)(2s-1)");
  const Index T = std::max(trunc, c);
  const std::size_t width = T - c + 1;
  // e_j = gamma + (n-j)(2s-1): decay exponent of everything from position j on.
  auto e_of = [&](unsigned j) { return gamma + static_cast<long double>(n - j) * (2 * s - 1); };
  std::vector<long double> w(width), up(width), lo(width);
  for (std::size_t i = 0; i < width; ++i) {
    const long double a = static_cast<long double>(c + i);
    w[i] = std::pow(a, -2 * s);
    up[i] = lo[i] = std::pow(a, -gamma);
  }
  const long double fT = static_cast<long double>(T);
  long double K = 1;  // K_{j+1}
  for (unsigned j = n - 1; j >= 1; --j) {
    const long double e_next = e_of(j + 1);
    const long double tail = K * std::pow(fT, 1 - e_next) / (e_next - 1);
    long double su = 0, sl = 0;
    for (std::size_t i = width; i-- > 0;) {
      const long double nu = up[i], nl = lo[i];
      up[i] = w[i] * (su + tail);
      lo[i] = w[i] * sl;
      su += nu;
      sl += nl;
    }
    K /= (e_next - 1);
  }
  CompensatedSum su, sl;
  for (std::size_t i = 0; i < width; ++i) {
    su.add(up[i]);
    sl.add(lo[i]);
  }
  const long double e1 = e_of(1);
  SeriesBound out;
  out.estimate.lower = sl.value();
  out.estimate.upper = su.value() * (1 + 8 * LDBL_EPSILON * n * std::log2(static_cast<long double>(width) + 1)) +
                       K * std::pow(fT, 1 - e1) / (e1 - 1);
  out.estimate.terms_used = width;
  out.rhs = std::pow(static_cast<long double>(c - 1), -(gamma + n * (2 * s - 1) - 2 * s));
  out.holds = out.estimate.upper <= out.rhs;
  return out;
}

long double descend_bruteforce(Index c, unsigned n, long double s, long double gamma, Index T) {
  if (n < 1 || n > 4) throw Error(ErrorCode::ParameterOutOfRange, "brute force handles n <= 4");
  std::vector<long double> pw(T + 1), gw(T + 1);
  for (Index a = 1; a <= T; ++a) {
    pw[a] = std::pow(static_cast<long double>(a), -2 * s);
    gw[a] = std::pow(static_cast<long double>(a), -gamma);
  }
  auto p = [&](Index a) { return pw[a]; };
  auto g = [&](Index a) { return gw[a]; };
  CompensatedSum acc;
  for (Index a1 = c; a1 <= T; ++a1) {
    if (n == 1) { acc.add(g(a1)); continue; }
    for (Index a2 = a1 + 1; a2 <= T; ++a2) {
      if (n == 2) { acc.add(p(a1) * g(a2)); continue; }
      for (Index a3 = a2 + 1; a3 <= T; ++a3) {
        if (n == 3) { acc.add(p(a1) * p(a2) * g(a3)); continue; }
        for (Index a4 = a3 + 1; a4 <= T; ++a4) acc.add(p(a1) * p(a2) * p(a3) * g(a4));
      }
    }
  }
  return acc.value();
}

namespace {

struct Fraction {
  BigInt num, den;
  explicit Fraction(const Rational& r) : num(r.get_num()), den(r.get_den()) {}
};

// q f * lhs_F(n) >= q f * max(delta n, 2)
bool f_inequality(const BigInt& nu, Index n, const Fraction& s, const Fraction& d) {
  BigInt lhs = d.den * (2 * s.num * (nu - 1) + (2 * s.num - s.den) * (big(n) - 1) - 2 * s.den);
  BigInt dn = d.num * big(n), two = 2 * d.den;
  return lhs >= s.den * (dn > two ? dn : two);
}

// q f * ((2s-1) gap + n - 2) >= q f * delta
bool g_inequality(const BigInt& gap, Index n, const Fraction& s, const Fraction& d) {
  BigInt lhs = d.den * ((2 * s.num - s.den) * gap + s.den * (big(n) - 2));
  return lhs >= s.den * d.num;
}

Index one_over_floor_plus_one(const Rational& delta) {
  BigInt q = delta.get_den() / delta.get_num();
  return static_cast<Index>(q.get_ui()) + 1;
}

std::vector<long double> f_lhs(const SequenceSpec& nu, long double s, Index h) {
  std::vector<long double> lhs(h + 1, 0);
  for (Index n = 1; n <= h; ++n) {
    long double v = to_long_double(nu.at(n));
    lhs[n] = 2 * s * (v - 1) + (2 * s - 1) * (static_cast<long double>(n) - 1) - 2;
  }
  return lhs;
}

// N(delta) from the floating scan; h + 1 when infeasible.
Index f_threshold_float(const std::vector<long double>& lhs, long double delta, Index h) {
  Index last_fail = 0;
  for (Index n = h; n >= 1; --n) {
    if (lhs[n] < std::max(delta * static_cast<long double>(n), 2.0L)) {
      last_fail = n;
      break;
    }
  }
  Index by_delta = static_cast<Index>(std::floor(1.0L / delta)) + 1;
  return std::max(last_fail + 1, by_delta);
}

Rational dyadic_floor(long double x, int bits = 24) {
  long double scaled = std::floor(std::ldexp(x, bits));
  BigInt num(static_cast<unsigned long>(scaled));
  return make_rational(num, BigInt(1) << bits);
}

}  // namespace

std::optional<Index> minimal_threshold_F(const SequenceSpec& nu, const Rational& s, const Rational& delta, Index horizon) {
  if (delta <= 0) throw Error(ErrorCode::ParameterOutOfRange, "delta must be positive");
  const Fraction fs(s), fd(delta);
  Index last_fail = 0;
  for (Index n = horizon; n >= 1; --n) {
    if (!f_inequality(nu.at(n), n, fs, fd)) {
      last_fail = n;
      break;
    }
  }
  Index N = std::max(last_fail + 1, one_over_floor_plus_one(delta));
  if (N > horizon) return std::nullopt;
  return N;
}

std::optional<Index> minimal_threshold_G(const SequenceSpec& sigma, const Rational& s, const Rational& delta, Index horizon) {
  const Fraction fs(s), fd(delta);
  BigInt sn_min = (2 * fs.den + fs.num - 1) / fs.num;  // ceil(2/s)
  Index last_fail = 0;
  BigInt next = sigma.at(horizon + 1);
  for (Index n = horizon; n >= 1; --n) {
    BigInt cur = sigma.at(n);
    BigInt gap = next - cur;
    if (gap < big(n))
      throw Error(ErrorCode::SpecConstraintViolated,
                  "sigma(" + std::to_string(n + 1) + ") - sigma(" + std::to_string(n) + ") < " + std::to_string(n));
    if (last_fail == 0 && !g_inequality(gap, n, fs, fd)) last_fail = n;
    next = std::move(cur);
  }
  BigInt N = big(last_fail + 1);
  if (sn_min > N) N = sn_min;
  if (N > big(horizon)) return std::nullopt;
  return static_cast<Index>(N.get_ui());
}

Certificate f_certificate(const SequenceSpec& nu, const Rational& s, Index horizon) {
  check_s(s);
  const Index h = usable_horizon(nu, horizon);
  const long double sf = ld(s);
  const std::vector<long double> lhs = f_lhs(nu, sf, h);
  const Index half = h / 2;
  const long double slope = (lhs[h] - lhs[half]) / static_cast<long double>(h - half);
  if (!(slope > 0))
    throw Error(ErrorCode::NoCertificate, "slack does not grow with n at s = " + to_string(s));
  const long double delta_max = std::min(slope, 1.0L);

  auto feasible = [&](long double delta, Index& N) {
    N = f_threshold_float(lhs, delta, h);
    if (N > h) return false;
    const long double end = lhs[h] - std::max(delta * h, 2.0L);
    const long double mid = lhs[half] - std::max(delta * half, 2.0L);
    return end > mid;
  };
  // First choice: half the slope, rounded to two significant digits.
  Rational delta;
  std::optional<Index> N;
  {
    const long double target = delta_max / 2;
    const int e = static_cast<int>(std::floor(std::log10(target))) - 1;
    BigInt mant(static_cast<long>(std::lround(target / std::pow(10.0L, e))));
    BigInt ten_e;
    mpz_ui_pow_ui(ten_e.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(e)));
    Rational cand = e >= 0 ? Rational(mant * ten_e) : make_rational(mant, ten_e);
    Index n_float;
    if (cand > 0 && feasible(ld(cand), n_float)) {
      N = minimal_threshold_F(nu, s, cand, h);
      if (N) delta = cand;
    }
  }
  if (!N) {
    // Geometric grid, then a linear refinement around the best point.
    std::vector<long double> grid;
    for (int i = 0; i < 64; ++i) grid.push_back(delta_max * std::pow(1e-4L, (64.0L - i) / 64.0L));
    Index best_N = h + 1;
    long double best_delta = 0;
    int best_i = -1;
    for (int i = 0; i < 64; ++i) {
      Index n_at;
      if (feasible(grid[i], n_at) && n_at <= best_N) {
        best_N = n_at;
        best_delta = grid[i];
        best_i = i;
      }
    }
    if (best_i < 0) throw Error(ErrorCode::NoCertificate, "no delta satisfies the inequality up to the horizon");
    const long double lo = best_i > 0 ? grid[best_i - 1] : grid[0] / 2;
    const long double hi = best_i < 63 ? grid[best_i + 1] : delta_max * (1 - 1e-9L);
    for (int i = 0; i <= 64; ++i) {
      const long double d = lo + (hi - lo) * i / 64.0L;
      Index n_at;
      if (d > 0 && feasible(d, n_at) && n_at <= best_N) {
        best_N = n_at;
        best_delta = d;
      }
    }
    // Exact confirmation with a dyadic delta.
    delta = dyadic_floor(best_delta);
    N = delta > 0 ? minimal_threshold_F(nu, s, delta, h) : std::nullopt;
    if (!N) throw Error(ErrorCode::NoCertificate, "exact check rejected the floating witness");
  }

  Certificate cert;
  cert.family = Family::F;
  cert.s = s;
  cert.delta = delta;
  cert.threshold = *N;
  cert.checked_horizon = h;
  const long double df = ld(delta);
  cert.slack_half = lhs[half] - std::max(df * half, 2.0L);
  cert.slack_end = lhs[h] - std::max(df * h, 2.0L);
  cert.accepted = cert.slack_end > cert.slack_half;
  if (!cert.accepted) throw Error(ErrorCode::NoCertificate, "slack is not increasing at the horizon");
  cert.tail_bound = 2 * std::exp2(-df * static_cast<long double>(*N)) / (1 - std::exp2(-df));
  return cert;
}

Certificate g_certificate(const SequenceSpec& sigma, const Rational& s, Index horizon, std::size_t audit_stages,
                          Index trunc) {
  check_s(s);
  const Index h = usable_horizon(sigma, horizon);
  const Rational delta(1);
  auto n0 = minimal_threshold_G(sigma, s, delta, h);
  if (!n0) throw Error(ErrorCode::NoCertificate, "no n_0 up to the horizon at s = " + to_string(s));
  const long double sf = ld(s);
  auto slack = [&](Index n) {
    long double gap = to_long_double(sigma.at(n + 1) - sigma.at(n));
    return (2 * sf - 1) * gap + static_cast<long double>(n) - 2 - 1;
  };
  Certificate cert;
  cert.family = Family::G;
  cert.s = s;
  cert.delta = delta;
  cert.threshold = *n0;
  cert.checked_horizon = h;
  cert.slack_half = slack(h / 2);
  cert.slack_end = slack(h);
  if (!(cert.slack_end > cert.slack_half)) throw Error(ErrorCode::NoCertificate, "slack is not increasing at the horizon");
  if (audit_stages > 0) {
    const Index last = std::min<Index>(*n0 + audit_stages - 1, h);
    cert.audit = h_recursion_stages(sigma, sf, *n0, last - *n0, trunc);
    for (const auto& st : cert.audit)
      if (!st.ok) throw Error(ErrorCode::NoCertificate, "stage factor above 1 at n = " + std::to_string(st.n));
  }
  cert.accepted = true;
  return cert;
}

std::vector<StageReport> h_recursion_stages(const SequenceSpec& sigma, long double s, Index j, std::size_t stages,
                                            Index trunc) {
  check_s(s);
  if (j < 1) throw Error(ErrorCode::ParameterOutOfRange, "j must be >= 1");
  std::vector<StageReport> out;
  for (Index n = j; n <= j + stages; ++n) {
    StageReport r;
    r.n = n;
    BigInt gap = sigma.at(n + 1) - sigma.at(n);
    if (gap < big(n))
      throw Error(ErrorCode::SpecConstraintViolated, "sigma gap below n at n = " + std::to_string(n));
    const long double fn = static_cast<long double>(n);
    const long double gap_f = to_long_double(gap);
    const BigInt free_digits = gap - big(n);
    r.ell = free_digits.fits_ulong_p() ? static_cast<Index>(free_digits.get_ui()) : ~Index{0};
    r.gamma = 2 * s * fn + 2 * s - 2;
    r.closed_form = std::pow(fn, -((2 * s - 1) * gap_f + fn - 2));
    const long double sn = s * fn;
    if (sn <= 1) {
      r.note = "s n <= 1: the AP sum bound does not apply";
      out.push_back(r);
      continue;
    }
    r.prefactor = (2 * sn / (2 * sn - 1)) / (2 * sn - 2);
    if (2 * sn > 1) {
      const Index T = std::max<Index>(trunc, 10);
      r.ap_ok = ap_series_bound(n + 1, static_cast<unsigned>(n), s, T).holds;
    }
    const Index c = n + 1;
    if (r.ell == 0) {
      r.free_sum = 1;
      r.factor = 1;
      r.note = "empty free segment: trivial bound";
    } else if (r.ell == 1) {
      if (r.gamma <= 1) {
        r.note = "gamma <= 1: single sum diverges";
        out.push_back(r);
        continue;
      }
      r.free_sum = single_sum(c, r.gamma, std::max(trunc, 4 * c)).upper;
      r.factor = r.prefactor * r.free_sum;
    } else {
      const long double g_min = 2 - (r.ell - 1.0L) * (2 * s - 1);
      if (r.gamma < g_min - 1e-12L) {
        r.note = "descend precondition fails";
        out.push_back(r);
        continue;
      }
      if (r.ell > 512) {
        r.free_sum = std::pow(static_cast<long double>(c - 1),
                              -(r.gamma + static_cast<long double>(r.ell) * (2 * s - 1) - 2 * s));
        r.note = "long free segment: closed-form descend bound";
      } else {
        r.free_sum = descend_sum_bound(c, static_cast<unsigned>(r.ell), s, r.gamma, std::max(trunc, 4 * c)).estimate.upper;
      }
      r.factor = r.prefactor * r.free_sum;
    }
    r.ok = r.ap_ok && r.factor <= 1;
    out.push_back(r);
  }
  return out;
}

std::vector<StageReport> h_recursion_audit(const SequenceSpec& sigma, long double s, Index j, std::size_t stages,
                                           Index trunc) {
  auto rows = h_recursion_stages(sigma, s, j, stages, trunc);
  for (const auto& r : rows)
    if (!r.ok)
      throw StageBoundViolated(r.n, "stage factor bound " + std::to_string(static_cast<double>(r.factor)) +
                                        (r.note.empty() ? "" : " (" + r.note + ")"));
  return rows;
}

ScanResult dim_upper_scan(const SequenceSpec& spec, Family family, long double tol, Index horizon) {
  if (tol < 1e-3L) throw Error(ErrorCode::ParameterOutOfRange, "tol must be >= 1e-3");
  ScanResult out;
  out.horizon = usable_horizon(spec, horizon);
  auto attempt = [&](const Rational& s) -> std::optional<Certificate> {
    ++out.evaluations;
    try {
      return family == Family::F ? f_certificate(spec, s, out.horizon) : g_certificate(spec, s, out.horizon, 0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCertificate) throw;
      return std::nullopt;
    }
  };
  Rational lo(0), hi(1, 2);
  auto top = attempt(hi);
  if (!top) throw Error(ErrorCode::NoCertificate, "no certificate even at s = 1/2");
  out.certificate = *top;
  while (ld(hi - lo) > tol) {
    Rational mid = (lo + hi) / 2;
    if (auto cert = attempt(mid)) {
      hi = mid;
      out.certificate = *cert;
    } else {
      lo = mid;
    }
  }
  out.value = hi;
  return out;
}

long double dim_formula(Family family, long double growth) {
  if (family == Family::F) {
    if (!(growth >= 0)) throw Error(ErrorCode::ParameterOutOfRange, "alpha must be >= 0");
    if (std::isinf(growth)) return 0;
    return 1.0L / (2.0L * (1.0L + growth));
  }
  if (!(growth >= 1)) throw Error(ErrorCode::ParameterOutOfRange, "beta must be >= 1");
  if (std::isinf(growth)) return 0.5L;
  return (growth - 1.0L) / (2.0L * growth);
}

}  // namespace apcf
