#include "apcf/lambda_construct.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace apcf {

namespace {

BigInt ipow(Index base, unsigned t) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), t);
  return r;
}

BigInt big(Index n) { return BigInt(static_cast<unsigned long>(n)); }

// Size of L_i as a big integer.
BigInt window_size(Index i, unsigned t) { return ipow(2 * i + 1, t) - ipow(2 * i, t); }

long double log_growth_estimate(const SequenceSpec& spec) {
  Index horizon = 1 << 14;
  if (auto size = spec.table_size()) {
    Index usable = spec.kind() == SeqKind::Sigma ? *size - 1 : *size;
    horizon = std::min(horizon, usable);
  }
  if (horizon < 10) return std::numeric_limits<long double>::quiet_NaN();
  return growth_constants(spec, horizon).estimate;
}

struct BInf {
  long double value = std::numeric_limits<long double>::infinity();
  long double error = 0;
  Index argmin = 0;
};

// inf over n in [lo, hi] of sum_{lo}^{n} log #L_i / (2t sum_{lo}^{n} log(2i+1)).
BInf block_infimum(Index lo, Index hi, unsigned t) {
  BInf best;
  const Index scan_end = hi - lo < kDirectSumLimit ? hi : lo + kDirectSumLimit - 1;
  CompensatedSum num, den;
  long double num_abs = 0;
  for (Index n = lo; n <= scan_end; ++n) {
    long double w = log_window_size(n, t);
    num.add(w);
    num_abs += std::fabs(w);
    den.add(std::log(2.0L * static_cast<long double>(n) + 1.0L));
    long double q = num.value() / (2.0L * t * den.value());
    if (q < best.value) {
      best.value = q;
      best.argmin = n;
      best.error = std::fabs(q) * 8 * LDBL_EPSILON + 4 * LDBL_EPSILON * num_abs / (2.0L * t * den.value());
    }
  }
  if (scan_end == hi) return best;
  // Beyond the scanned prefix the terms decrease; probe geometric checkpoints and the end.
  Index step = kDirectSumLimit;
  for (;;) {
    Index n = hi - lo + 1 <= 2 * step ? hi : lo + 2 * step - 1;
    LogSum w = sum_log_window(lo, n, t);
    LogSum o = sum_log_odd(lo, n);
    long double q = w.value / (2.0L * t * o.value);
    if (q < best.value) {
      best.value = q;
      best.argmin = n;
      best.error = q * (w.error / w.value + o.error / o.value) + 4 * LDBL_EPSILON * q;
    }
    if (n == hi) break;
    step *= 2;
  }
  return best;
}

}  // namespace

LambdaParams LambdaParams::for_F(SequenceSpec nu, unsigned t, std::optional<std::vector<Index>> schedule) {
  if (t < 2) throw Error(ErrorCode::ParameterOutOfRange, "t must be >= 2");
  if (nu.kind() != SeqKind::Nu) throw Error(ErrorCode::ValidationError, "family F needs a nu specification");
  std::vector<Index> s = schedule ? *schedule : default_schedule_F(nu, kPositionLimit);
  if (s.empty()) throw Error(ErrorCode::ScheduleInfeasible, "no feasible stage");
  BlockPartition partition = blocks_for_F(nu, s);
  return LambdaParams{t, Family::F, std::move(partition), std::move(nu), std::move(s)};
}

LambdaParams LambdaParams::for_G(SequenceSpec sigma, unsigned t, std::size_t stages) {
  if (t < 2) throw Error(ErrorCode::ParameterOutOfRange, "t must be >= 2");
  if (sigma.kind() != SeqKind::Sigma) throw Error(ErrorCode::ValidationError, "family G needs a sigma specification");
  BlockPartition partition = blocks_for_G(sigma, stages);
  return LambdaParams{t, Family::G, std::move(partition), std::move(sigma), std::nullopt};
}

LambdaParams LambdaParams::for_G_depth(SequenceSpec sigma, unsigned t, Index depth) {
  std::size_t k = 1;
  while (sigma.at(k) + static_cast<unsigned long>(k - 1) < big(depth)) ++k;
  return for_G(std::move(sigma), t, k + 1);
}

DigitWindow free_window(Index n, unsigned t) {
  DigitWindow w;
  w.lo = ipow(2 * n, t);
  w.hi = ipow(2 * n + 1, t);
  return w;
}

DigitWindow digit_window(const LambdaParams& params, Index n) {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "positions start at 1");
  auto loc = params.partition.locate(n);
  if (!loc)
    throw Error(ErrorCode::HorizonExceeded,
                "position " + std::to_string(n) + " lies past the constructed blocks");
  if (!loc->in_w) return free_window(n, params.t);
  DigitWindow w;
  w.forced = true;
  w.anchor = params.partition.stage(loc->k).v.max;
  w.offset = n - w.anchor;
  return w;
}

DigitSeq sample_point(const LambdaParams& params, std::uint64_t seed, Index depth, SampleMode mode) {
  if (depth < 1) throw Error(ErrorCode::ParameterOutOfRange, "depth must be >= 1");
  if (depth > params.partition.covered())
    throw Error(ErrorCode::HorizonExceeded, "depth exceeds the constructed blocks");
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(static_cast<unsigned long>(seed));
  std::vector<BigInt> digits;
  digits.reserve(depth);
  for (Index n = 1; n <= depth; ++n) {
    DigitWindow w = digit_window(params, n);
    if (w.forced)
      digits.push_back(digits[w.anchor - 1] + big(w.offset));
    else if (mode == SampleMode::Min)
      digits.push_back(w.lo);
    else
      digits.push_back(w.lo + rng.get_z_range(w.hi - w.lo));
  }
  return DigitSeq(std::move(digits));
}

namespace {

bool admissible_value(const LambdaParams& params, std::span<const BigInt> earlier, Index n, const BigInt& a) {
  DigitWindow w = digit_window(params, n);
  if (w.forced) return a == earlier[w.anchor - 1] + big(w.offset);
  return w.lo <= a && a < w.hi;
}

}  // namespace

bool digit_admissible(const LambdaParams& params, const DigitSeq& d, Index n) {
  return admissible_value(params, d.digits().first(n - 1), n, d.at(n));
}

bool is_admissible(const LambdaParams& params, const DigitSeq& d) {
  if (d.size() > params.partition.covered()) return false;
  for (Index n = 1; n <= d.size(); ++n)
    if (!digit_admissible(params, d, n)) return false;
  return true;
}

Rational mu_cylinder(const LambdaParams& params, const DigitSeq& d) {
  if (!is_admissible(params, d)) return Rational(0);
  BigInt den = 1;
  for (Index n = 1; n <= d.size(); ++n)
    if (!params.partition.locate(n)->in_w) den *= window_size(n, params.t);
  return make_rational(1, den);
}

AdditivityReport mu_additivity_check(const LambdaParams& params, const DigitSeq& d) {
  AdditivityReport rep;
  rep.parent = mu_cylinder(params, d);
  const Index next = d.size() + 1;
  DigitWindow w = digit_window(params, next);
  rep.forced = w.forced;
  BigInt lo, hi;  // candidates [lo, hi], one past the window on each side
  BigInt forced_value;
  if (w.forced) {
    forced_value = d[w.anchor - 1] + big(w.offset);
    lo = forced_value - 1;
    hi = forced_value + 1;
  } else {
    lo = w.lo - 1;
    hi = w.hi;
  }
  if (lo < 1) lo = 1;
  const BigInt child_den = w.forced ? BigInt(1) : w.size();
  const Rational share = rep.parent / Rational(child_den);
  std::vector<BigInt> digits(d.digits().begin(), d.digits().end());
  digits.emplace_back();
  Rational sum = 0;
  bool consistent = true;
  for (BigInt j = lo; j <= hi; ++j) {
    ++rep.examined;
    const bool ok = w.forced ? j == forced_value : (w.lo <= j && j < w.hi);
    if (ok) {
      sum += share;
      ++rep.children;
    }
    // Recompute the boundary children from scratch.
    if (j - lo < 2 || hi - j < 2) {
      digits.back() = j;
      Rational full = mu_cylinder(params, DigitSeq(digits));
      if (full != (ok ? share : Rational(0))) consistent = false;
    }
  }
  rep.children_sum = sum;
  rep.pass = consistent && sum == rep.parent;
  return rep;
}

std::optional<Index> lambda_in_J_violation(const LambdaParams& params, const DigitSeq& d) {
  for (Index i = 1; i < d.size(); ++i)
    if (d.at(i) >= d.at(i + 1)) return i + 1;
  const auto& stages = params.partition.all();
  for (std::size_t k = 0; k + 1 < stages.size(); ++k) {
    const Index next_min = stages[k + 1].v.min;
    if (next_min > d.size()) break;
    const Block& w = stages[k].w;
    BigInt last = w.empty() ? d.at(stages[k].v.max) : d.at(w.min) + big(w.size()) - 1;
    if (last >= ipow(2 * next_min, params.t)) return next_min;
  }
  return std::nullopt;
}

std::optional<long double> RatioSeries::bound_at(const LambdaParams& params, Index n) const {
  if (n <= params.anchor(1)) return B0;
  std::size_t k = 0;
  // Largest k with anchor_k < n.
  std::size_t lo = 1, hi = params.partition.stages();
  while (lo <= hi) {
    std::size_t mid = (lo + hi) / 2;
    if (params.anchor(mid) < n) {
      k = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  if (k == 0 || k > rows.size()) return std::nullopt;
  const RatioRow& row = rows[k - 1];
  if (row.B) return std::min(row.A, *row.B);
  if (params.partition.stage(k).w.contains(n)) return row.A;
  return std::nullopt;
}

RatioSeries ratio_series(const LambdaParams& params, std::size_t k_max) {
  if (k_max < 1) throw Error(ErrorCode::ParameterOutOfRange, "k_max must be >= 1");
  const std::size_t stages = params.partition.stages();
  if (k_max > stages)
    throw Error(ErrorCode::ScheduleInfeasible, "only " + std::to_string(stages) +
                                                   " stages fit below the position limit; k_max = " +
                                                   std::to_string(k_max));
  const unsigned t = params.t;
  RatioSeries out;
  out.family = params.family;
  out.t = t;
  out.growth = log_growth_estimate(params.spec);
  const long double base = (t - 1.0L) / (2.0L * t);
  out.limit_B = base;
  if (params.family == Family::F)
    out.limit_A = std::isinf(out.growth) ? 0.0L : base / (1.0L + out.growth);
  else
    out.limit_A = std::isinf(out.growth) ? base : base * (out.growth - 1.0L) / out.growth;

  const Block& v1 = params.partition.stage(1).v;
  out.B0 = block_infimum(v1.min, v1.max, t).value;

  CompensatedSum num, den, even, odd, ap;
  long double num_err = 0, den_err = 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto& st = params.partition.stage(k);
    LogSum w = sum_log_window(st.v.min, st.v.max, t);
    LogSum o = sum_log_odd(st.v.min, st.v.max);
    num.add(w.value);
    num_err += w.error;
    den.add(t * o.value);
    den_err += t * o.error;
    // |W_k| forced digits, each with a_i + 1 <= (2 anchor + 1)^t + |W_k| + 1.
    const Index wsize = st.w.size();
    long double ap_term = 0;
    if (wsize > 0) {
      BigInt cap = ipow(2 * st.v.max + 1, t) + big(wsize) + 1;
      ap_term = static_cast<long double>(wsize) * log_abs(cap);
      den.add(ap_term);
      den_err += 4 * LDBL_EPSILON * ap_term;
    }
    RatioRow row;
    row.k = k;
    const long double N = num.value();
    const long double D = std::log(2.0L) + 2.0L * den.value();
    row.A = N / D;
    row.A_error = row.A * (num_err / N + 2.0L * den_err / D) + 4 * LDBL_EPSILON * row.A;
    if (k + 1 <= stages) {
      const Block& v = params.partition.stage(k + 1).v;
      BInf b = block_infimum(v.min, v.max, t);
      row.B = b.value;
      row.B_error = b.error;
      row.B_argmin = b.argmin;
    }
    if (params.family == Family::F) {
      even.add(sum_log_even(st.v.min, st.v.max).value);
      odd.add(o.value);
      ap.add(ap_term);
      const long double nk = static_cast<long double>(st.v.max);
      const long double scale = nk * std::log(nk);
      row.frac_even = even.value() / scale;
      row.frac_odd = odd.value() / scale;
      const long double nu_k = static_cast<long double>(wsize + 1);
      row.frac_ap = ap.value() / (t * nu_k * std::log(nk));
    }
    out.rows.push_back(row);
  }
  return out;
}

long double local_dim_ratio(const LambdaParams& params, const DigitSeq& d, Index n) {
  if (n < 1 || n > d.size()) throw Error(ErrorCode::IndexOutOfRange, "n outside the digit prefix");
  DigitSeq prefix = d.prefix(n);
  Rational mu = mu_cylinder(params, prefix);
  if (mu == 0) throw Error(ErrorCode::ZeroMeasure, "digit prefix is not admissible");
  return log_abs(mu) / log_abs(interval_length(prefix));
}

std::vector<LocalDimRow> local_dim_series(const LambdaParams& params, const RatioSeries& series, const DigitSeq& d) {
  if (!is_admissible(params, d)) throw Error(ErrorCode::ZeroMeasure, "digit prefix is not admissible");
  const auto conv = convergents(d);
  std::vector<LocalDimRow> rows;
  rows.reserve(d.size());
  BigInt den = 1;
  BigInt q_prev = 1;  // q_0
  for (Index n = 1; n <= d.size(); ++n) {
    if (!params.partition.locate(n)->in_w) den *= window_size(n, params.t);
    const BigInt& q = conv[n - 1].q;
    const long double log_len = -(log_abs(q) + log_abs(BigInt(q + q_prev)));
    q_prev = q;
    LocalDimRow row;
    row.n = n;
    row.ratio = -log_abs(den) / log_len;
    auto bound = series.bound_at(params, n);
    row.bound = bound ? *bound : std::numeric_limits<long double>::quiet_NaN();
    std::size_t k = 0;
    while (k < params.partition.stages() && params.anchor(k + 1) < n) ++k;
    row.k = k;
    row.ok = bound && row.ratio >= *bound - 1e-6L;
    rows.push_back(row);
  }
  return rows;
}

NeighborCount neighbor_count_check(const DigitSeq& d, const Rational& r) {
  if (d.empty()) throw Error(ErrorCode::EmptySequence, "empty digit sequence");
  if (r <= 0) throw Error(ErrorCode::RadiusOutOfRange, "radius must be positive");
  const Index m = d.size();
  const auto conv = convergents(d);
  auto length = [&](Index n) {
    const BigInt& q = conv[n - 1].q;
    const BigInt qp = n >= 2 ? conv[n - 2].q : BigInt(1);
    return make_rational(1, q * (q + qp));
  };
  // |I_{n+1}| <= r < |I_n| with n + 1 <= m.
  Index n = 0;
  for (Index k = 1; k < m; ++k) {
    if (length(k + 1) <= r && r < length(k)) {
      n = k;
      break;
    }
  }
  if (n == 0)
    throw Error(ErrorCode::RadiusOutOfRange, "no n <= depth-1 with |I_{n+1}| <= r < |I_n|");
  if (d.at(n) < 2) throw Error(ErrorCode::ParameterOutOfRange, "a_n must be >= 2");

  const Rational x = value(d);
  const Rational left = x - r, right = x + r;
  std::vector<BigInt> digits(d.digits().begin(), d.digits().begin() + static_cast<std::ptrdiff_t>(n));
  auto hits = [&](const BigInt& j) {
    digits.back() = j;
    return fundamental_interval(DigitSeq(digits)).intersects_closed(left, right);
  };
  const BigInt an = d.at(n);
  NeighborCount out;
  out.n = n;
  BigInt K = 4;
  const BigInt cap = BigInt(1) << 20;
  for (;;) {
    BigInt lo = an - K < 1 ? BigInt(1) : an - K;
    BigInt hi = an + K;
    std::size_t count = 0;
    bool edge = false;
    for (BigInt j = lo; j <= hi; ++j) {
      if (hits(j)) {
        ++count;
        if (j == hi || (j == lo && lo > 1)) edge = true;
      }
    }
    out.count = count;
    if (!edge) break;
    if (K >= cap) {
      out.escaped = true;
      break;
    }
    K *= 2;
  }
  // Cylinders outside the parent meet the ball only if it leaves the parent's closure.
  Rational plo = 0, phi = 1;
  if (n >= 2) {
    FundInterval parent = fundamental_interval(d.prefix(n - 1));
    plo = parent.lo;
    phi = parent.hi;
  }
  if (left < plo) {
    out.escaped = true;
    ++out.count;
  }
  if (right > phi) {
    out.escaped = true;
    ++out.count;
  }
  return out;
}

std::vector<long double> length_ratio_check(const DigitSeq& d, Index horizon) {
  if (d.size() < 2) return {};
  const auto conv = convergents(d);
  std::vector<long double> logs;
  logs.reserve(d.size());
  BigInt q_prev = 1;
  for (const auto& c : conv) {
    logs.push_back(-(log_abs(c.q) + log_abs(BigInt(c.q + q_prev))));
    q_prev = c.q;
  }
  const Index last = std::min<Index>(horizon, d.size() - 1);
  std::vector<long double> out;
  out.reserve(last);
  for (Index n = 1; n <= last; ++n) out.push_back(logs[n - 1] / logs[n]);
  return out;
}

}  // namespace apcf
