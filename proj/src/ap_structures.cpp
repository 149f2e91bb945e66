#include "apcf/ap_structures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace apcf {

namespace {

Index to_index(const BigInt& v, const char* what) {
  if (v < 0 || v > BigInt(static_cast<unsigned long>(kPositionLimit)))
    throw Error(ErrorCode::ScheduleInfeasible, std::string(what) + " = " + v.get_str() +
                                                   " exceeds the position limit 2^62");
  return static_cast<Index>(v.get_ui());
}

BigInt from_index(Index n) { return BigInt(static_cast<unsigned long>(n)); }

}  // namespace

std::string_view to_string(Family f) noexcept { return f == Family::F ? "F" : "G"; }

std::string_view to_string(MembershipReport::Verdict v) noexcept {
  switch (v) {
    case MembershipReport::Verdict::Consistent: return "consistent";
    case MembershipReport::Verdict::Witnessed: return "witnessed";
    case MembershipReport::Verdict::Violated: return "violated";
  }
  return "unknown";
}

long double to_long_double(const BigInt& x) {
  if (x == 0) return 0.0L;
  std::size_t bits = mpz_sizeinbase(x.get_mpz_t(), 2);
  if (bits > 16000) return x > 0 ? std::numeric_limits<long double>::infinity()
                                 : -std::numeric_limits<long double>::infinity();
  BigInt m = abs(x);
  std::size_t shift = bits > 64 ? bits - 64 : 0;
  BigInt top = m >> static_cast<mp_bitcnt_t>(shift);
  std::uint64_t lead = 0;
  mpz_export(&lead, nullptr, -1, sizeof(lead), 0, 0, top.get_mpz_t());
  long double v = std::ldexp(static_cast<long double>(lead), static_cast<int>(shift));
  return x > 0 ? v : -v;
}

BlockPartition::BlockPartition(std::vector<Stage> stages) : stages_(std::move(stages)) {}

Index BlockPartition::covered() const {
  if (stages_.empty()) return 0;
  const Stage& last = stages_.back();
  return last.w.empty() ? last.v.max : last.w.max;
}

std::optional<BlockPartition::Location> BlockPartition::locate(Index n) const {
  // Stages are sorted; binary search on the V start.
  auto it = std::upper_bound(stages_.begin(), stages_.end(), n,
                             [](Index value, const Stage& s) { return value < s.v.min; });
  if (it == stages_.begin()) return std::nullopt;
  --it;
  std::size_t k = static_cast<std::size_t>(it - stages_.begin()) + 1;
  if (it->v.contains(n)) return Location{k, false};
  if (it->w.contains(n)) return Location{k, true};
  return std::nullopt;
}

bool BlockPartition::is_contiguous() const {
  Index next = 1;
  for (const Stage& s : stages_) {
    if (s.v.empty() || s.v.min != next) return false;
    next = s.v.max + 1;
    if (!s.w.empty()) {
      if (s.w.min != next) return false;
      next = s.w.max + 1;
    } else if (s.w.min != next) {
      return false;
    }
  }
  return true;
}

std::optional<BigInt> is_ap(std::span<const BigInt> window) {
  if (window.empty()) return std::nullopt;
  if (window.size() == 1) return BigInt(1);
  BigInt m = window[1] - window[0];
  if (m < 1) return std::nullopt;
  for (std::size_t i = 2; i < window.size(); ++i)
    if (window[i] - window[i - 1] != m) return std::nullopt;
  return m;
}

std::vector<APSegment> find_ap_runs(const DigitSeq& d, Index min_len) {
  if (min_len < 3) throw Error(ErrorCode::ParameterOutOfRange, "min_len must be >= 3");
  std::vector<APSegment> runs;
  const std::size_t n = d.size();
  std::size_t i = 0;  // 0-based start of the current run
  while (i + 1 < n) {
    BigInt m = d[i + 1] - d[i];
    std::size_t j = i + 1;
    if (m >= 1)
      while (j + 1 < n && d[j + 1] - d[j] == m) ++j;
    std::size_t len = j - i + 1;
    if (m >= 1 && len >= min_len) runs.push_back({i + 1, len, d[i], m});
    i = j;
  }
  return runs;
}

MembershipReport check_F_membership(const DigitSeq& d, const SequenceSpec& nu) {
  if (!d.is_strictly_increasing())
    throw Error(ErrorCode::NotStrictlyIncreasing, "F membership needs strictly increasing digits");
  MembershipReport report;
  const Index depth = d.size();
  for (Index n = 1; n <= depth; ++n) {
    BigInt len = nu.at(n);
    if (len < 1) throw Error(ErrorCode::SpecConstraintViolated, "nu(" + std::to_string(n) + ") < 1");
    if (from_index(n) + len - 1 > from_index(depth)) break;
    Index l = len.get_ui();
    auto window = d.digits().subspan(n - 1, l);
    if (auto m = is_ap(window)) report.witnesses.push_back({n, l, window.front(), *m});
  }
  report.verdict = report.witnesses.empty() ? MembershipReport::Verdict::Consistent
                                            : MembershipReport::Verdict::Witnessed;
  return report;
}

MembershipReport check_G_membership(const DigitSeq& d, const SequenceSpec& sigma, Index n_start) {
  if (n_start < 1) throw Error(ErrorCode::ParameterOutOfRange, "n_start must be >= 1");
  if (!d.is_strictly_increasing())
    throw Error(ErrorCode::NotStrictlyIncreasing, "G membership needs strictly increasing digits");
  MembershipReport report;
  const BigInt depth = from_index(d.size());
  BigInt prev = sigma.at(1);
  for (Index n = 1;; ++n) {
    BigInt next = sigma.at(n + 1);
    if (next - prev < from_index(n))
      throw Error(ErrorCode::SpecConstraintViolated,
                  "sigma(" + std::to_string(n + 1) + ") - sigma(" + std::to_string(n) + ") < " + std::to_string(n));
    const BigInt& start = prev;
    if (start > depth) break;
    if (n >= n_start && start + from_index(n) - 1 <= depth) {
      Index s = start.get_ui();
      auto window = d.digits().subspan(s - 1, n);
      if (auto m = is_ap(window)) {
        report.witnesses.push_back({s, n, window.front(), *m});
      } else {
        report.verdict = MembershipReport::Verdict::Violated;
        report.first_violation = n;
        return report;
      }
    }
    prev = std::move(next);
  }
  report.verdict = MembershipReport::Verdict::Consistent;
  return report;
}

std::vector<Index> default_schedule_F(const SequenceSpec& nu, Index limit, std::size_t max_stages) {
  std::vector<Index> schedule;
  BigInt n = 3;
  while (schedule.size() < max_stages) {
    Index nk = to_index(n, "n_k");
    if (nk > limit) break;
    BigInt len = nu.at(nk);
    // The whole AP block must stay addressable.
    if (n + len > BigInt(static_cast<unsigned long>(kPositionLimit))) break;
    schedule.push_back(nk);
    BigInt dense = n + len + 1;
    BigInt square = n * n;
    n = dense > square ? dense : square;
    if (n > BigInt(static_cast<unsigned long>(kPositionLimit))) break;
  }
  return schedule;
}

BlockPartition blocks_for_F(const SequenceSpec& nu, std::span<const Index> schedule) {
  std::vector<BlockPartition::Stage> stages;
  Index v_start = 1;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const Index nk = schedule[k];
    if (nk < v_start)
      throw Error(ErrorCode::ScheduleTooDense, "n_" + std::to_string(k + 1) + " = " + std::to_string(nk) +
                                                   " overlaps the previous AP block");
    BigInt len = nu.at(nk);
    if (len < 1) throw Error(ErrorCode::SpecConstraintViolated, "nu(" + std::to_string(nk) + ") < 1");
    BigInt end = from_index(nk) + len;  // n_k + nu(k)
    if (k + 1 < schedule.size() && end >= from_index(schedule[k + 1]))
      throw Error(ErrorCode::ScheduleTooDense, "n_k + nu(n_k) >= n_{k+1} at k = " + std::to_string(k + 1));
    Index w_end_plus_one = to_index(end, "n_k + nu(n_k)");
    stages.push_back({Block{v_start, nk}, Block{nk + 1, w_end_plus_one - 1}});
    v_start = w_end_plus_one;
  }
  return BlockPartition(std::move(stages));
}

BlockPartition blocks_for_G(const SequenceSpec& sigma, std::size_t k_max) {
  if (k_max < 1) throw Error(ErrorCode::ParameterOutOfRange, "k_max must be >= 1");
  std::vector<BlockPartition::Stage> stages;
  BigInt prev = 1;  // sigma(0) := 1
  for (std::size_t k = 1; k <= k_max; ++k) {
    BigInt s = sigma.at(k);
    BigInt start = prev + static_cast<unsigned long>(k - 1);
    if (k == 1 ? s < 1 : s - prev < static_cast<unsigned long>(k - 1))
      throw Error(ErrorCode::SpecConstraintViolated,
                  "sigma(" + std::to_string(k) + ") - sigma(" + std::to_string(k - 1) + ") < " + std::to_string(k - 1));
    if (k > 1 && s < start)
      throw Error(ErrorCode::SpecConstraintViolated, "empty V block at k = " + std::to_string(k));
    Index v_min = to_index(start, "V_k start");
    Index v_max = to_index(s, "sigma(k)");
    stages.push_back({Block{v_min, v_max}, Block{v_max + 1, v_max + k - 1}});
    prev = std::move(s);
  }
  return BlockPartition(std::move(stages));
}

GrowthEstimate growth_constants(const SequenceSpec& spec, Index horizon) {
  if (horizon < 10) throw Error(ErrorCode::ParameterOutOfRange, "growth horizon must be >= 10");
  GrowthEstimate g;
  g.ratios.reserve(horizon);
  const bool sigma = spec.kind() == SeqKind::Sigma;
  BigInt prev = spec.at(1);
  for (Index n = 1; n <= horizon; ++n) {
    long double r;
    if (sigma) {
      BigInt next = spec.at(n + 1);
      r = to_long_double(next - prev) / static_cast<long double>(n);
      prev = std::move(next);
    } else {
      r = to_long_double(spec.at(n)) / static_cast<long double>(n);
    }
    g.ratios.push_back(r);
  }
  auto window_min = [&](Index lo, Index hi) {
    return *std::min_element(g.ratios.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                             g.ratios.begin() + static_cast<std::ptrdiff_t>(hi));
  };
  const Index half = horizon / 2, quarter = std::max<Index>(1, horizon / 4);
  const Index decade = horizon - horizon / 10;
  auto [lo_it, hi_it] = std::minmax_element(g.ratios.begin() + static_cast<std::ptrdiff_t>(decade - 1),
                                            g.ratios.end());
  g.converged = *hi_it - *lo_it <= 1e-3L;
  if (sigma) {
    g.estimate = g.ratios.back();
    g.divergent = g.ratios.back() >= 1.5L * g.ratios[half - 1] && g.ratios.back() > 4.0L;
  } else {
    g.tail_min.assign(horizon, 0);
    long double running = std::numeric_limits<long double>::infinity();
    for (Index i = horizon; i >= 1; --i) {
      running = std::min(running, g.ratios[i - 1]);
      g.tail_min[i - 1] = running;
    }
    long double late = window_min(half, horizon);
    long double early = window_min(quarter, half);
    g.estimate = late;
    g.divergent = late >= 1.5L * early && late > 4.0L;
  }
  if (g.divergent) {
    g.estimate = std::numeric_limits<long double>::infinity();
    g.converged = false;
  }
  return g;
}

}  // namespace apcf
