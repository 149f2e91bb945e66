#pragma once

// Arithmetic-progression bookkeeping on digit sequences: AP detection,
// finite-depth F/G membership scans, and the V_k/W_k block partitions.

#include <optional>
#include <span>
#include <vector>

#include "apcf/cf_core.hpp"
#include "apcf/seqspec.hpp"

namespace apcf {

enum class Family { F, G };

std::string_view to_string(Family f) noexcept;

// b, b+M, ..., b+(length-1)M with M >= 1.
struct APSegment {
  Index start = 1;
  Index length = 1;
  BigInt first;
  BigInt difference;

  friend bool operator==(const APSegment&, const APSegment&) = default;
};

/// Inclusive integer interval [min, max]; empty when max < min.
struct Block {
  Index min = 1;
  Index max = 0;

  bool empty() const noexcept { return max < min; }
  Index size() const noexcept { return empty() ? 0 : max - min + 1; }
  bool contains(Index n) const noexcept { return !empty() && min <= n && n <= max; }
};

/// V_1, W_1, V_2, W_2, ... tiling an initial segment of the positive integers.
class BlockPartition {
 public:
  struct Stage {
    Block v;  // free digits
    Block w;  // forced AP continuation
  };

  BlockPartition() = default;
  explicit BlockPartition(std::vector<Stage> stages);

  std::size_t stages() const noexcept { return stages_.size(); }
  // Stage k is 1-based.
  const Stage& stage(std::size_t k) const { return stages_.at(k - 1); }
  const std::vector<Stage>& all() const noexcept { return stages_; }

  // Last position covered by the partition.
  Index covered() const;

  struct Location {
    std::size_t k = 0;
    bool in_w = false;
  };
  // Stage and block containing n; nullopt past the covered range.
  std::optional<Location> locate(Index n) const;

  // max V_k + 1 = min W_k and max W_k + 1 = min V_{k+1}, starting at 1.
  bool is_contiguous() const;

 private:
  std::vector<Stage> stages_;
};

struct MembershipReport {
  enum class Verdict { Consistent, Witnessed, Violated };
  Verdict verdict = Verdict::Consistent;
  std::vector<APSegment> witnesses;
  std::optional<Index> first_violation;
};

std::string_view to_string(MembershipReport::Verdict v) noexcept;

// Common difference M >= 1 if the window is an AP. Windows of length 1
// report M = 1; constant or decreasing windows are not APs.
std::optional<BigInt> is_ap(std::span<const BigInt> window);

// Maximal constant-difference runs (difference >= 1) of length >= min_len,
// left to right. Consecutive runs can share their boundary digit.
std::vector<APSegment> find_ap_runs(const DigitSeq& d, Index min_len);

// Positions n where a_n..a_{n+nu_n-1} lies inside the prefix and is an AP.
// Never reports a violation: "infinitely many n" is not finitely refutable.
MembershipReport check_F_membership(const DigitSeq& d, const SequenceSpec& nu);

// First n >= n_start whose window a_{sigma_n}..a_{sigma_n+n-1} fits in the
// prefix and is not an AP.
MembershipReport check_G_membership(const DigitSeq& d, const SequenceSpec& sigma, Index n_start);

// n_1 = 3, n_{k+1} = max(n_k + nu_{n_k} + 1, n_k^2). Stops once n_k > limit
// or its AP block would leave the addressable range [1, 2^62].
std::vector<Index> default_schedule_F(const SequenceSpec& nu, Index limit, std::size_t max_stages = 64);

// V_k = [n_{k-1} + nu(k-1), n_k], W_k = [n_k + 1, n_k + nu(k) - 1].
BlockPartition blocks_for_F(const SequenceSpec& nu, std::span<const Index> schedule);

// V_k = [sigma(k-1) + k - 1, sigma(k)], W_k = [sigma(k) + 1, sigma(k) + k - 1], sigma(0) = 1.
BlockPartition blocks_for_G(const SequenceSpec& sigma, std::size_t k_max);

struct GrowthEstimate {
  long double estimate = 0;  // +inf when flagged divergent
  bool divergent = false;
  bool converged = true;     // last-decade oscillation below 1e-3
  std::vector<long double> ratios;      // nu_n/n or (sigma_{n+1}-sigma_n)/n, n = 1..horizon
  std::vector<long double> tail_min;    // min_{m >= n} of ratios (F only)
};

// alpha = liminf nu_n / n for nu specs, beta = lim (sigma_{n+1} - sigma_n)/n for sigma specs.
GrowthEstimate growth_constants(const SequenceSpec& spec, Index horizon);

// Saturating conversion used by the numeric scans.
long double to_long_double(const BigInt& x);

// Largest position any schedule or partition may reach.
inline constexpr Index kPositionLimit = Index{1} << 62;

}  // namespace apcf
