#pragma once

// The Cantor-type sets Lambda_t(F) and Lambda_t(G): digit windows, sampling,
// the product cylinder measure and the A_k / B_k local-dimension bounds.

#include <cstdint>
#include <optional>
#include <vector>

#include "apcf/ap_structures.hpp"
#include "apcf/log_sums.hpp"

namespace apcf {

struct LambdaParams {
  unsigned t = 2;
  Family family = Family::F;
  BlockPartition partition;
  SequenceSpec spec;
  std::optional<std::vector<Index>> schedule;  // F only

  // F with the default schedule (or `schedule` when given), all stages that fit below 2^62.
  static LambdaParams for_F(SequenceSpec nu, unsigned t, std::optional<std::vector<Index>> schedule = std::nullopt);
  // G with `stages` block pairs.
  static LambdaParams for_G(SequenceSpec sigma, unsigned t, std::size_t stages);
  // G with enough stages to cover `depth` positions plus one further stage.
  static LambdaParams for_G_depth(SequenceSpec sigma, unsigned t, Index depth);

  // max V_k: n_k for F, sigma(k) for G.
  Index anchor(std::size_t k) const { return partition.stage(k).v.max; }
};

// Either a free window [lo, hi) or the forced rule a_n = a_anchor + offset.
struct DigitWindow {
  bool forced = false;
  BigInt lo;
  BigInt hi;
  Index anchor = 0;
  Index offset = 0;

  BigInt size() const { return hi - lo; }
};

// Free window L_n = [(2n)^t, (2n+1)^t).
DigitWindow free_window(Index n, unsigned t);

DigitWindow digit_window(const LambdaParams& params, Index n);

enum class SampleMode { Random, Min };

// Deterministic in (params, seed, depth, mode).
DigitSeq sample_point(const LambdaParams& params, std::uint64_t seed, Index depth,
                      SampleMode mode = SampleMode::Random);

// Whether a_n is admissible given the earlier digits of d.
bool digit_admissible(const LambdaParams& params, const DigitSeq& d, Index n);
bool is_admissible(const LambdaParams& params, const DigitSeq& d);

// mu(I_n(d)) as an exact rational; zero when d is not admissible.
Rational mu_cylinder(const LambdaParams& params, const DigitSeq& d);

struct AdditivityReport {
  bool pass = false;
  bool forced = false;
  Rational parent;
  Rational children_sum;
  std::size_t children = 0;  // admissible next digits
  std::size_t examined = 0;  // candidates enumerated, including neighbours outside the window
};

// Sum over every candidate next digit of mu(I_{n+1}) against mu(I_n).
AdditivityReport mu_additivity_check(const LambdaParams& params, const DigitSeq& d);

// Lambda contained in J: strict increase plus a_{max W_k} < (2 min V_{k+1})^t at
// every block boundary inside the prefix. Returns the first failing position.
std::optional<Index> lambda_in_J_violation(const LambdaParams& params, const DigitSeq& d);

struct RatioRow {
  std::size_t k = 0;
  long double A = 0;
  long double A_error = 0;
  std::optional<long double> B;  // needs stage k+1
  long double B_error = 0;
  Index B_argmin = 0;
  // F only: the three normalised sums that should tend to 1.
  std::optional<long double> frac_even, frac_odd, frac_ap;
};

struct RatioSeries {
  Family family = Family::F;
  unsigned t = 2;
  long double growth = 0;       // alpha or beta estimate (inf allowed)
  long double limit_A = 0;      // F: lim A_k; G: lower bound on liminf A_k
  long double limit_B = 0;
  long double B0 = 0;           // bound used on V_1
  std::vector<RatioRow> rows;   // k = 1..k_max

  // min(A_k, B_k) with k the stage such that anchor_k < n <= anchor_{k+1}; B0 on V_1.
  std::optional<long double> bound_at(const LambdaParams& params, Index n) const;
  // A_k of the last row; the "largest reachable k" trend value.
  long double last_A() const { return rows.empty() ? 0 : rows.back().A; }
};

// Throws ScheduleInfeasible when k_max exceeds the stages the partition holds.
RatioSeries ratio_series(const LambdaParams& params, std::size_t k_max);

// log mu(I_n(d)) / log |I_n(d)| from exact rationals. Throws ZeroMeasure.
long double local_dim_ratio(const LambdaParams& params, const DigitSeq& d, Index n);

struct LocalDimRow {
  Index n = 0;
  long double ratio = 0;
  long double bound = 0;
  std::size_t k = 0;
  bool ok = false;  // ratio >= bound - 1e-6
};

// Rows for n = 1..depth of d, sharing the running products.
std::vector<LocalDimRow> local_dim_series(const LambdaParams& params, const RatioSeries& series, const DigitSeq& d);

// Number of depth-n cylinders meeting the closed ball B(x, r), where x is the
// midpoint of the deepest cylinder of d and n is fixed by |I_{n+1}| <= r < |I_n|.
struct NeighborCount {
  Index n = 0;
  std::size_t count = 0;
  bool escaped = false;  // ball left the parent cylinder; count is a lower bound
};
NeighborCount neighbor_count_check(const DigitSeq& d, const Rational& r);

// log|I_n| / log|I_{n+1}| for n = 1..min(horizon, depth-1).
std::vector<long double> length_ratio_check(const DigitSeq& d, Index horizon);

}  // namespace apcf
