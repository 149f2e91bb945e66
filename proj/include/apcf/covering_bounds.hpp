#pragma once

// Upper-bound side: the two series inequalities behind the coverings,
// finite-horizon summability certificates for F and G, the dimension scan
// and the closed-form dimension values.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apcf/ap_structures.hpp"

namespace apcf {

struct SeriesEstimate {
  long double lower = 0;
  long double upper = 0;  // truncated sum plus integral tail bound
  std::uint64_t terms_used = 0;
};

struct SeriesBound {
  SeriesEstimate estimate;
  long double rhs = 0;
  bool holds = false;  // estimate.upper <= rhs
};

// sum_{M>=1} prod_{i=0}^{ell} (a + iM)^{-2s} against a^{1-2s ell} * 2s ell / (2s ell - 1).
SeriesBound ap_series_bound(Index a, unsigned ell, long double s, Index trunc);

// sum over c <= a_1 < ... < a_n of (a_1...a_{n-1})^{-2s} a_n^{-gamma}
// against (c-1)^{-(gamma + n(2s-1) - 2s)}. Values up to max(trunc, c) are summed
// exactly by an inner-to-outer recursion; every layer carries its tail bound.
SeriesBound descend_sum_bound(Index c, unsigned n, long double s, long double gamma, Index trunc);

// Plain nested enumeration of the same sum over c <= a_1 < ... < a_n <= T, n <= 4.
long double descend_bruteforce(Index c, unsigned n, long double s, long double gamma, Index T);

struct StageReport {
  Index n = 0;
  Index ell = 0;             // free digits between consecutive APs
  long double gamma = 0;
  long double prefactor = 0;
  long double free_sum = 0;  // bound on the free-segment sum
  long double factor = 0;    // bound on the stage factor I
  long double closed_form = 0;
  bool ap_ok = false;
  bool ok = false;
  std::string note;
};

struct Certificate {
  Family family = Family::F;
  Rational s;
  Rational delta;
  Index threshold = 0;        // N for F, n_0 for G
  Index checked_horizon = 0;
  bool accepted = false;
  long double slack_half = 0;  // slack at horizon/2 and horizon
  long double slack_end = 0;
  long double tail_bound = 0;  // F: sum_{n>=N} 2 * 2^{-delta n}
  std::vector<StageReport> audit;  // G
};

// Smallest N > 1/delta with the F inequality on [N, horizon]; nullopt if none.
std::optional<Index> minimal_threshold_F(const SequenceSpec& nu, const Rational& s, const Rational& delta, Index horizon);

// Smallest n_0 with s n_0 >= 2 and the G inequality on [n_0, horizon].
std::optional<Index> minimal_threshold_G(const SequenceSpec& sigma, const Rational& s, const Rational& delta, Index horizon);

// Throws NoCertificate.
Certificate f_certificate(const SequenceSpec& nu, const Rational& s, Index horizon);
Certificate g_certificate(const SequenceSpec& sigma, const Rational& s, Index horizon, std::size_t audit_stages = 4,
                          Index trunc = 2000);

// Stage factors for n = j..j+stages.
std::vector<StageReport> h_recursion_stages(const SequenceSpec& sigma, long double s, Index j, std::size_t stages,
                                            Index trunc = 2000);
// Same, throwing StageBoundViolated at the first stage whose factor exceeds 1.
std::vector<StageReport> h_recursion_audit(const SequenceSpec& sigma, long double s, Index j, std::size_t stages,
                                           Index trunc = 2000);

struct ScanResult {
  Rational value;  // smallest accepted s found, within tol
  Certificate certificate;
  std::size_t evaluations = 0;
  Index horizon = 0;
};

// Bisection over dyadic s in (0, 1/2]. Throws NoCertificate when s = 1/2 fails.
ScanResult dim_upper_scan(const SequenceSpec& spec, Family family, long double tol, Index horizon = 100000);

// 1/(2(1+alpha)) for F (0 at infinity); (beta-1)/(2 beta) for G (1/2 at infinity).
long double dim_formula(Family family, long double growth);

// Horizon actually usable for a spec: tables cap it.
Index usable_horizon(const SequenceSpec& spec, Index horizon);

}  // namespace apcf
