#pragma once

// Exact arithmetic for regular continued fractions on (0,1).

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "apcf/error.hpp"

namespace apcf {

using BigInt = mpz_class;
using Rational = mpq_class;

// Position of a partial quotient, 1-based.
using Index = std::uint64_t;

Rational make_rational(const BigInt& num, const BigInt& den);

// Parses "p/q" or a plain integer. Throws ParseError.
Rational parse_rational(const std::string& text);

// Parses a decimal literal such as "0.30" or "1e-3" into an exact rational.
Rational parse_decimal(const std::string& text);

std::string to_string(const Rational& x);

/// Finite prefix a_1..a_n of a partial-quotient sequence. Every digit is >= 1.
class DigitSeq {
 public:
  DigitSeq() = default;
  explicit DigitSeq(std::vector<BigInt> digits);
  DigitSeq(std::initializer_list<long> digits);

  std::size_t size() const noexcept { return digits_.size(); }
  bool empty() const noexcept { return digits_.empty(); }

  // 1-based access, matching the usual a_n notation.
  const BigInt& at(Index n) const;
  const BigInt& operator[](std::size_t i) const { return digits_[i]; }

  std::span<const BigInt> digits() const noexcept { return digits_; }

  void push_back(BigInt digit);
  DigitSeq prefix(std::size_t n) const;
  DigitSeq drop_front(std::size_t count) const;

  bool is_strictly_increasing() const;

  // Comma separated decimal digits, e.g. "1,2,3".
  std::string to_string() const;
  static DigitSeq parse(const std::string& text);

  friend bool operator==(const DigitSeq&, const DigitSeq&) = default;

 private:
  std::vector<BigInt> digits_;
};

struct Convergent {
  BigInt p;
  BigInt q;
  long index = 0;
};

// (p_i, q_i) for i = 1..n from the double recursion seeded with
// p_{-1}=1, p_0=0, q_{-1}=0, q_0=1.
std::vector<Convergent> convergents(const DigitSeq& d);

// q_n(a_1..a_n) alone; q of the empty sequence is 1.
BigInt continuant(std::span<const BigInt> digits);

/// The n-th fundamental interval I_n(a_1..a_n). Closed on the left iff n is even.
struct FundInterval {
  Rational lo;
  Rational hi;
  std::size_t depth = 0;
  bool closed_left = false;

  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const;
  // Containment of the point sets, respecting open and closed ends.
  bool contains(const FundInterval& inner) const;
  // Non-empty intersection with the closed interval [a, b].
  bool intersects_closed(const Rational& a, const Rational& b) const;
};

FundInterval fundamental_interval(const DigitSeq& d);

// Exact |I_n| = 1 / (q_n (q_n + q_{n-1})).
Rational interval_length(const DigitSeq& d);

// p_n / q_n.
Rational value(const DigitSeq& d);

// T(x) = 1/x - floor(1/x) on (0, 1].
Rational gauss_map(const Rational& x);

// Canonical finite expansion of x in (0,1); the last digit is >= 2 unless x = 1/1.
DigitSeq expand(const Rational& x);

struct QnBoundsReport {
  bool interval_bound = false;  // 1/(2 q_n^2) <= |I_n| <= 1/q_n^2
  bool product_bound = false;   // (1/2) prod (a_i+1)^-2 <= |I_n| <= prod a_i^-2
  bool ratio_bound = false;     // 1 <= q_n / (q_k q_{n-k}(a_{k+1}..a_n)) <= 2
  Rational ratio;

  bool all() const { return interval_bound && product_bound && ratio_bound; }
};

QnBoundsReport verify_qn_bounds(const DigitSeq& d, std::size_t k);

// Natural logarithms of exact positive quantities via exponent and leading
// mantissa; absolute error well below 1e-12 for any magnitude.
long double log_abs(const BigInt& x);
long double log_abs(const Rational& x);

}  // namespace apcf
