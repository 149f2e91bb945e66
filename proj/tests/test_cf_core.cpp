#include <doctest.h>

#include <functional>

#include "apcf/cf_core.hpp"
#include "oracles.hpp"

using namespace apcf;

namespace {

Rational q(long p, long d) { return make_rational(BigInt(p), BigInt(d)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an apcf::Error");
  return ErrorCode::ValidationError;
}

}  // namespace

TEST_CASE("convergents of small sequences") {
  auto c = convergents(DigitSeq{1, 2, 3});
  REQUIRE(c.size() == 3);
  CHECK(c[0].p == 1);
  CHECK(c[0].q == 1);
  CHECK(c[1].p == 2);
  CHECK(c[1].q == 3);
  CHECK(c[2].p == 7);
  CHECK(c[2].q == 10);
  CHECK(c[2].index == 3);

  auto one = convergents(DigitSeq{1});
  REQUIRE(one.size() == 1);
  CHECK((one[0].p == 1 && one[0].q == 1));

  auto five = convergents(DigitSeq{5});
  CHECK((five[0].p == 1 && five[0].q == 5));
}

TEST_CASE("fundamental intervals") {
  FundInterval a = fundamental_interval(DigitSeq{2});
  CHECK(a.lo == q(1, 3));
  CHECK(a.hi == q(1, 2));
  CHECK_FALSE(a.closed_left);
  CHECK(a.length() == q(1, 6));
  CHECK(a.contains(q(1, 2)));
  CHECK_FALSE(a.contains(q(1, 3)));

  FundInterval b = fundamental_interval(DigitSeq{1, 2});
  CHECK(b.lo == q(2, 3));
  CHECK(b.hi == q(3, 4));
  CHECK(b.closed_left);
  CHECK(b.length() == q(1, 12));
  CHECK(b.contains(q(2, 3)));
  CHECK_FALSE(b.contains(q(3, 4)));
  CHECK(interval_length(DigitSeq{1, 2}) == q(1, 12));
}

TEST_CASE("gauss map and expansion") {
  CHECK(gauss_map(q(7, 10)) == q(3, 7));
  CHECK(gauss_map(q(1, 3)) == 0);
  CHECK(gauss_map(q(2, 5)) == q(1, 2));

  CHECK(expand(q(7, 10)) == DigitSeq{1, 2, 3});
  CHECK(expand(q(1, 2)) == DigitSeq{2});
  CHECK(expand(q(3, 7)) == DigitSeq{2, 3});
}

TEST_CASE("qn bound report on worked cases") {
  QnBoundsReport r = verify_qn_bounds(DigitSeq{1, 2}, 1);
  CHECK(r.all());
  CHECK(r.ratio == q(3, 2));
  QnBoundsReport s = verify_qn_bounds(DigitSeq{1}, 1);
  CHECK(s.all());
  CHECK(s.ratio == 1);
}

TEST_CASE("error codes") {
  CHECK(code_of([] { convergents(DigitSeq{}); }) == ErrorCode::EmptySequence);
  CHECK(code_of([] { fundamental_interval(DigitSeq{}); }) == ErrorCode::EmptySequence);
  CHECK(code_of([] { DigitSeq{0}; }) == ErrorCode::NonPositiveDigit);
  CHECK(code_of([] { DigitSeq({BigInt(-3)}); }) == ErrorCode::NonPositiveDigit);
  CHECK(code_of([] { expand(q(3, 2)); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([] { expand(Rational(0)); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([] { gauss_map(Rational(0)); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([] { verify_qn_bounds(DigitSeq{1, 2}, 3); }) == ErrorCode::IndexOutOfRange);
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("x"), ParseError);
  CHECK_THROWS_AS(DigitSeq::parse("1,,2"), ParseError);
}

TEST_CASE("text forms") {
  CHECK(parse_rational("6/8") == q(3, 4));
  CHECK(parse_decimal("0.30") == q(3, 10));
  CHECK(parse_decimal("1e-3") == q(1, 1000));
  CHECK(parse_decimal("2.5E2") == 250);
  CHECK(to_string(q(3, 4)) == "3/4");
  DigitSeq d = DigitSeq::parse("4, 16,36");
  CHECK(d == DigitSeq{4, 16, 36});
  CHECK(d.to_string() == "4,16,36");
  CHECK(DigitSeq::parse(d.to_string()) == d);
  CHECK(d.at(2) == 16);
  CHECK(d.is_strictly_increasing());
  CHECK_FALSE((DigitSeq{3, 3}).is_strictly_increasing());
}

TEST_CASE("log of exact magnitudes") {
  CHECK(std::fabs(log_abs(BigInt(20)) - std::log(20.0L)) < 1e-15L);
  CHECK(std::fabs(log_abs(q(1, 20)) + std::log(20.0L)) < 1e-15L);
  BigInt huge = BigInt(3) << 5000;
  CHECK(std::fabs(log_abs(huge) - (5000 * std::log(2.0L) + std::log(3.0L))) < 1e-12L);
  Rational tiny = make_rational(BigInt(7), BigInt(1) << 4000);
  CHECK(std::fabs(log_abs(tiny) - (std::log(7.0L) - 4000 * std::log(2.0L))) < 1e-12L);
}

TEST_CASE("random tuples against nested evaluation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    auto digits = oracle::random_digits(rng, n, trial % 2 ? 1000 : 5);
    DigitSeq d(digits);
    auto conv = convergents(d);
    REQUIRE(conv.size() == n);

    CHECK(make_rational(conv.back().p, conv.back().q) == oracle::nested_value(digits));
    for (std::size_t i = 0; i < n; ++i) {
      BigInt g;
      mpz_gcd(g.get_mpz_t(), conv[i].p.get_mpz_t(), conv[i].q.get_mpz_t());
      CHECK(g == 1);
      BigInt q2 = i >= 2 ? conv[i - 2].q : BigInt(i == 1 ? 1 : 0);
      BigInt q1 = i >= 1 ? conv[i - 1].q : BigInt(1);
      CHECK(conv[i].q == digits[i] * q1 + q2);
    }

    FundInterval I = fundamental_interval(d);
    auto [hi, lo] = oracle::interval_ends(digits);
    CHECK(I.lo == lo);
    CHECK(I.hi == hi);
    CHECK(I.closed_left == (n % 2 == 0));
    BigInt qn = conv.back().q, qprev = n >= 2 ? conv[n - 2].q : BigInt(1);
    CHECK(I.length() == make_rational(BigInt(1), qn * (qn + qprev)));
    CHECK(I.length() >= make_rational(BigInt(1), 2 * qn * qn));
    CHECK(I.length() <= make_rational(BigInt(1), qn * qn));

    std::vector<BigInt> longer = digits;
    longer.emplace_back(std::uniform_int_distribution<unsigned long>(1, 1000)(rng));
    CHECK(I.contains(fundamental_interval(DigitSeq(longer))));

    for (std::size_t k = 1; k <= n; ++k) CHECK(verify_qn_bounds(d, k).all());
  }
}

TEST_CASE("round trip and shift") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    unsigned long den = std::uniform_int_distribution<unsigned long>(2, 1000000)(rng);
    unsigned long num = std::uniform_int_distribution<unsigned long>(1, den - 1)(rng);
    Rational x = make_rational(BigInt(num), BigInt(den));
    DigitSeq d = expand(x);
    CHECK(DigitSeq(oracle::floor_expand(x)) == d);
    auto conv = convergents(d);
    CHECK(make_rational(conv.back().p, conv.back().q) == x);
    CHECK(value(d) == x);
  }
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, 25)(rng);
    auto digits = oracle::random_digits(rng, n, 50);
    digits.back() += 1;  // keeps the tail value below 1
    DigitSeq d(digits);
    DigitSeq shifted = expand(gauss_map(value(d)));
    std::vector<BigInt> tail(digits.begin() + 1, digits.end());
    CHECK(shifted == DigitSeq(oracle::canonical(tail)));
  }
}
