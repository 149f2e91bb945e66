#include "apcf/cf_core.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace apcf {

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error(ErrorCode::OutOfDomain, "zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

BigInt parse_integer(const std::string& s, std::size_t offset) {
  if (!is_integer_literal(s)) throw ParseError(offset, "integer", s);
  return BigInt(s[0] == '+' ? s.substr(1) : s, 10);
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_integer(text, 0), 1);
  BigInt num = parse_integer(text.substr(0, slash), 0);
  BigInt den = parse_integer(text.substr(slash + 1), slash + 1);
  if (den == 0) throw ParseError(slash + 1, "non-zero denominator", "0");
  return make_rational(num, den);
}

Rational parse_decimal(const std::string& text) {
  if (text.find('/') != std::string::npos) return parse_rational(text);
  std::string mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mantissa = text.substr(0, e);
    std::string exp_text = text.substr(e + 1);
    if (!is_integer_literal(exp_text)) throw ParseError(e + 1, "exponent", exp_text);
    exponent = std::stol(exp_text);
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (std::size_t i = 0; i < mantissa.size(); ++i) {
    char c = mantissa[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && (c == '-' || c == '+'))) {
      digits.push_back(c);
      if (seen_point && std::isdigit(static_cast<unsigned char>(c))) ++frac_digits;
    } else {
      throw ParseError(i, "decimal number", text);
    }
  }
  BigInt num = parse_integer(digits, 0);
  BigInt scale;
  long shift = exponent - frac_digits;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  return shift >= 0 ? make_rational(num * scale, 1) : make_rational(num, scale);
}

std::string to_string(const Rational& x) { return x.get_str(10); }

DigitSeq::DigitSeq(std::vector<BigInt> digits) : digits_(std::move(digits)) {
  for (std::size_t i = 0; i < digits_.size(); ++i)
    if (digits_[i] < 1)
      throw Error(ErrorCode::NonPositiveDigit, "digit " + std::to_string(i + 1) + " is " +
                                                   digits_[i].get_str() + " (must be >= 1)");
}

DigitSeq::DigitSeq(std::initializer_list<long> digits) {
  std::vector<BigInt> v;
  v.reserve(digits.size());
  for (long d : digits) v.emplace_back(d);
  *this = DigitSeq(std::move(v));
}

const BigInt& DigitSeq::at(Index n) const {
  if (n < 1 || n > digits_.size())
    throw Error(ErrorCode::IndexOutOfRange, "position " + std::to_string(n) + " outside 1.." +
                                                std::to_string(digits_.size()));
  return digits_[n - 1];
}

void DigitSeq::push_back(BigInt digit) {
  if (digit < 1) throw Error(ErrorCode::NonPositiveDigit, "digit " + digit.get_str());
  digits_.push_back(std::move(digit));
}

DigitSeq DigitSeq::prefix(std::size_t n) const {
  if (n > digits_.size()) throw Error(ErrorCode::IndexOutOfRange, "prefix longer than sequence");
  DigitSeq out;
  out.digits_.assign(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

DigitSeq DigitSeq::drop_front(std::size_t count) const {
  if (count > digits_.size()) throw Error(ErrorCode::IndexOutOfRange, "drop past end");
  DigitSeq out;
  out.digits_.assign(digits_.begin() + static_cast<std::ptrdiff_t>(count), digits_.end());
  return out;
}

bool DigitSeq::is_strictly_increasing() const {
  for (std::size_t i = 1; i < digits_.size(); ++i)
    if (!(digits_[i - 1] < digits_[i])) return false;
  return true;
}

std::string DigitSeq::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i) out.push_back(',');
    out += digits_[i].get_str();
  }
  return out;
}

DigitSeq DigitSeq::parse(const std::string& text) {
  std::vector<BigInt> v;
  std::size_t start = 0;
  std::string body = text;
  if (!body.empty() && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
    start = 1;
  }
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    std::string token = body.substr(pos, comma - pos);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.erase(0, 1);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.pop_back();
    if (token.empty() && body.empty()) break;
    v.push_back(parse_integer(token, start + pos));
    pos = comma + 1;
  }
  return DigitSeq(std::move(v));
}

std::vector<Convergent> convergents(const DigitSeq& d) {
  if (d.empty()) throw Error(ErrorCode::EmptySequence, "convergents of an empty sequence");
  std::vector<Convergent> out;
  out.reserve(d.size());
  BigInt p_prev = 1, p = 0, q_prev = 0, q = 1;
  for (std::size_t i = 0; i < d.size(); ++i) {
    BigInt p_next = d[i] * p + p_prev;
    BigInt q_next = d[i] * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
    out.push_back({p, q, static_cast<long>(i + 1)});
  }
  return out;
}

BigInt continuant(std::span<const BigInt> digits) {
  BigInt q_prev = 0, q = 1;
  for (const auto& a : digits) {
    BigInt next = a * q + q_prev;
    q_prev = std::move(q);
    q = std::move(next);
  }
  return q;
}

namespace {

struct LastTwo {
  BigInt p, q, p_prev, q_prev;
};

LastTwo last_two(const DigitSeq& d) {
  if (d.empty()) throw Error(ErrorCode::EmptySequence, "fundamental interval of depth 0");
  LastTwo s{0, 1, 1, 0};
  for (const auto& a : d.digits()) {
    BigInt p_next = a * s.p + s.p_prev;
    BigInt q_next = a * s.q + s.q_prev;
    s.p_prev = std::move(s.p);
    s.q_prev = std::move(s.q);
    s.p = std::move(p_next);
    s.q = std::move(q_next);
  }
  return s;
}

}  // namespace

bool FundInterval::contains(const Rational& x) const {
  bool left_ok = closed_left ? lo <= x : lo < x;
  bool right_ok = closed_left ? x < hi : x <= hi;
  return left_ok && right_ok;
}

bool FundInterval::contains(const FundInterval& inner) const {
  bool left_ok = inner.lo > lo || (inner.lo == lo && (closed_left || !inner.closed_left));
  bool outer_right_closed = !closed_left;
  bool inner_right_closed = !inner.closed_left;
  bool right_ok = inner.hi < hi || (inner.hi == hi && (outer_right_closed || !inner_right_closed));
  return left_ok && right_ok;
}

bool FundInterval::intersects_closed(const Rational& a, const Rational& b) const {
  if (b < a) return false;
  bool left_ok = closed_left ? lo <= b : lo < b;
  bool right_ok = closed_left ? hi > a : hi >= a;
  return left_ok && right_ok;
}

FundInterval fundamental_interval(const DigitSeq& d) {
  LastTwo s = last_two(d);
  Rational a = make_rational(s.p, s.q);
  Rational b = make_rational(s.p + s.p_prev, s.q + s.q_prev);
  bool even = d.size() % 2 == 0;
  // Even depth: [p_n/q_n, (p_n+p_{n-1})/(q_n+q_{n-1})); odd depth mirrors it.
  if (even) return FundInterval{a, b, d.size(), true};
  return FundInterval{b, a, d.size(), false};
}

Rational interval_length(const DigitSeq& d) {
  LastTwo s = last_two(d);
  return make_rational(1, s.q * (s.q + s.q_prev));
}

Rational value(const DigitSeq& d) {
  LastTwo s = last_two(d);
  return make_rational(s.p, s.q);
}

Rational gauss_map(const Rational& x) {
  if (x <= 0 || x > 1) throw Error(ErrorCode::OutOfDomain, "gauss map needs 0 < x <= 1, got " + to_string(x));
  BigInt whole;
  mpz_fdiv_q(whole.get_mpz_t(), x.get_den_mpz_t(), x.get_num_mpz_t());
  return make_rational(x.get_den() - whole * x.get_num(), x.get_num());
}

DigitSeq expand(const Rational& x) {
  if (x <= 0 || x >= 1) throw Error(ErrorCode::OutOfDomain, "expand needs 0 < x < 1, got " + to_string(x));
  std::vector<BigInt> digits;
  BigInt num = x.get_num(), den = x.get_den();
  while (num != 0) {
    BigInt a, r;
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
    digits.push_back(std::move(a));
    den = std::move(num);
    num = std::move(r);
  }
  return DigitSeq(std::move(digits));
}

QnBoundsReport verify_qn_bounds(const DigitSeq& d, std::size_t k) {
  if (d.empty()) throw Error(ErrorCode::EmptySequence, "qn bounds of an empty sequence");
  const std::size_t n = d.size();
  if (k < 1 || k > n)
    throw Error(ErrorCode::IndexOutOfRange, "k = " + std::to_string(k) + " outside 1.." + std::to_string(n));

  QnBoundsReport report;
  LastTwo s = last_two(d);
  Rational len = make_rational(1, s.q * (s.q + s.q_prev));
  Rational q2 = Rational(s.q * s.q, 1);
  report.interval_bound = len * 2 * q2 >= 1 && len * q2 <= 1;

  BigInt prod_a = 1, prod_a1 = 1;
  for (const auto& a : d.digits()) {
    prod_a *= a;
    prod_a1 *= a + 1;
  }
  Rational lower = make_rational(1, 2 * prod_a1 * prod_a1);
  Rational upper = make_rational(1, prod_a * prod_a);
  report.product_bound = lower <= len && len <= upper;

  auto all = d.digits();
  BigInt qk = continuant(all.first(k));
  BigInt q_tail = continuant(all.subspan(k));
  report.ratio = make_rational(s.q, qk * q_tail);
  report.ratio_bound = report.ratio >= 1 && report.ratio <= 2;
  return report;
}

long double log_abs(const BigInt& x) {
  if (x == 0) throw Error(ErrorCode::OutOfDomain, "log of zero");
  BigInt m = abs(x);
  std::size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
  if (bits <= 64) {
    // Small values are exact in the 64-bit mantissa of long double.
    long double v = 0;
    std::uint64_t hi = 0;
    mpz_export(&hi, nullptr, -1, sizeof(hi), 0, 0, m.get_mpz_t());
    v = static_cast<long double>(hi);
    return std::log(v);
  }
  std::size_t shift = bits - 64;
  BigInt top = m >> static_cast<mp_bitcnt_t>(shift);
  std::uint64_t lead = 0;
  mpz_export(&lead, nullptr, -1, sizeof(lead), 0, 0, top.get_mpz_t());
  return std::log(static_cast<long double>(lead)) +
         static_cast<long double>(shift) * std::numbers::ln2_v<long double>;
}

long double log_abs(const Rational& x) {
  return log_abs(BigInt(x.get_num())) - log_abs(BigInt(x.get_den()));
}

}  // namespace apcf
