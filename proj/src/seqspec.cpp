#include "apcf/seqspec.hpp"

#include <cctype>
#include <mutex>
#include <unordered_map>

namespace apcf {

std::string_view to_string(SeqKind kind) noexcept { return kind == SeqKind::Nu ? "nu" : "sigma"; }

Rational Expr::evaluate(const BigInt& n) const {
  switch (op) {
    case Op::Const: return Rational(value, 1);
    case Op::Var: return Rational(n, 1);
    case Op::Add: return lhs->evaluate(n) + rhs->evaluate(n);
    case Op::Sub: return lhs->evaluate(n) - rhs->evaluate(n);
    case Op::Mul: return lhs->evaluate(n) * rhs->evaluate(n);
    case Op::Div: {
      Rational d = rhs->evaluate(n);
      if (d == 0) throw Error(ErrorCode::NonIntegerValue, "division by zero at n = " + n.get_str());
      return lhs->evaluate(n) / d;
    }
    case Op::Pow: {
      Rational b = lhs->evaluate(n);
      BigInt num, den;
      mpz_pow_ui(num.get_mpz_t(), b.get_num_mpz_t(), power);
      mpz_pow_ui(den.get_mpz_t(), b.get_den_mpz_t(), power);
      return make_rational(num, den);
    }
    case Op::Floor: {
      Rational v = lhs->evaluate(n);
      BigInt r;
      mpz_fdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
      return Rational(r, 1);
    }
    case Op::Ceil: {
      Rational v = lhs->evaluate(n);
      BigInt r;
      mpz_cdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
      return Rational(r, 1);
    }
  }
  return Rational(0);
}

bool same_tree(const Expr& a, const Expr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Expr::Op::Const: return a.value == b.value;
    case Expr::Op::Var: return true;
    case Expr::Op::Pow: return a.power == b.power && same_tree(*a.lhs, *b.lhs);
    case Expr::Op::Floor:
    case Expr::Op::Ceil: return same_tree(*a.lhs, *b.lhs);
    default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

namespace {

std::string unparse(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Const: return e.value.get_str();
    case Expr::Op::Var: return "n";
    case Expr::Op::Add: return "(" + unparse(*e.lhs) + "+" + unparse(*e.rhs) + ")";
    case Expr::Op::Sub: return "(" + unparse(*e.lhs) + "-" + unparse(*e.rhs) + ")";
    case Expr::Op::Mul: return "(" + unparse(*e.lhs) + "*" + unparse(*e.rhs) + ")";
    case Expr::Op::Div: return "(" + unparse(*e.lhs) + "/" + unparse(*e.rhs) + ")";
    case Expr::Op::Pow: return "(" + unparse(*e.lhs) + "^" + std::to_string(e.power) + ")";
    case Expr::Op::Floor: return "floor(" + unparse(*e.lhs) + ")";
    case Expr::Op::Ceil: return "ceil(" + unparse(*e.lhs) + ")";
  }
  return {};
}

ExprPtr make_binary(Expr::Op op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  SequenceSpec parse_spec(std::optional<SeqKind> fallback) {
    skip_ws();
    std::optional<SeqKind> kind;
    std::size_t save = pos_;
    if (auto word = identifier(); word == "nu" || word == "sigma") {
      kind = word == "nu" ? SeqKind::Nu : SeqKind::Sigma;
      skip_ws();
      if (peek() == '=') {
        ++pos_;
        skip_ws();
        if (peek() == '[') return SequenceSpec(*kind, parse_table());
        // "nu = expr" is accepted as shorthand for "nu(n) = expr".
      } else {
        expect('(');
        skip_ws();
        if (identifier() != "n") fail("'n'");
        skip_ws();
        expect(')');
        skip_ws();
        expect('=');
      }
    } else {
      pos_ = save;
    }
    if (!kind) {
      if (!fallback) fail("'nu(n) =' or 'sigma(n) ='");
      kind = fallback;
    }
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("end of input");
    return SequenceSpec(*kind, std::move(e));
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = pos_ < s_.size() ? std::string(1, s_[pos_]) : std::string("end of input");
    throw ParseError(pos_, expected, found);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("'") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  BigInt integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("integer");
    return BigInt(s_.substr(start, pos_ - start), 10);
  }

  std::vector<BigInt> parse_table() {
    expect('[');
    std::vector<BigInt> values;
    skip_ws();
    while (true) {
      skip_ws();
      values.push_back(integer());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      break;
    }
    skip_ws();
    if (pos_ != s_.size()) fail("end of input");
    return values;
  }

  ExprPtr expr() {
    ExprPtr left = term();
    while (true) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return left;
      ++pos_;
      left = make_binary(c == '+' ? Expr::Op::Add : Expr::Op::Sub, left, term());
    }
  }

  ExprPtr term() {
    ExprPtr left = factor();
    while (true) {
      skip_ws();
      char c = peek();
      if (c != '*' && c != '/') return left;
      ++pos_;
      left = make_binary(c == '*' ? Expr::Op::Mul : Expr::Op::Div, left, factor());
    }
  }

  ExprPtr factor() {
    ExprPtr b = base();
    skip_ws();
    if (peek() != '^') return b;
    ++pos_;
    skip_ws();
    BigInt p = integer();
    if (!p.fits_ulong_p() || p > 4096) fail("exponent <= 4096");
    // Right associativity: b^p^q = b^(p^q), folded since exponents are literals.
    unsigned long power = p.get_ui();
    skip_ws();
    std::vector<unsigned long> chain{power};
    while (peek() == '^') {
      ++pos_;
      skip_ws();
      BigInt q = integer();
      if (!q.fits_ulong_p()) fail("small exponent");
      chain.push_back(q.get_ui());
      skip_ws();
    }
    BigInt folded = chain.back();
    for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) {
      BigInt next;
      if (folded > 64) fail("exponent <= 4096");
      mpz_ui_pow_ui(next.get_mpz_t(), *it, folded.get_ui());
      folded = next;
    }
    if (folded > 4096) fail("exponent <= 4096");
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Pow;
    e->power = folded.get_ui();
    e->lhs = std::move(b);
    return e;
  }

  ExprPtr base() {
    skip_ws();
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      auto e = std::make_shared<Expr>();
      e->op = Expr::Op::Const;
      e->value = integer();
      return e;
    }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      skip_ws();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      std::string word = identifier();
      if (word == "n") {
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::Var;
        return e;
      }
      if (word == "floor" || word == "ceil") {
        skip_ws();
        expect('(');
        ExprPtr inner = expr();
        skip_ws();
        expect(')');
        auto e = std::make_shared<Expr>();
        e->op = word == "floor" ? Expr::Op::Floor : Expr::Op::Ceil;
        e->lhs = std::move(inner);
        return e;
      }
      pos_ = start;
      fail("integer, 'n', '(', 'floor' or 'ceil'");
    }
    fail("integer, 'n', '(', 'floor' or 'ceil'");
  }
};

}  // namespace

struct SequenceSpec::Cache {
  std::mutex mutex;
  std::unordered_map<Index, BigInt> values;
};

SequenceSpec::SequenceSpec(SeqKind kind, ExprPtr expr)
    : kind_(kind), expr_(std::move(expr)), cache_(std::make_shared<Cache>()) {}

SequenceSpec::SequenceSpec(SeqKind kind, std::vector<BigInt> table)
    : kind_(kind), table_(std::move(table)), cache_(std::make_shared<Cache>()) {}

std::optional<Index> SequenceSpec::table_size() const {
  if (expr_) return std::nullopt;
  return static_cast<Index>(table_.size());
}

BigInt SequenceSpec::at(Index n) const {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "sequences are indexed from 1");
  if (!expr_) {
    if (n > table_.size())
      throw Error(ErrorCode::HorizonExceeded, "tabulated " + std::string(apcf::to_string(kind_)) +
                                                  " has " + std::to_string(table_.size()) +
                                                  " entries, asked for n = " + std::to_string(n));
    return table_[n - 1];
  }
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->values.find(n); it != cache_->values.end()) return it->second;
  }
  BigInt arg;
  mpz_import(arg.get_mpz_t(), 1, -1, sizeof(n), 0, 0, &n);
  Rational v = expr_->evaluate(arg);
  if (v.get_den() != 1)
    throw Error(ErrorCode::NonIntegerValue, std::string(apcf::to_string(kind_)) + "(" + std::to_string(n) +
                                                ") = " + v.get_str() + " is not an integer");
  BigInt out = v.get_num();
  std::lock_guard lock(cache_->mutex);
  if (cache_->values.size() < (1u << 22)) cache_->values.emplace(n, out);
  return out;
}

std::vector<BigInt> SequenceSpec::range(Index lo, Index hi) const {
  if (lo < 1 || hi < lo) throw Error(ErrorCode::IndexOutOfRange, "range needs 1 <= lo <= hi");
  std::vector<BigInt> out;
  out.reserve(hi - lo + 1);
  for (Index n = lo; n <= hi; ++n) out.push_back(at(n));
  return out;
}

std::string SequenceSpec::to_string() const {
  std::string head(apcf::to_string(kind_));
  if (!expr_) {
    std::string body;
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (i) body += ",";
      body += table_[i].get_str();
    }
    return head + " = [" + body + "]";
  }
  return head + "(n) = " + unparse(*expr_);
}

SequenceSpec parse_spec(const std::string& text, std::optional<SeqKind> fallback) {
  return Parser(text).parse_spec(fallback);
}

ValidationReport validate(const SequenceSpec& spec, Index horizon, Monotonicity mode) {
  if (horizon < 10) throw Error(ErrorCode::ParameterOutOfRange, "validation horizon must be >= 10");
  ValidationReport report;
  auto fail = [&](Index n, std::string why) {
    report.ok = false;
    report.first_violation = n;
    report.reason = std::move(why);
    return report;
  };
  const bool sigma = spec.kind() == SeqKind::Sigma;
  // sigma needs one extra value for the gap at n = horizon.
  const Index last = sigma ? horizon + 1 : horizon;
  if (auto size = spec.table_size(); size && *size < last)
    return fail(*size + 1, "table ends at n = " + std::to_string(*size) + ", horizon needs " +
                               std::to_string(last));
  BigInt prev;
  for (Index n = 1; n <= last; ++n) {
    BigInt v;
    try {
      v = spec.at(n);
    } catch (const Error& e) {
      return fail(n, e.what());
    }
    if (v < 1) return fail(n, "value " + v.get_str() + " is not positive");
    if (n > 1) {
      bool strict = sigma || mode == Monotonicity::Strict;
      if (strict ? !(prev < v) : v < prev)
        return fail(n, std::string(strict ? "not strictly increasing" : "decreasing") + " at n = " +
                           std::to_string(n));
      if (sigma && v - prev < BigInt(static_cast<unsigned long>(n - 1)))
        return fail(n - 1, "gap sigma(" + std::to_string(n) + ") - sigma(" + std::to_string(n - 1) +
                               ") = " + BigInt(v - prev).get_str() + " < " + std::to_string(n - 1));
    }
    prev = std::move(v);
  }
  return report;
}

std::vector<BigInt> eval_range(const SequenceSpec& spec, Index lo, Index hi) { return spec.range(lo, hi); }

}  // namespace apcf
