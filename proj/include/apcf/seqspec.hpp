#pragma once

// Text definitions of the integer sequences nu_n and sigma_n.
//
// Grammar (whitespace-insensitive):
//   spec   := [ kind '(' 'n' ')' '=' ] expr | kind '=' '[' int (',' int)* ']'
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' unsigned)?          right-associative
//   base   := integer | 'n' | '(' expr ')' | ('floor'|'ceil') '(' expr ')'
// Division is exact rational; each evaluated value must be an integer.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apcf/cf_core.hpp"

namespace apcf {

enum class SeqKind { Nu, Sigma };

std::string_view to_string(SeqKind kind) noexcept;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Floor, Ceil };
  Op op = Op::Const;
  BigInt value;            // Const
  unsigned long power = 0; // Pow
  ExprPtr lhs;             // binary ops, Pow base, Floor/Ceil argument
  ExprPtr rhs;             // binary ops

  Rational evaluate(const BigInt& n) const;
};

bool same_tree(const Expr& a, const Expr& b);

/// A parsed, immutable sequence definition. Copies share one evaluation cache.
class SequenceSpec {
 public:
  SequenceSpec(SeqKind kind, ExprPtr expr);
  SequenceSpec(SeqKind kind, std::vector<BigInt> table);

  SeqKind kind() const noexcept { return kind_; }
  bool tabulated() const noexcept { return !expr_; }
  const ExprPtr& expression() const noexcept { return expr_; }
  // Last index available for a tabulated spec; none for expressions.
  std::optional<Index> table_size() const;

  // Exact value at n >= 1. Throws NonIntegerValue or HorizonExceeded.
  BigInt at(Index n) const;
  std::vector<BigInt> range(Index lo, Index hi) const;

  // Canonical text that parses back to the same tree.
  std::string to_string() const;

 private:
  struct Cache;
  SeqKind kind_;
  ExprPtr expr_;
  std::vector<BigInt> table_;
  std::shared_ptr<Cache> cache_;
};

// Parses a spec. When the text has no "nu(n) =" / "sigma(n) =" header,
// `fallback` decides the kind. Throws ParseError.
SequenceSpec parse_spec(const std::string& text, std::optional<SeqKind> fallback = std::nullopt);

struct ValidationReport {
  bool ok = true;
  std::optional<Index> first_violation;
  std::string reason;
};

enum class Monotonicity { Strict, NonDecreasing };

// Positivity and monotonicity on [1, horizon]; for sigma also the gap
// condition sigma_{n+1} - sigma_n >= n. Evaluation failures are reported,
// not thrown.
ValidationReport validate(const SequenceSpec& spec, Index horizon,
                          Monotonicity mode = Monotonicity::Strict);

std::vector<BigInt> eval_range(const SequenceSpec& spec, Index lo, Index hi);

}  // namespace apcf
