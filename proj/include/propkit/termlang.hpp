#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "propkit/padic.hpp"
#include "propkit/series.hpp"

namespace propkit {

// Quantifier-free terms over the valued-ring signature with truncated
// division and named restricted series.
struct Term {
  enum class Kind { Var, IntLit, Add, Mul, Neg, Div, Ser };
  Kind kind = Kind::IntLit;
  int64_t value = 0;        // IntLit
  std::string name;         // Var, Ser
  std::vector<Term> args;   // Add/Mul: 2, Neg: 1, Div: 2, Ser: arity
};

struct Formula {
  enum class Kind { Eq, Pow, Not, And, Or };
  Kind kind = Kind::Eq;
  uint32_t n = 1;               // Pow
  std::vector<Term> terms;      // Eq: 2, Pow: 1
  std::vector<Formula> args;    // Not: 1, And/Or: 2
};

// Grammar (tokens are parentheses, integers and identifiers):
//   formula := atom | (not formula) | (and formula formula)
//            | (or formula formula)
//   atom    := (eq term term) | (pow NAT term)
//   term    := IDENT | INT | (add term term) | (mul term term)
//            | (neg term) | (D term term) | (ser IDENT term...)
Term parse_term(std::string_view text);
Formula parse_formula(std::string_view text);
// Dispatches on the head symbol; used by the CLI.
std::variant<Term, Formula> parse_any(std::string_view text);

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);

// Variable bindings share one ambient prime and precision.  Series are
// resolved by name against the builtin registry for that prime.
class Environment {
 public:
  Environment(uint64_t prime, uint32_t precision);
  uint64_t prime() const { return prime_; }
  uint32_t precision() const { return precision_; }
  void bind(const std::string& name, const PadicScalar& v);
  const PadicScalar* lookup(const std::string& name) const;

 private:
  uint64_t prime_;
  uint32_t precision_;
  std::map<std::string, PadicScalar> vars_;
};

// Evaluation is strict: unbound variables, unknown series and arity
// mismatches throw EvalError; truncated division and power predicates may
// throw InsufficientPrecision, which is an outcome of its own and is never
// coerced to a boolean.
PadicScalar eval_term(const Term& t, const Environment& env);
bool eval_formula(const Formula& f, const Environment& env);

}  // namespace propkit
