#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "propkit/errors.hpp"

namespace propkit {

// Overflow-checked p^n; throws BudgetExceeded past 2^63.
uint64_t checked_pow(uint64_t p, uint32_t n);
uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod(uint64_t a, uint64_t e, uint64_t m);
// Inverse of a unit mod m (m a prime power); throws ModelMismatch otherwise.
uint64_t invmod(uint64_t a, uint64_t m);
bool is_prime_u64(uint64_t p);

// Valuation of a truncated p-adic integer.  A nonzero residue has an exact
// valuation; a zero residue only bounds it from below by the precision.
class Valuation {
 public:
  static Valuation finite(uint32_t k) { return Valuation(true, k); }
  static Valuation at_least(uint32_t n) { return Valuation(false, n); }

  bool is_finite() const { return finite_; }
  // The exact value (finite case) or the lower bound (at_least case).
  uint32_t bound() const { return value_; }
  uint32_t finite_value() const;

  // Total order used for comparisons at shared precision: at_least(n)
  // compares as "n or larger"; two at_least values with equal bounds are
  // treated as equal.
  bool operator==(const Valuation& o) const {
    return finite_ == o.finite_ && value_ == o.value_;
  }
  // True when every p-adic integer compatible with *this has valuation >=
  // every one compatible with `o` is NOT decidable in general; this
  // comparison is the one used by truncated division: v(a) >= v(b) with b
  // of exact valuation.
  bool at_least_as_divisible_as(const Valuation& o) const;

  std::string to_string() const;

 private:
  Valuation(bool f, uint32_t v) : finite_(f), value_(v) {}
  bool finite_;
  uint32_t value_;
};

// A p-adic integer known modulo p^N: the coset residue + p^N Z_p.
// Arithmetic at mixed precision truncates to the smaller precision first;
// precision is never extended silently.
class PadicScalar {
 public:
  PadicScalar(uint64_t prime, uint32_t precision, uint64_t residue);
  static PadicScalar from_int(uint64_t prime, uint32_t precision,
                              int64_t value);
  static PadicScalar zero(uint64_t prime, uint32_t precision) {
    return PadicScalar(prime, precision, 0);
  }
  static PadicScalar one(uint64_t prime, uint32_t precision) {
    return PadicScalar(prime, precision, 1);
  }

  uint64_t prime() const { return prime_; }
  uint32_t precision() const { return precision_; }
  uint64_t residue() const { return residue_; }
  uint64_t modulus() const { return modulus_; }
  bool is_zero_residue() const { return residue_ == 0; }

  PadicScalar truncated(uint32_t new_precision) const;

  // Equality is structural: same prime, same precision, same residue.
  bool operator==(const PadicScalar& o) const {
    return prime_ == o.prime_ && precision_ == o.precision_ &&
           residue_ == o.residue_;
  }
  bool operator!=(const PadicScalar& o) const { return !(*this == o); }

  PadicScalar operator+(const PadicScalar& o) const;
  PadicScalar operator-(const PadicScalar& o) const;
  PadicScalar operator*(const PadicScalar& o) const;
  PadicScalar negated() const;

  // "p^N:r", e.g. "3^4:40".  parse() round-trips bit-exactly.
  std::string to_string() const;
  static PadicScalar parse(std::string_view text);

 private:
  uint64_t prime_;
  uint32_t precision_;
  uint64_t modulus_;
  uint64_t residue_;
};

Valuation valuation(const PadicScalar& a);

// Truncated division D(x, y) = x/y when v(x) >= v(y) and y != 0, else 0.
// The quotient of the first branch is only determined modulo p^(N - v(b)),
// so the result carries that reduced precision.  A zero residue for b means
// the y != 0 branch cannot be decided: InsufficientPrecision.
PadicScalar d_div(const PadicScalar& a, const PadicScalar& b);

// Unit inverse at full precision; ModelMismatch if a is not a unit.
PadicScalar unit_inverse(const PadicScalar& a);

// Does the coset a + p^N Z_p contain a nonzero n-th power?  Decided via the
// valuation (n must divide v(a)) and a brute-force table of n-th-power
// units modulo the fixed decision modulus p^(2*v_p(n)+1) (odd p), resp.
// 2^(2*v_2(n)+3); Hensel lifting makes the table conclusive.  When the unit
// part is known below the table modulus, all of its lifts are examined: if
// they agree the answer is still determined, otherwise the residue honestly
// fails to decide the predicate and InsufficientPrecision is raised.  A
// zero residue always raises.
bool is_nth_power(const PadicScalar& a, uint32_t n);

}  // namespace propkit
