#include "propkit/padic.hpp"

#include <charconv>
#include <limits>
#include <vector>

namespace propkit {

uint64_t checked_pow(uint64_t p, uint32_t n) {
  const uint64_t limit = uint64_t(1) << 63;
  uint64_t r = 1;
  for (uint32_t i = 0; i < n; ++i) {
    if (r > limit / p)
      throw BudgetExceeded("p^N does not fit a 63-bit residue: " +
                           std::to_string(p) + "^" + std::to_string(n));
    r *= p;
  }
  return r;
}

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return uint64_t((unsigned __int128)a * b % m);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

uint64_t invmod(uint64_t a, uint64_t m) {
  // Extended Euclid; valid for any m >= 2 when gcd(a, m) = 1.
  int64_t t = 0, nt = 1;
  int64_t r = int64_t(m), nr = int64_t(a % m);
  while (nr != 0) {
    int64_t q = r / nr;
    int64_t tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1)
    throw ModelMismatch("not a unit mod " + std::to_string(m) + ": " +
                        std::to_string(a));
  if (t < 0) t += int64_t(m);
  return uint64_t(t);
}

bool is_prime_u64(uint64_t p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (uint64_t d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

uint32_t Valuation::finite_value() const {
  if (!finite_)
    throw Error("valuation is only bounded below (residue is zero)");
  return value_;
}

bool Valuation::at_least_as_divisible_as(const Valuation& o) const {
  // Caller guarantees `o` is finite (divisor with nonzero residue).
  if (!finite_) return value_ >= o.value_;  // at_least(N) with N > v(b)
  return value_ >= o.value_;
}

std::string Valuation::to_string() const {
  if (finite_) return std::to_string(value_);
  return ">=" + std::to_string(value_);
}

PadicScalar::PadicScalar(uint64_t prime, uint32_t precision, uint64_t residue)
    : prime_(prime), precision_(precision) {
  if (prime < 2) throw ModelMismatch("prime must be >= 2");
  if (precision < 1) throw ModelMismatch("precision must be >= 1");
  modulus_ = checked_pow(prime, precision);
  if (residue >= modulus_)
    throw ModelMismatch("residue " + std::to_string(residue) +
                        " out of range for modulus " +
                        std::to_string(modulus_));
  residue_ = residue;
}

PadicScalar PadicScalar::from_int(uint64_t prime, uint32_t precision,
                                  int64_t value) {
  uint64_t m = checked_pow(prime, precision);
  // Reduce a signed value into [0, p^N).
  __int128 v = value;
  v %= (__int128)m;
  if (v < 0) v += (__int128)m;
  return PadicScalar(prime, precision, uint64_t(v));
}

PadicScalar PadicScalar::truncated(uint32_t new_precision) const {
  if (new_precision > precision_)
    throw ModelMismatch("cannot extend precision " +
                        std::to_string(precision_) + " to " +
                        std::to_string(new_precision));
  if (new_precision == precision_) return *this;
  uint64_t m = checked_pow(prime_, new_precision);
  return PadicScalar(prime_, new_precision, residue_ % m);
}

namespace {

// Align two scalars to their common (minimum) precision.
std::pair<PadicScalar, PadicScalar> aligned(const PadicScalar& a,
                                            const PadicScalar& b) {
  if (a.prime() != b.prime())
    throw ModelMismatch("prime mismatch: " + std::to_string(a.prime()) +
                        " vs " + std::to_string(b.prime()));
  uint32_t n = std::min(a.precision(), b.precision());
  return {a.truncated(n), b.truncated(n)};
}

}  // namespace

PadicScalar PadicScalar::operator+(const PadicScalar& o) const {
  auto [x, y] = aligned(*this, o);
  uint64_t r = x.residue() + y.residue();
  if (r >= x.modulus()) r -= x.modulus();
  return PadicScalar(x.prime(), x.precision(), r);
}

PadicScalar PadicScalar::operator-(const PadicScalar& o) const {
  auto [x, y] = aligned(*this, o);
  uint64_t r = x.residue() + (x.modulus() - y.residue());
  if (r >= x.modulus()) r -= x.modulus();
  return PadicScalar(x.prime(), x.precision(), r);
}

PadicScalar PadicScalar::operator*(const PadicScalar& o) const {
  auto [x, y] = aligned(*this, o);
  return PadicScalar(x.prime(), x.precision(),
                     mulmod(x.residue(), y.residue(), x.modulus()));
}

PadicScalar PadicScalar::negated() const {
  uint64_t r = residue_ == 0 ? 0 : modulus_ - residue_;
  return PadicScalar(prime_, precision_, r);
}

std::string PadicScalar::to_string() const {
  return std::to_string(prime_) + "^" + std::to_string(precision_) + ":" +
         std::to_string(residue_);
}

PadicScalar PadicScalar::parse(std::string_view text) {
  auto fail = [&](size_t pos, const std::string& msg) -> size_t {
    throw ParseError(msg, pos);
  };
  size_t caret = text.find('^');
  if (caret == std::string_view::npos) fail(text.size(), "expected '^'");
  size_t colon = text.find(':', caret);
  if (colon == std::string_view::npos) fail(text.size(), "expected ':'");
  auto parse_u64 = [&](std::string_view s, size_t offset) {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      fail(offset, "expected unsigned integer");
    return v;
  };
  uint64_t prime = parse_u64(text.substr(0, caret), 0);
  uint64_t prec = parse_u64(text.substr(caret + 1, colon - caret - 1),
                            caret + 1);
  uint64_t residue = parse_u64(text.substr(colon + 1), colon + 1);
  if (prec == 0 || prec > std::numeric_limits<uint32_t>::max())
    fail(caret + 1, "precision out of range");
  return PadicScalar(prime, uint32_t(prec), residue);
}

Valuation valuation(const PadicScalar& a) {
  if (a.residue() == 0) return Valuation::at_least(a.precision());
  uint64_t r = a.residue();
  uint32_t v = 0;
  while (r % a.prime() == 0) {
    r /= a.prime();
    ++v;
  }
  return Valuation::finite(v);
}

PadicScalar d_div(const PadicScalar& a0, const PadicScalar& b0) {
  auto [a, b] = aligned(a0, b0);
  if (b.is_zero_residue())
    throw InsufficientPrecision(
        "divisor is indistinguishable from 0 at precision " +
        std::to_string(b.precision()));
  uint32_t vb = valuation(b).finite_value();
  Valuation va = valuation(a);
  if (!va.at_least_as_divisible_as(Valuation::finite(vb))) {
    // |a| > |b|: the truncated division is 0 by definition, and that branch
    // is decided exactly (both valuations are below the precision).
    return PadicScalar::zero(a.prime(), a.precision());
  }
  uint32_t np = a.precision() - vb;
  uint64_t m = checked_pow(a.prime(), np);
  uint64_t pvb = checked_pow(a.prime(), vb);
  uint64_t au = (a.residue() / pvb) % m;
  uint64_t bu = (b.residue() / pvb) % m;
  return PadicScalar(a.prime(), np, mulmod(au, invmod(bu, m), m));
}

PadicScalar unit_inverse(const PadicScalar& a) {
  if (a.residue() % a.prime() == 0)
    throw ModelMismatch("not a unit: " + a.to_string());
  return PadicScalar(a.prime(), a.precision(),
                     invmod(a.residue(), a.modulus()));
}

namespace {

uint32_t p_adic_valuation_of(uint64_t n, uint64_t p) {
  uint32_t v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

}  // namespace

bool is_nth_power(const PadicScalar& a, uint32_t n) {
  if (n < 1) throw ModelMismatch("power index must be >= 1");
  if (a.is_zero_residue())
    throw InsufficientPrecision(
        "cannot test n-th power of a residue indistinguishable from 0");
  uint64_t p = a.prime();
  uint32_t va = valuation(a).finite_value();
  if (va % n != 0) return false;  // every member of the coset has valuation va

  // Unit part, known modulo p^(N - va).
  uint32_t known = a.precision() - va;
  uint64_t unit = a.residue() / checked_pow(p, va);

  // Decision exponent: 2 v_p(n) + 1 for odd p, 2 v_2(n) + 3 for p = 2.
  // Hensel: any unit congruent mod p^dec to an n-th power is one.
  uint32_t t = p_adic_valuation_of(n, p);
  uint32_t dec = (p == 2) ? 2 * t + 3 : 2 * t + 1;
  uint64_t dec_mod = checked_pow(p, dec);

  // n-th powers of units modulo the decision modulus, by brute force.
  std::vector<bool> table(dec_mod, false);
  for (uint64_t w = 1; w < dec_mod; ++w) {
    if (w % p == 0) continue;
    table[powmod(w, n, dec_mod)] = true;
  }

  if (known >= dec) return table[unit % dec_mod];

  // The unit is known only below the decision modulus.  Its coset splits
  // into p^(dec - known) classes there; the answer is determined exactly
  // when they agree.
  uint64_t known_mod = checked_pow(p, known);
  uint64_t base = unit % known_mod;
  bool any = false, all = true;
  for (uint64_t k = 0; k < dec_mod / known_mod; ++k) {
    uint64_t lift = base + k * known_mod;
    if (lift % p == 0) continue;  // cannot happen: unit mod p is fixed
    bool hit = table[lift];
    any = any || hit;
    all = all && hit;
  }
  if (any != all)
    throw InsufficientPrecision(
        "unit part known mod " + std::to_string(p) + "^" +
        std::to_string(known) + " does not determine n-th-power membership");
  return any;
}

}  // namespace propkit
