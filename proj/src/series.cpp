#include "propkit/series.hpp"

namespace propkit {

uint32_t RestrictedSeries::cutoff(uint32_t precision) const {
  // valuation_floor is nondecreasing, so the first k reaching the target
  // bounds every later degree too.
  const uint32_t hard_cap = 100000;
  for (uint32_t k = 0;; ++k) {
    if (valuation_floor(k) >= precision) return k;
    if (k > hard_cap)
      throw BudgetExceeded("series cutoff scan exceeded " +
                           std::to_string(hard_cap) + " degrees");
  }
}

namespace {

// v_p(k!) by Legendre's formula.
uint64_t factorial_valuation(uint64_t k, uint64_t p) {
  uint64_t v = 0;
  while (k) {
    k /= p;
    v += k;
  }
  return v;
}

// k! / p^{v_p(k!)} mod m, for a prime-power modulus m over p.
uint64_t factorial_unit_part(uint64_t k, uint64_t p, uint64_t m) {
  uint64_t r = 1 % m;
  for (uint64_t i = 2; i <= k; ++i) {
    uint64_t x = i;
    while (x % p == 0) x /= p;
    r = mulmod(r, x % m, m);
  }
  return r;
}

// floor(log2(k)) for k >= 1.
uint32_t floor_log2(uint32_t k) {
  uint32_t r = 0;
  while (k >>= 1) ++r;
  return r;
}

PadicScalar coeff_geometric(uint64_t p, const std::vector<uint32_t>& nu,
                            uint32_t precision) {
  uint32_t k = nu[0];
  if (k >= precision) return PadicScalar::zero(p, precision);
  return PadicScalar(p, precision, checked_pow(p, k) %
                                       checked_pow(p, precision));
}

// p^k / k! for odd p; in Z_p with v_p >= ceil(k/2).
PadicScalar coeff_exp_one(uint64_t p, const std::vector<uint32_t>& nu,
                          uint32_t precision) {
  uint64_t k = nu[0];
  uint64_t m = checked_pow(p, precision);
  uint64_t ev = factorial_valuation(k, p);
  // v_p(p^k/k!) = k - ev >= 1 for k >= 1 and odd p.
  if (k - ev >= precision) return PadicScalar::zero(p, precision);
  uint64_t num = powmod(p, k - ev, m);
  uint64_t den = factorial_unit_part(k, p, m);
  return PadicScalar(p, precision, mulmod(num, invmod(den, m), m));
}

// (-1)^(k+1) p^k / k for k >= 1; constant term 0.
PadicScalar coeff_log_one(uint64_t p, const std::vector<uint32_t>& nu,
                          uint32_t precision) {
  uint64_t k = nu[0];
  if (k == 0) return PadicScalar::zero(p, precision);
  uint64_t m = checked_pow(p, precision);
  uint64_t kv = 0, ku = k;
  while (ku % p == 0) {
    ku /= p;
    ++kv;
  }
  if (k - kv >= precision) return PadicScalar::zero(p, precision);
  uint64_t r = mulmod(powmod(p, k - kv, m), invmod(ku % m, m), m);
  if (k % 2 == 0) r = (m - r) % m;
  return PadicScalar(p, precision, r);
}

}  // namespace

RestrictedSeries builtin_series(const std::string& name, uint64_t prime) {
  if (!is_prime_u64(prime))
    throw ModelMismatch("series prime must be prime: " +
                        std::to_string(prime));
  RestrictedSeries s;
  s.arity = 1;
  s.prime = prime;
  s.name = name;
  if (name == "geometric") {
    s.coefficient = [prime](const std::vector<uint32_t>& nu, uint32_t n) {
      return coeff_geometric(prime, nu, n);
    };
    s.valuation_floor = [](uint32_t k) { return k; };
    return s;
  }
  if (name == "expOne") {
    if (prime == 2)
      throw EvalError("expOne requires an odd prime (p^k/k! leaves Z_2)");
    s.coefficient = [prime](const std::vector<uint32_t>& nu, uint32_t n) {
      return coeff_exp_one(prime, nu, n);
    };
    // v_p(p^k/k!) = k - v_p(k!) >= ceil(k/2) for odd p.
    s.valuation_floor = [](uint32_t k) { return (k + 1) / 2; };
    return s;
  }
  if (name == "logOne") {
    s.coefficient = [prime](const std::vector<uint32_t>& nu, uint32_t n) {
      return coeff_log_one(prime, nu, n);
    };
    // v_p(p^k/k) = k - v_p(k) >= k - floor(log2 k), nondecreasing.
    s.valuation_floor = [](uint32_t k) {
      return k == 0 ? 0 : k - floor_log2(k);
    };
    return s;
  }
  throw EvalError("unknown series: " + name);
}

std::vector<std::string> builtin_series_names() {
  return {"geometric", "expOne", "logOne"};
}

namespace {

void accumulate_terms(const RestrictedSeries& f,
                      const std::vector<PadicScalar>& args, uint32_t precision,
                      uint64_t modulus, std::vector<uint32_t>& nu, size_t pos,
                      uint32_t degree_left, uint64_t partial_power,
                      uint64_t& acc) {
  if (pos == nu.size()) {
    PadicScalar c = f.coefficient(nu, precision);
    if (c.prime() != f.prime || c.precision() != precision)
      throw EvalError("series coefficient callback violated its contract");
    acc = (acc + mulmod(c.residue(), partial_power, modulus)) % modulus;
    return;
  }
  uint64_t x = args[pos].residue() % modulus;
  uint64_t xp = 1 % modulus;
  for (uint32_t e = 0; e <= degree_left; ++e) {
    nu[pos] = e;
    accumulate_terms(f, args, precision, modulus, nu, pos + 1,
                     degree_left - e, mulmod(partial_power, xp, modulus), acc);
    xp = mulmod(xp, x, modulus);
  }
}

}  // namespace

PadicScalar eval_series(const RestrictedSeries& f,
                        const std::vector<PadicScalar>& args) {
  if (args.size() != f.arity)
    throw EvalError("series " + f.name + " expects " +
                    std::to_string(f.arity) + " argument(s), got " +
                    std::to_string(args.size()));
  uint32_t precision = 0;
  for (const auto& a : args) {
    if (a.prime() != f.prime)
      throw ModelMismatch("series " + f.name + " is over p=" +
                          std::to_string(f.prime) + ", argument is over p=" +
                          std::to_string(a.prime()));
    precision = precision == 0 ? a.precision()
                               : std::min(precision, a.precision());
  }
  uint64_t modulus = checked_pow(f.prime, precision);
  uint32_t cut = f.cutoff(precision);
  // Sum over total degree < cut; everything beyond vanishes mod p^N.
  uint64_t acc = 0;
  std::vector<uint32_t> nu(f.arity, 0);
  if (cut > 0)
    accumulate_terms(f, args, precision, modulus, nu, 0, cut - 1, 1 % modulus,
                     acc);
  return PadicScalar(f.prime, precision, acc);
}

}  // namespace propkit
