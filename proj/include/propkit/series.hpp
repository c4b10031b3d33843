#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "propkit/padic.hpp"

namespace propkit {

// A restricted power series over Z_p in `arity` variables: coefficients
// a_nu with v_p(a_nu) -> infinity as |nu| grows.  The decay is declared by
// a nondecreasing floor beta(k) <= v_p(a_nu) for all |nu| = k, which makes
// evaluation mod p^N a finite sum over |nu| < cutoff(N).
struct RestrictedSeries {
  std::string name;
  uint32_t arity = 1;
  uint64_t prime = 0;
  // Coefficient for a multi-index, produced at the requested precision.
  std::function<PadicScalar(const std::vector<uint32_t>& nu,
                            uint32_t precision)>
      coefficient;
  // Valuation floor by total degree; must be nondecreasing.
  std::function<uint32_t(uint32_t degree)> valuation_floor;

  // Least K with beta(k) >= precision for all k >= K.
  uint32_t cutoff(uint32_t precision) const;
};

// Builtin registry: "geometric" (sum p^k X^k), "expOne" (sum p^k X^k / k!,
// odd p only), "logOne" (log(1 + pX)).  Throws EvalError for unknown names
// or unsupported primes.
RestrictedSeries builtin_series(const std::string& name, uint64_t prime);
std::vector<std::string> builtin_series_names();

// Evaluate at args (arity-checked, primes must all match the series').
// Works at the minimum precision among the arguments; only terms of total
// degree < cutoff contribute.
PadicScalar eval_series(const RestrictedSeries& f,
                        const std::vector<PadicScalar>& args);

}  // namespace propkit
