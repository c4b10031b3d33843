#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "propkit/uniform.hpp"

namespace propkit {

// Dense bitset over the carrier of a finite group table.
struct ElemSet {
  uint32_t n = 0;
  std::vector<uint64_t> w;

  ElemSet() = default;
  explicit ElemSet(uint32_t size) : n(size), w((size + 63) / 64, 0) {}
  static ElemSet full(uint32_t size);

  void set(uint32_t i) { w[i >> 6] |= (uint64_t{1} << (i & 63)); }
  void reset(uint32_t i) { w[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
  bool test(uint32_t i) const {
    return (w[i >> 6] >> (i & 63)) & 1;
  }
  uint32_t count() const;
  std::vector<uint16_t> members() const;

  ElemSet intersect(const ElemSet& o) const;
  bool contains_all(const ElemSet& o) const;  // o subset of this
  bool operator==(const ElemSet& o) const { return n == o.n && w == o.w; }
  bool operator!=(const ElemSet& o) const { return !(*this == o); }
  bool operator<(const ElemSet& o) const;  // size, then lexicographic
};

enum class TableKind { Quotient, Wreath, Metacyclic, DirectProduct };

// Finite group as an explicit multiplication table plus the structural
// metadata of its construction (used by labeling and by the definable-family
// builders).  Element 0 is always the identity.
struct FiniteGroupTable {
  TableKind kind = TableKind::DirectProduct;
  uint32_t order = 1;
  std::vector<uint16_t> mul;  // row-major: mul[a*order+b] = a*b
  std::vector<uint16_t> inv;
  std::vector<std::string> labels;
  std::string origin;

  uint64_t prime = 0;   // quotient / wreath / metacyclic
  // quotient meta
  std::string group_spec;
  uint32_t level = 0;
  uint32_t qdim = 0;
  // wreath meta: C_p wr C_{p^n}, base block size p^n
  uint32_t wreath_n = 0;
  uint32_t wreath_base = 0;
  // metacyclic meta
  uint32_t metacyclic_m = 0;
  std::vector<uint64_t> metacyclic_q;
  std::vector<uint64_t> metacyclic_u;
  // cyclic factor orders when the table is a direct product of cyclics
  std::vector<uint64_t> cyclic_factors;

  uint16_t at(uint16_t a, uint16_t b) const {
    return mul[static_cast<size_t>(a) * order + b];
  }
  uint16_t inverse(uint16_t a) const { return inv[a]; }
};

struct SubgroupInfo {
  ElemSet elems;
  std::vector<uint16_t> gens;
  uint32_t size() const { return elems.count(); }
};

struct EnumOptions {
  uint64_t subgroup_cap = 100000;
};

// ---- builders ----------------------------------------------------------

// Coordinate quotient of a uniform model: carrier = coordinate tuples mod
// p^level, in mixed-radix index order.  Verifies the expected uniform layer
// structure of the result before returning.
FiniteGroupTable build_quotient(const UniformGroupModel& G, uint32_t level,
                                uint64_t order_budget = 4096);

// C_p wr C_{p^n}: base functions f : Z/p^n -> Z/p with a cyclic shift on
// top.  Element index = sum f(i) p^i + s p^B with B = p^n.
FiniteGroupTable build_wreath(uint64_t p, uint32_t n,
                              uint64_t order_budget = 4096);

// (prod_i Z/q_i) : Z/p^m where the top generator acts on the Z/q_i factor
// by the smallest unit of multiplicative order exactly p^i mod q_i.
// Requires distinct primes q_i with p^i | q_i - 1 and m >= #factors.
FiniteGroupTable build_metacyclic_g2(uint64_t p,
                                     const std::vector<uint64_t>& qs,
                                     uint32_t m,
                                     uint64_t order_budget = 4096);

FiniteGroupTable build_cyclic(uint64_t n, uint64_t order_budget = 4096);
FiniteGroupTable direct_product(const FiniteGroupTable& A,
                                const FiniteGroupTable& B,
                                uint64_t order_budget = 4096);

// Induced table on a subgroup (members in index order become 0..k-1).
FiniteGroupTable subgroup_table(const FiniteGroupTable& F, const ElemSet& S);

// Structural consistency: identity, inverses, associativity (exhaustive up
// to order 256, seeded sampling above).  Throws on violation.
void validate_table(const FiniteGroupTable& F);

// ---- queries -----------------------------------------------------------

// Mixed-radix digits of an element index under the table's construction
// scheme (coordinates / base-plus-shift / factor residues).
std::vector<uint64_t> table_digits(const FiniteGroupTable& F, uint16_t idx);

uint32_t element_order(const FiniteGroupTable& F, uint16_t x);

ElemSet closure_of(const FiniteGroupTable& F,
                   const std::vector<uint16_t>& gens);

// Complete list of subgroups of index <= max_index, deterministic order
// (ascending size, then lexicographic carrier bitset).
std::vector<SubgroupInfo> enumerate_subgroups(const FiniteGroupTable& F,
                                              uint64_t max_index,
                                              const EnumOptions& opts = {});

// Descending chain F = P_1 >= P_2 >= ... down to the trivial subgroup,
// P_{n+1} = (P_n)^p [P_n, F].  Requires |F| to be a prime power.
std::vector<ElemSet> lower_p_series(const FiniteGroupTable& F);

// Intersection of all maximal subgroups.
ElemSet frattini(const FiniteGroupTable& F, const EnumOptions& opts = {});

uint32_t min_generators(const FiniteGroupTable& F,
                        const EnumOptions& opts = {});

// Max of min_generators over all subgroups.
uint32_t rank_of(const FiniteGroupTable& F, const EnumOptions& opts = {});

// Sylow subgroups of a nilpotent table, ascending prime order.
std::vector<std::pair<uint64_t, ElemSet>> sylow_decompose(
    const FiniteGroupTable& F);

std::string mul_table_csv(const FiniteGroupTable& F);

}  // namespace propkit
