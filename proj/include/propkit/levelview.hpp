#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "propkit/uniform.hpp"

namespace propkit {

// The finite quotient G/P_m of a uniform model, represented by raw residue
// codes: matrix entries mod p^(eps+m-1) (resp. coordinates mod p^(m-1) for
// abelian models) packed into a uint64.  All arithmetic happens directly on
// the packed residues, independently of the coordinate machinery, which
// makes this the substrate for oracle-side computations.
class LevelView {
 public:
  // m in [1, N+1] against the model's working precision N.
  LevelView(const UniformGroupModel& G, uint32_t m);

  const UniformGroupModel& model() const { return *G_; }
  uint32_t level() const { return m_; }
  uint64_t entry_modulus() const { return entry_mod_; }
  // p^(d (m-1)); the number of distinct codes of group elements.
  uint64_t order() const { return order_; }

  uint64_t code_of(const GroupElement& g) const;
  uint64_t identity_code() const;
  uint64_t mul(uint64_t a, uint64_t b) const;
  uint64_t inv(uint64_t a) const;
  uint64_t pow(uint64_t a, uint64_t e) const;
  uint64_t conj(uint64_t a, uint64_t g) const;  // g^-1 a g
  uint64_t comm(uint64_t a, uint64_t b) const;  // a^-1 b^-1 a b

  // Largest n in [1, m-1] with the code congruent to I at level n, or m
  // when the code is the identity ("omega >= m").
  uint32_t congruence_level(uint64_t a) const;

  // Closure of the generated subgroup, by right-multiplication search.
  std::unordered_set<uint64_t> closure(const std::vector<uint64_t>& gens,
                                       uint64_t cap) const;
  // Closure of the normal closure <gens>^G, conjugation by model basis.
  std::unordered_set<uint64_t> normal_closure(
      const std::vector<uint64_t>& gens, uint64_t cap) const;

  std::vector<uint64_t> basis_codes() const;

 private:
  std::vector<uint64_t> unpack(uint64_t code) const;
  uint64_t pack(const std::vector<uint64_t>& entries) const;

  const UniformGroupModel* G_;
  uint32_t m_;
  uint64_t entry_mod_;
  uint64_t order_;
  uint32_t slots_;  // d for abelian, matrix_size^2 otherwise
};

}  // namespace propkit
