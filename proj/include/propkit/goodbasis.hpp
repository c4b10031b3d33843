#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "propkit/finitep.hpp"
#include "propkit/fp.hpp"
#include "propkit/uniform.hpp"

namespace propkit {

struct GoodBasisOptions {
  uint64_t product_budget = uint64_t{1} << 21;  // quotient product-set cap
  uint32_t random_samples = 200;                // full-precision spot checks
  uint64_t seed = 0x9e3779b9u;
};

struct GoodBasisReport {
  bool ok = false;
  std::string failure;            // empty when ok
  std::vector<uint32_t> levels;   // depth of each tuple entry, when defined
};

// Open subgroup handle: a certified basis tuple in canonical form, one
// element per coordinate, levels nondecreasing.  Canonical means: the
// leading-layer rows form a reduced echelon system (pivot columns cleared
// across levels) and every deeper digit vector of each element vanishes on
// the pivot columns available at that depth.  Two handles describe the
// same subgroup iff they are byte-identical.
struct OpenSubgroup {
  std::string group_spec;
  uint32_t precision = 0;
  std::vector<uint32_t> levels;
  std::vector<uint32_t> positions;
  std::vector<GroupElement> elements;
  std::vector<std::vector<uint64_t>> coords;  // coordinate codes per element
  std::vector<fp::Vec> rows;

  uint32_t index_exponent() const {
    uint32_t e = 0;
    for (uint32_t n : levels) e += n - 1;
    return e;
  }
};

GroupElement commutator(const UniformGroupModel& G, const GroupElement& a,
                        const GroupElement& b);

// Depth of g in the congruence chain: n in [1, precision], or precision+1
// when g is the identity at working precision.
uint32_t congruence_omega(const UniformGroupModel& G, const GroupElement& g);

// Sift-and-complete: canonical basis of the closed subgroup generated by
// gens.  Throws NotOpenAtPrecision when the generated subgroup has fewer
// than dim independent directions at this precision.
OpenSubgroup good_basis_from_generators(const UniformGroupModel& G,
                                        const std::vector<GroupElement>& gens);

// Certification of an arbitrary tuple: depth monotonicity, nontriviality,
// product-set closure and injectivity in the quotient at the deepest
// level + 1, and the depth formula on the full product enumeration plus
// seeded full-precision samples.
GoodBasisReport is_good_basis(const UniformGroupModel& G,
                              const std::vector<GroupElement>& tuple,
                              const GoodBasisOptions& opts = {});

bool subgroup_contains(const UniformGroupModel& G, const OpenSubgroup& H,
                       const GroupElement& g);

uint64_t subgroup_index(const UniformGroupModel& G, const OpenSubgroup& H);

bool same_subgroup(const UniformGroupModel& G, const OpenSubgroup& A,
                   const OpenSubgroup& B);

// All open subgroups of index <= p^k, canonical handles in deterministic
// order (index, then levels, positions, coordinates).
std::vector<OpenSubgroup> enumerate_open_subgroups(
    const UniformGroupModel& G, uint32_t k, uint64_t order_budget = 4096,
    const EnumOptions& opts = {});

std::string to_string(const OpenSubgroup& H);
OpenSubgroup parse_open_subgroup(const UniformGroupModel& G,
                                 const std::string& text);

}  // namespace propkit
