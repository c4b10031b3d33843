#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "propkit/fp.hpp"
#include "propkit/padic.hpp"

namespace propkit {

enum class GroupKind { Abelian, CongruenceGL, CongruenceSL2 };

// An element of a fixed model, owned representation only: the interpreting
// model supplies prime/precision context.  Abelian models store the d
// coordinates mod p^N; matrix models store row-major entries mod p^(N+eps).
struct GroupElement {
  std::vector<uint64_t> data;
  bool operator==(const GroupElement& o) const { return data == o.data; }
  bool operator!=(const GroupElement& o) const { return data != o.data; }
};

using CoordinateVector = std::vector<PadicScalar>;

// A uniformly powerful compact p-adic analytic group at working precision
// N, concretely one of:
//   abelian(p, d)      (Z_p^d, +)
//   gl(p, m)           1 + p^eps M_m(Z_p), the principal congruence kernel
//   sl2(p)             ker(SL_2(Z_p) -> SL_2(Z/p^eps))
// with eps = 1 for odd p and 2 for p = 2.  Elements carry d coordinates of
// the second kind: x = x_1^{l_1} ... x_d^{l_d} against the fixed basis, a
// bijection with Z_p^d at every finite level.  Matrix entries are tracked
// mod p^(N+eps) so that group words of length up to p^N stay exact in
// G/P_{N+1}.
class UniformGroupModel {
 public:
  static UniformGroupModel abelian(uint64_t p, uint32_t d,
                                   uint32_t precision);
  static UniformGroupModel congruence_gl(uint64_t p, uint32_t m,
                                         uint32_t precision);
  static UniformGroupModel congruence_sl2(uint64_t p, uint32_t precision);
  // "abelian:3:2", "gl:3:2" (matrix size), "sl2:3".
  static UniformGroupModel from_spec(const std::string& spec,
                                     uint32_t precision);
  // Key-value form: "kind=abelian p=3 d=2 precision=6".
  static UniformGroupModel from_config(const std::string& config);

  GroupKind kind() const { return kind_; }
  uint64_t prime() const { return p_; }
  // Number of coordinates (= analytic dimension of the model).
  uint32_t dim() const { return dim_; }
  uint32_t matrix_size() const { return mat_; }
  uint32_t eps() const { return eps_; }
  uint32_t precision() const { return N_; }
  uint64_t coord_modulus() const { return coord_mod_; }
  uint64_t elem_modulus() const { return elem_mod_; }
  std::string spec_string() const;
  std::string config_string() const;
  const GroupElement& basis_element(uint32_t i) const { return basis_[i]; }

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement invert(const GroupElement& a) const;
  GroupElement power_int(const GroupElement& g, uint64_t e) const;
  // g^lambda with lambda at precision >= N; exact in G/P_{N+1}.
  GroupElement power(const GroupElement& g, const PadicScalar& lambda) const;

  GroupElement encode(const std::vector<uint64_t>& codes) const;
  GroupElement encode(const CoordinateVector& coords) const;
  // Greedy digit peeling: at level n the layer of the off-multiplied
  // remainder is solved in F_p^d against the basis images.
  std::vector<uint64_t> decode(const GroupElement& g) const;
  CoordinateVector decode_scalars(const GroupElement& g) const;

  // omega(x) = min_i (v(l_i) + 1); AtLeast(N+1) for the identity.
  Valuation omega(const GroupElement& g) const;
  // Coordinates of x(lambda) x(mu)^{-1}.
  std::vector<uint64_t> f_map(const std::vector<uint64_t>& lambda,
                              const std::vector<uint64_t>& mu) const;

  // Membership in P_n at working precision, n in [1, N+1].
  bool in_level(const GroupElement& g, uint32_t n) const;
  // For g in P_n: the F_p^d layer coefficient vector, i.e. the digit
  // vector a with g = x(p^{n-1} a) mod P_{n+1}.
  fp::Vec layer_coeffs(const GroupElement& g, uint32_t n) const;

  GroupElement random_element(std::mt19937_64& rng) const;

  // "x(c1,...,cd)" round-trips through encode/decode; matrix models also
  // print and parse "[[...],[...]]" with entries mod p^(N+eps).
  std::string print_coords(const GroupElement& g) const;
  std::string print_raw(const GroupElement& g) const;
  GroupElement parse_element(const std::string& text) const;

  bool same_model(const UniformGroupModel& o) const;

 private:
  UniformGroupModel() = default;
  void init_matrix_basis();
  void validate_element(const GroupElement& g) const;
  std::vector<uint64_t> raw_layer(const GroupElement& g, uint32_t n) const;

  GroupKind kind_ = GroupKind::Abelian;
  uint64_t p_ = 3;
  uint32_t dim_ = 1;   // coordinate count
  uint32_t mat_ = 0;   // matrix size, 0 for abelian
  uint32_t eps_ = 1;
  uint32_t N_ = 1;
  uint64_t coord_mod_ = 3;  // p^N
  uint64_t elem_mod_ = 3;   // p^(N+eps) for matrix kinds, p^N otherwise
  std::vector<GroupElement> basis_;
  fp::Solver layer_solver_;  // raw layer -> basis coefficients
};

}  // namespace propkit
