#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <vector>

#include "doctest.h"
#include "propkit/errors.hpp"
#include "propkit/levelview.hpp"
#include "propkit/uniform.hpp"

using namespace propkit;

namespace {
std::vector<UniformGroupModel> models6() {
  return {UniformGroupModel::abelian(3, 2, 6),
          UniformGroupModel::abelian(5, 2, 6),
          UniformGroupModel::congruence_gl(3, 2, 6),
          UniformGroupModel::congruence_sl2(3, 6)};
}
}  // namespace

TEST_CASE("spec strings and model shape") {
  UniformGroupModel A = UniformGroupModel::from_spec("abelian:3:2", 6);
  CHECK(A.prime() == 3);
  CHECK(A.dim() == 2);
  CHECK(A.precision() == 6);
  CHECK(A.spec_string() == "abelian:3:2");

  UniformGroupModel M = UniformGroupModel::from_spec("gl:3:2", 6);
  CHECK(M.dim() == 4);
  CHECK(M.matrix_size() == 2);
  CHECK(M.eps() == 1);

  UniformGroupModel S = UniformGroupModel::from_spec("sl2:3", 6);
  CHECK(S.dim() == 3);
  CHECK(S.spec_string() == "sl2:3");

  // p = 2 needs the deeper congruence level to stay uniform
  CHECK(UniformGroupModel::from_spec("gl:2:2", 6).eps() == 2);

  CHECK_THROWS_AS(UniformGroupModel::from_spec("abelian:4:2", 6), ModelMismatch);
  CHECK_THROWS_AS(UniformGroupModel::from_spec("frob:3:2", 6), ParseError);
  CHECK_THROWS_AS(UniformGroupModel::from_spec("abelian:3", 6), ParseError);
}

TEST_CASE("group axioms on random elements") {
  for (const auto& G : models6()) {
    std::mt19937_64 rng(42);
    GroupElement e = G.identity();
    for (int i = 0; i < 60; ++i) {
      GroupElement a = G.random_element(rng);
      GroupElement b = G.random_element(rng);
      GroupElement c = G.random_element(rng);
      CHECK(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
      CHECK(G.multiply(a, e) == a);
      CHECK(G.multiply(e, a) == a);
      CHECK(G.multiply(a, G.invert(a)) == e);
      CHECK(G.multiply(G.invert(a), a) == e);
    }
  }
}

TEST_CASE("coordinates are a bijection") {
  for (const auto& G : models6()) {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 80; ++i) {
      std::vector<uint64_t> codes(G.dim());
      for (auto& c : codes) c = rng() % G.coord_modulus();
      CHECK(G.decode(G.encode(codes)) == codes);
      GroupElement g = G.random_element(rng);
      CHECK(G.encode(G.decode(g)) == g);
    }
    // identity has all-zero coordinates
    CHECK(G.decode(G.identity()) == std::vector<uint64_t>(G.dim(), 0));
    // basis elements are the unit coordinate vectors
    for (uint32_t i = 0; i < G.dim(); ++i) {
      std::vector<uint64_t> want(G.dim(), 0);
      want[i] = 1;
      CHECK(G.decode(G.basis_element(i)) == want);
    }
  }
}

TEST_CASE("integer and scalar powers agree") {
  for (const auto& G : models6()) {
    std::mt19937_64 rng(44);
    for (int i = 0; i < 20; ++i) {
      GroupElement g = G.random_element(rng);
      GroupElement acc = G.identity();
      for (uint32_t e = 0; e <= 12; ++e) {
        CHECK(G.power_int(g, e) == acc);
        acc = G.multiply(acc, g);
      }
      uint64_t r = rng() % G.coord_modulus();
      PadicScalar lam(G.prime(), G.precision(), r);
      CHECK(G.power(g, lam) == G.power_int(g, r));
    }
  }
}

TEST_CASE("exponent laws") {
  for (const auto& G : models6()) {
    std::mt19937_64 rng(45);
    for (int i = 0; i < 40; ++i) {
      GroupElement g = G.random_element(rng);
      PadicScalar lam(G.prime(), G.precision(), rng() % G.coord_modulus());
      PadicScalar mu(G.prime(), G.precision(), rng() % G.coord_modulus());
      CHECK(G.power(g, lam + mu) ==
            G.multiply(G.power(g, lam), G.power(g, mu)));
      CHECK(G.power(G.power(g, lam), mu) == G.power(g, lam * mu));
    }
  }
}

TEST_CASE("omega: minimum coordinate valuation plus one") {
  UniformGroupModel A = UniformGroupModel::abelian(3, 2, 4);
  CHECK(A.omega(A.parse_element("x(3,9)")) == Valuation::finite(2));
  CHECK(A.omega(A.parse_element("x(1,9)")) == Valuation::finite(1));
  CHECK(A.omega(A.parse_element("x(0,27)")) == Valuation::finite(4));
  CHECK(A.omega(A.identity()) == Valuation::at_least(5));

  for (const auto& G : models6()) {
    std::mt19937_64 rng(46);
    for (int i = 0; i < 40; ++i) {
      GroupElement g = G.random_element(rng);
      Valuation om = G.omega(g);
      // congruence membership matches the omega level exactly
      uint32_t level = om.bound();
      for (uint32_t n = 1; n <= G.precision(); ++n) {
        CAPTURE(n);
        CHECK(G.in_level(g, n) == (n <= level));
      }
    }
  }
}

TEST_CASE("f_map expresses division in coordinates") {
  UniformGroupModel A = UniformGroupModel::abelian(3, 2, 6);
  std::vector<uint64_t> l{5, 7}, m{2, 7};
  // abelian case: plain coordinate subtraction
  CHECK(A.f_map(l, m) == std::vector<uint64_t>{3, 0});

  UniformGroupModel S = UniformGroupModel::congruence_sl2(3, 6);
  std::mt19937_64 rng(47);
  for (int i = 0; i < 20; ++i) {
    GroupElement x = S.random_element(rng), y = S.random_element(rng);
    CHECK(S.f_map(S.decode(x), S.decode(y)) ==
          S.decode(S.multiply(x, S.invert(y))));
  }
}

TEST_CASE("element print/parse round trip") {
  for (const auto& G : models6()) {
    std::mt19937_64 rng(48);
    for (int i = 0; i < 30; ++i) {
      GroupElement g = G.random_element(rng);
      CHECK(G.parse_element(G.print_coords(g)) == g);
    }
  }
  UniformGroupModel A = UniformGroupModel::abelian(3, 2, 6);
  CHECK(A.print_coords(A.parse_element("x(3,9)")) == "x(3,9)");
  CHECK_THROWS_AS(A.parse_element("x(3)"), ModelMismatch);
  CHECK_THROWS_AS(A.parse_element("x(3,9,1)"), ModelMismatch);
  CHECK_THROWS_AS(A.parse_element("y(3,9)"), ParseError);
  CHECK_THROWS_AS(A.parse_element("x(729,0)"), ModelMismatch);
}

TEST_CASE("level view mirrors the model") {
  for (const auto& G : models6()) {
    LevelView V(G, 3);
    CHECK(V.order() == checked_pow(G.prime(), G.dim() * 2));
    std::mt19937_64 rng(49);
    for (int i = 0; i < 40; ++i) {
      GroupElement a = G.random_element(rng), b = G.random_element(rng);
      uint64_t ca = V.code_of(a), cb = V.code_of(b);
      // packed-code arithmetic is the pushforward of the model's
      CHECK(V.mul(ca, cb) == V.code_of(G.multiply(a, b)));
      CHECK(V.inv(ca) == V.code_of(G.invert(a)));
      CHECK(V.pow(ca, 7) == V.code_of(G.power_int(a, 7)));
      CHECK(V.comm(ca, cb) ==
            V.code_of(G.multiply(
                G.invert(a),
                G.multiply(G.invert(b), G.multiply(a, b)))));
      // congruence level is omega clamped to the view
      uint32_t want = std::min<uint32_t>(G.omega(a).bound(), 3);
      CHECK(V.congruence_level(ca) == want);
    }
    CHECK(V.code_of(G.identity()) == V.identity_code());
    CHECK(V.congruence_level(V.identity_code()) == 3);
  }
}

TEST_CASE("level view closures") {
  UniformGroupModel A = UniformGroupModel::abelian(3, 2, 6);
  LevelView V(A, 3);  // (Z/9)^2
  // whole group from the basis
  auto all = V.closure(V.basis_codes(), 1000);
  CHECK(all.size() == 81);
  // a single generator of depth 1 gives a C9
  auto line = V.closure({V.code_of(A.basis_element(0))}, 1000);
  CHECK(line.size() == 9);
  CHECK_THROWS_AS(V.closure(V.basis_codes(), 80), BudgetExceeded);

  // nonabelian: normal closure strictly contains the plain closure
  UniformGroupModel S = UniformGroupModel::congruence_sl2(3, 6);
  LevelView W(S, 3);
  std::vector<uint64_t> gen{W.pow(W.code_of(S.basis_element(0)), 3)};
  auto plain = W.closure(gen, 1 << 20);
  auto normal = W.normal_closure(gen, 1 << 20);
  CHECK(plain.size() <= normal.size());
  // normal closure is conjugation-invariant under every basis generator
  for (uint64_t h : normal)
    for (uint32_t j = 0; j < S.dim(); ++j)
      CHECK(normal.count(W.conj(h, W.code_of(S.basis_element(j)))) == 1);
}

TEST_CASE("lower p-series layers through the level view") {
  // P_{n+1} = normal closure of the p-th powers and basis commutators of
  // the P_n generators; successive layer indices are p^d.
  for (const auto& G : models6()) {
    uint32_t m = 3;
    LevelView V(G, m);
    std::vector<uint64_t> gens = V.basis_codes();
    uint64_t expect = V.order();
    for (uint32_t n = 1; n < m; ++n) {
      std::vector<uint64_t> next;
      for (uint64_t s : gens) {
        next.push_back(V.pow(s, G.prime()));
        for (uint64_t b : V.basis_codes()) next.push_back(V.comm(s, b));
      }
      auto layer = V.normal_closure(next, expect);
      expect /= checked_pow(G.prime(), G.dim());
      CHECK(layer.size() == expect);
      // every member sits at congruence level >= n+1
      for (uint64_t h : layer) CHECK(V.congruence_level(h) >= n + 1);
      gens = next;
    }
  }
}
