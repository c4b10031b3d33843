// Acceptance gate: twelve timed checks covering the library end to end.
// Each prints exactly one PASS/FAIL line; the exit status is the number of
// failing checks.  Oracles here are deliberately independent of the code
// under test: plain modular loops, exhaustive closures, packed-code
// quotients and re-derived counts.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "propkit/errors.hpp"
#include "propkit/finitep.hpp"
#include "propkit/goodbasis.hpp"
#include "propkit/levelview.hpp"
#include "propkit/niplab.hpp"
#include "propkit/padic.hpp"
#include "propkit/series.hpp"
#include "propkit/termlang.hpp"
#include "propkit/uniform.hpp"

using namespace propkit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<UniformGroupModel> models6() {
  return {UniformGroupModel::abelian(3, 2, 6),
          UniformGroupModel::abelian(5, 2, 6),
          UniformGroupModel::congruence_gl(3, 2, 6),
          UniformGroupModel::congruence_sl2(3, 6)};
}

std::string plural(uint64_t n, const char* what) {
  return std::to_string(n) + " " + what;
}

// ---- 1: group axioms ------------------------------------------------------
Outcome c1_group_axioms() {
  uint64_t checked = 0;
  for (const auto& G : models6()) {
    std::mt19937_64 rng(101);
    GroupElement e = G.identity();
    for (int i = 0; i < 1000; ++i) {
      GroupElement a = G.random_element(rng);
      GroupElement b = G.random_element(rng);
      GroupElement c = G.random_element(rng);
      if (!(G.multiply(G.multiply(a, b), c) ==
            G.multiply(a, G.multiply(b, c))))
        return {false, "associativity broke in " + G.spec_string()};
      if (!(G.multiply(a, e) == a) || !(G.multiply(e, a) == a))
        return {false, "identity broke in " + G.spec_string()};
      if (!(G.multiply(a, G.invert(a)) == e) ||
          !(G.multiply(G.invert(a), a) == e))
        return {false, "inverses broke in " + G.spec_string()};
      ++checked;
    }
  }
  return {true, plural(checked, "random triples over 4 models")};
}

// ---- 2: coordinate bijection ---------------------------------------------
Outcome c2_coordinate_bijection() {
  uint64_t checked = 0;
  for (const auto& G : models6()) {
    std::mt19937_64 rng(102);
    for (int i = 0; i < 500; ++i) {
      std::vector<uint64_t> codes(G.dim());
      for (auto& c : codes) c = rng() % G.coord_modulus();
      if (G.decode(G.encode(codes)) != codes)
        return {false, "decode(encode) != id in " + G.spec_string()};
      GroupElement g = G.random_element(rng);
      if (!(G.encode(G.decode(g)) == g))
        return {false, "encode(decode) != id in " + G.spec_string()};
      ++checked;
    }
  }
  return {true, plural(checked, "round trips in both directions")};
}

// ---- 3: depth formula vs quotient series ---------------------------------
// The explicit multiplication table of G/P_5 would exceed any reasonable
// order budget (3^16 entries for the 2x2 matrix model), so the quotient is
// realized as a packed-code view and its lower p-series is grown lazily:
// each P_{n+1} is the normal closure of the p-th powers and basis
// commutators of the previous level's generating set.
Outcome c3_depth_vs_series() {
  for (const auto& G : models6()) {
    const uint32_t m = 5;
    LevelView V(G, m);
    std::vector<std::unordered_set<uint64_t>> series(m + 1);
    std::vector<uint64_t> gens = V.basis_codes();
    uint64_t expect = V.order();
    for (uint32_t n = 2; n <= m; ++n) {
      std::vector<uint64_t> next;
      for (uint64_t s : gens) {
        next.push_back(V.pow(s, G.prime()));
        for (uint64_t b : V.basis_codes()) next.push_back(V.comm(s, b));
      }
      expect /= checked_pow(G.prime(), G.dim());
      series[n] = V.normal_closure(next, expect);
      if (series[n].size() != expect)
        return {false, "series layer " + std::to_string(n) + " has " +
                           std::to_string(series[n].size()) + " of " +
                           std::to_string(expect) + " codes in " +
                           G.spec_string()};
      gens = std::move(next);
    }
    std::mt19937_64 rng(103);
    for (int i = 0; i < 200; ++i) {
      GroupElement g = G.random_element(rng);
      uint64_t code = V.code_of(g);
      uint32_t placement = 1;
      for (uint32_t n = 2; n <= m; ++n)
        if (series[n].count(code)) placement = n;
      uint32_t formula = std::min<uint32_t>(G.omega(g).bound(), m);
      if (placement != formula)
        return {false, G.spec_string() + ": formula says " +
                           std::to_string(formula) + ", series says " +
                           std::to_string(placement)};
    }
  }
  return {true, "200 elements per model against the packed-code series"};
}

// ---- 4: exponent laws -----------------------------------------------------
Outcome c4_exponent_laws() {
  uint64_t checked = 0;
  for (const auto& G : models6()) {
    std::mt19937_64 rng(104);
    for (int i = 0; i < 500; ++i) {
      GroupElement g = G.random_element(rng);
      PadicScalar lam(G.prime(), G.precision(), rng() % G.coord_modulus());
      PadicScalar mu(G.prime(), G.precision(), rng() % G.coord_modulus());
      if (!(G.power(g, lam + mu) ==
            G.multiply(G.power(g, lam), G.power(g, mu))))
        return {false, "additive law broke in " + G.spec_string()};
      if (!(G.power(G.power(g, lam), mu) == G.power(g, lam * mu)))
        return {false, "multiplicative law broke in " + G.spec_string()};
      ++checked;
    }
  }
  return {true, plural(checked, "random triples over 4 models")};
}

// ---- 5: good bases vs quotient oracle ------------------------------------
// One pure basis power per direction (this pins the subgroup and keeps
// every canonical level inside the window), then invertible mixing steps
// g_i <- g_i g_j, which never change the generated closed subgroup.
std::vector<GroupElement> spanning_gens(const UniformGroupModel& G,
                                        uint32_t maxlevel,
                                        std::mt19937_64& rng) {
  std::vector<GroupElement> gens;
  for (uint32_t i = 0; i < G.dim(); ++i)
    gens.push_back(G.power_int(G.basis_element(i),
                               checked_pow(G.prime(), rng() % maxlevel)));
  for (int step = 0; step < 8; ++step) {
    uint32_t i = rng() % gens.size(), j = rng() % gens.size();
    if (i != j) gens[i] = G.multiply(gens[i], gens[j]);
  }
  std::shuffle(gens.begin(), gens.end(), rng);
  return gens;
}

Outcome c5_good_bases() {
  uint64_t membership_checks = 0;
  for (const char* spec : {"abelian:3:2", "sl2:3"}) {
    UniformGroupModel G = UniformGroupModel::from_spec(spec, 6);
    std::mt19937_64 rng(105);
    for (int trial = 0; trial < 100; ++trial) {
      OpenSubgroup H =
          good_basis_from_generators(G, spanning_gens(G, 3, rng));
      uint32_t maxl = *std::max_element(H.levels.begin(), H.levels.end());
      if (maxl > 3)
        return {false, "generator depth escaped the level-3 window"};
      GoodBasisReport rep = is_good_basis(G, H.elements);
      if (!rep.ok)
        return {false, std::string(spec) + " trial " +
                           std::to_string(trial) +
                           ": certification failed: " + rep.failure};

      LevelView V(G, maxl + 1);
      std::vector<uint64_t> bcodes;
      for (const auto& h : H.elements) bcodes.push_back(V.code_of(h));
      auto S = V.closure(bcodes, V.order());
      if (subgroup_index(G, H) != V.order() / S.size())
        return {false, std::string(spec) +
                           ": index formula != quotient coset count"};

      uint64_t cm = checked_pow(G.prime(), maxl);
      std::vector<uint64_t> coords(G.dim(), 0);
      for (;;) {
        GroupElement g = G.encode(coords);
        bool in = subgroup_contains(G, H, g);
        bool oracle = S.count(V.code_of(g)) > 0;
        ++membership_checks;
        if (in != oracle)
          return {false, std::string(spec) + ": membership of " +
                             G.print_coords(g) + " disagrees with the " +
                             "quotient oracle"};
        uint32_t i = 0;
        while (i < G.dim() && ++coords[i] == cm) coords[i++] = 0;
        if (i == G.dim()) break;
      }
    }
  }
  return {true, plural(membership_checks, "carrier membership comparisons")};
}

// ---- 6: open subgroup counts ---------------------------------------------
Outcome c6_subgroup_counts() {
  struct Case {
    const char* spec;
    uint32_t k;
    std::vector<uint64_t> expect;  // counts for exponents 1..k
  };
  const std::vector<Case> cases = {
      {"abelian:2:2", 2, {3, 7}},
      {"abelian:3:2", 2, {4, 13}},
      {"sl2:3", 1, {13}},
  };
  for (const auto& c : cases) {
    UniformGroupModel G = UniformGroupModel::from_spec(c.spec, 6);
    // canonical-basis path
    std::vector<uint64_t> got(c.k + 1, 0);
    for (const auto& H : enumerate_open_subgroups(G, c.k))
      got[H.index_exponent()]++;
    // independent path: every subgroup of the finite quotient G/P_{k+1}
    // of index <= p^k pulls back to exactly one open subgroup
    FiniteGroupTable F = build_quotient(G, c.k);
    std::vector<uint64_t> brute(c.k + 1, 0);
    for (const auto& s :
         enumerate_subgroups(F, checked_pow(G.prime(), c.k))) {
      uint64_t index = F.order / s.elems.count();
      uint32_t e = 0;
      while (index > 1) { index /= G.prime(); ++e; }
      brute[e]++;
    }
    for (uint32_t e = 1; e <= c.k; ++e) {
      if (got[e] != c.expect[e - 1] || brute[e] != c.expect[e - 1])
        return {false, std::string(c.spec) + ": a_p^" + std::to_string(e) +
                           " basis-path " + std::to_string(got[e]) +
                           ", table-path " + std::to_string(brute[e]) +
                           ", expected " + std::to_string(c.expect[e - 1])};
    }
  }
  return {true, "(3,7), (4,13) and 13 from both enumerators"};
}

// ---- 7: independence dichotomy -------------------------------------------
uint32_t brute_independence(const DefinableFamily& fam) {
  uint32_t n = fam.sets.size(), best = 0;
  std::vector<uint32_t> pick;
  std::function<bool()> shat = [&]() {
    for (uint64_t mask = 0; mask < (uint64_t{1} << pick.size()); ++mask) {
      bool found = false;
      for (uint32_t x = 0; x < fam.carrier && !found; ++x) {
        bool ok = true;
        for (size_t i = 0; i < pick.size() && ok; ++i)
          if (fam.sets[pick[i]].elems.test(x) != (((mask >> i) & 1) != 0))
            ok = false;
        found = ok;
      }
      if (!found) return false;
    }
    return true;
  };
  std::function<void(uint32_t)> rec = [&](uint32_t from) {
    if (pick.size() > best && shat()) best = pick.size();
    for (uint32_t i = from; i < n; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

Outcome c7_dichotomy() {
  // growing side: base-coordinate families of C_2 wr C_{2^n}
  for (uint32_t n = 1; n <= 3; ++n) {
    DefinableFamily fam =
        coset_family(build_wreath(2, n), FamilySelector::wreath_base());
    ShatterReport rep = independence_dimension(fam, 10);
    if (rep.dimension < (uint32_t{1} << n))
      return {false, "wreath n=" + std::to_string(n) + " dimension " +
                         std::to_string(rep.dimension) + " < 2^n"};
  }
  // flat side: index-2 coset families of deeper and deeper quotients
  UniformGroupModel A = UniformGroupModel::abelian(2, 2, 6);
  uint32_t constant = 0;
  for (uint32_t n = 1; n <= 5; ++n) {
    DefinableFamily fam =
        coset_family(build_quotient(A, n), FamilySelector::up_to_index(2));
    ShatterReport rep = independence_dimension(fam, 10);
    if (rep.search_capped)
      return {false, "flat-side search hit its cap at n=" +
                         std::to_string(n)};
    if (n == 1) {
      constant = brute_independence(fam);  // exhaustive anchor
      if (rep.dimension != constant)
        return {false, "n=1 library value " +
                           std::to_string(rep.dimension) +
                           " != exhaustive value " +
                           std::to_string(constant)};
    }
    if (rep.dimension != constant)
      return {false, "dimension drifted to " +
                         std::to_string(rep.dimension) + " at n=" +
                         std::to_string(n)};
  }
  return {true, "growth 2,4,8 against a flat constant " +
                    std::to_string(constant)};
}

// ---- 8: inconsistent coset arrays ----------------------------------------
Outcome c8_tp2() {
  struct Case {
    uint64_t p;
    uint32_t n, rows, cols;
  };
  for (const Case& c : {Case{2, 2, 2, 2}, Case{3, 1, 1, 3}}) {
    TP2Array arr = tp2_array(build_wreath(c.p, c.n), c.rows, c.cols);
    if (!arr.rows_disjoint) return {false, "row blocks overlap"};
    if (!arr.paths_consistent) return {false, "a path had no witness"};
    uint64_t paths = 1;
    for (uint32_t r = 0; r < c.rows; ++r) paths *= c.cols;
    if (arr.path_witnesses.size() != paths)
      return {false, "expected " + std::to_string(paths) + " witnesses"};
    for (const auto& w : arr.path_witnesses) {
      if (!w.ok) return {false, "unreplayable witness"};
      for (uint32_t r = 0; r < c.rows; ++r)
        if (!arr.cosets[r][w.path[r]].test(w.element))
          return {false, "witness element escapes its chosen coset"};
    }
    for (uint32_t r = 0; r < c.rows; ++r)
      for (uint32_t i = 0; i < c.cols; ++i)
        for (uint32_t j = i + 1; j < c.cols; ++j)
          if (arr.cosets[r][i].intersect(arr.cosets[r][j]).count() != 0)
            return {false, "columns overlap inside a row"};
  }
  return {true, "2x2 and 1x3 arrays with every witness replayed"};
}

// ---- 9: generator count vs Frattini index --------------------------------
Outcome c9_burnside() {
  std::vector<FiniteGroupTable> groups;
  groups.push_back(build_wreath(2, 1));
  groups.push_back(build_wreath(2, 2));
  groups.push_back(build_wreath(2, 3));
  groups.push_back(build_wreath(3, 1));
  groups.push_back(build_cyclic(8));
  groups.push_back(build_cyclic(16));
  groups.push_back(build_cyclic(9));
  groups.push_back(build_cyclic(243));
  groups.push_back(direct_product(
      direct_product(build_cyclic(2), build_cyclic(2)), build_cyclic(2)));
  groups.push_back(direct_product(build_cyclic(4), build_cyclic(2)));
  groups.push_back(direct_product(build_cyclic(9), build_cyclic(3)));
  groups.push_back(direct_product(build_cyclic(4), build_cyclic(4)));
  UniformGroupModel A2 = UniformGroupModel::abelian(2, 2, 6);
  UniformGroupModel A3 = UniformGroupModel::abelian(3, 2, 6);
  UniformGroupModel A5 = UniformGroupModel::abelian(5, 2, 6);
  UniformGroupModel S3 = UniformGroupModel::congruence_sl2(3, 6);
  UniformGroupModel M3 = UniformGroupModel::congruence_gl(3, 2, 6);
  groups.push_back(build_quotient(A2, 1));
  groups.push_back(build_quotient(A2, 2));
  groups.push_back(build_quotient(A3, 1));
  groups.push_back(build_quotient(A3, 2));
  groups.push_back(build_quotient(A5, 1));
  groups.push_back(build_quotient(S3, 1));
  groups.push_back(build_quotient(S3, 2));
  groups.push_back(build_quotient(M3, 1));
  if (groups.size() != 20)
    return {false, "expected 20 groups, have " +
                       std::to_string(groups.size())};
  for (const auto& F : groups) {
    uint64_t p = 2;  // smallest prime factor of a prime-power order
    while (F.order % p != 0) ++p;
    uint32_t d = min_generators(F);
    uint64_t index = F.order / frattini(F).count();
    if (checked_pow(p, d) != index)
      return {false, F.origin + ": p^" + std::to_string(d) +
                         " != Frattini index " + std::to_string(index)};
  }
  return {true, "p^d(F) = |F:Phi(F)| on all 20 tables"};
}

// ---- 10: power predicate table -------------------------------------------
Outcome c10_power_predicate() {
  const uint64_t M5 = 243, M8 = 6561;
  uint64_t compared = 0;
  for (uint32_t n : {2u, 3u, 4u}) {
    // image of x -> x^n over a full period mod 3^8; membership decides
    // exact n-th-power-ness for every residue of valuation <= 4
    std::vector<bool> image(M8, false);
    for (uint64_t x = 1; x < M8; ++x)
      image[powmod(x, n, M8)] = true;
    for (uint64_t r = 1; r < M5; ++r) {
      // classify the 27 deep lifts of r
      bool any_true = false, any_false = false;
      for (uint64_t k = 0; k < M8 / M5; ++k) {
        if (image[r + M5 * k]) any_true = true;
        else any_false = true;
      }
      bool threw = false, got = false;
      try {
        got = is_nth_power(PadicScalar(3, 5, r), n);
      } catch (const InsufficientPrecision&) {
        threw = true;
      }
      ++compared;
      if (any_true && any_false) {
        if (!threw)
          return {false, "residue " + std::to_string(r) + " n=" +
                             std::to_string(n) +
                             ": mixed lifts but a definite answer"};
      } else if (threw) {
        return {false, "residue " + std::to_string(r) + " n=" +
                           std::to_string(n) +
                           ": decided lifts but no answer"};
      } else if (got != any_true) {
        return {false, "residue " + std::to_string(r) + " n=" +
                           std::to_string(n) + ": answer " +
                           (got ? "true" : "false") + ", lifts say " +
                           (any_true ? "true" : "false")};
      }
    }
    // the zero residue: the coset contains 3^5 (valuation 5, never a
    // perfect n-th power for n in {2,3,4}) and also 3^6 = (3^2)^3 =
    // (3^3)^2 resp. 3^8 = (3^2)^4, so the answer is genuinely mixed
    bool threw = false;
    try {
      is_nth_power(PadicScalar(3, 5, 0), n);
    } catch (const InsufficientPrecision&) {
      threw = true;
    }
    ++compared;
    if (!threw)
      return {false, "zero residue decided for n=" + std::to_string(n)};
  }
  return {true, plural(compared, "residues, zero mismatches")};
}

// ---- 11: term language round trip ----------------------------------------
Outcome c11_terms() {
  const std::vector<std::string> corpus = {
      "x", "y", "z", "0", "1", "-1", "42", "-42",
      "(add x y)", "(add x 1)", "(mul x y)", "(mul 2 (add x 1))",
      "(neg x)", "(neg (mul x y))", "(add (add x y) z)",
      "(mul (mul x x) x)", "(D x y)", "(D (mul x y) z)",
      "(D (add x 1) 2)", "(ser geometric x)", "(ser expOne x)",
      "(ser logOne x)", "(ser geometric (add x 1))",
      "(add (ser geometric x) (neg 1))", "(mul (ser expOne x) y)",
      "(neg (D x 2))", "(add -3 (mul x -5))",
      "(D (ser geometric x) (add 1 y))", "(mul (neg x) (neg y))",
      "(add (mul 7 x) (mul 11 y))",
      "(eq x y)", "(eq (add x y) z)", "(eq (mul x x) 1)",
      "(eq (ser geometric x) (add 1 (mul 3 x)))",
      "(pow 2 x)", "(pow 3 (add x 1))", "(pow 4 (mul x x))",
      "(not (eq x 0))", "(not (pow 2 y))",
      "(and (eq x x) (eq y y))", "(or (eq x 0) (not (eq x 0)))",
      "(and (pow 2 1) (pow 3 1))", "(or (pow 2 x) (pow 2 (neg x)))",
      "(not (and (eq x 1) (eq y 1)))",
      "(and (eq (D x 1) x) (eq (mul x 1) x))",
      "(or (not (pow 2 7)) (eq 7 7))",
      "(and (or (eq x 1) (eq x 2)) (not (eq y 0)))",
      "(eq (add x (neg x)) 0)",
      "(not (not (eq z z)))",
      "(and (eq (ser logOne 0) 0) (eq (ser expOne 0) 1))",
  };
  if (corpus.size() != 50)
    return {false, "corpus has " + std::to_string(corpus.size()) +
                       " entries, wanted 50"};
  Environment env(3, 6);
  env.bind("x", PadicScalar(3, 6, 5));
  env.bind("y", PadicScalar(3, 6, 42));
  env.bind("z", PadicScalar(3, 6, 243));
  for (const auto& text : corpus) {
    auto v = parse_any(text);
    std::string printed = std::holds_alternative<Term>(v)
                              ? print_term(std::get<Term>(v))
                              : print_formula(std::get<Formula>(v));
    if (printed != text)
      return {false, "print drifted: '" + text + "' -> '" + printed + "'"};
    auto v2 = parse_any(printed);
    std::string printed2 = std::holds_alternative<Term>(v2)
                               ? print_term(std::get<Term>(v2))
                               : print_formula(std::get<Formula>(v2));
    if (printed2 != printed)
      return {false, "second round trip drifted on '" + text + "'"};
    try {  // evaluation must be defined or raise a precision outcome
      if (std::holds_alternative<Term>(v)) eval_term(std::get<Term>(v), env);
      else eval_formula(std::get<Formula>(v), env);
    } catch (const InsufficientPrecision&) {
    } catch (const Error& e) {
      return {false, "evaluation failed on '" + text + "': " + e.what()};
    }
  }

  // series against bare partial sums at full precision
  auto pw = [](uint64_t b, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
  };
  RestrictedSeries geo = builtin_series("geometric", 3);
  RestrictedSeries expo = builtin_series("expOne", 3);
  RestrictedSeries logo = builtin_series("logOne", 3);
  std::mt19937_64 rng(111);
  for (int i = 0; i < 100; ++i) {
    uint64_t xr = rng() % 729;
    uint64_t acc = 0, xp = 1;
    for (uint32_t k = 0; k < 6; ++k) {
      acc = (acc + pw(3, k) * xp) % 729;
      xp = xp * xr % 729;
    }
    if (eval_series(geo, {PadicScalar(3, 6, xr)}).residue() != acc)
      return {false, "geometric partial sum mismatch at x=" +
                         std::to_string(xr)};

    uint64_t eacc = 0;
    xp = 1;
    for (uint32_t k = 0; k < 16; ++k) {
      uint64_t fact = 1;
      for (uint32_t j = 2; j <= k; ++j) fact *= j;
      uint32_t m = 0;
      uint64_t f = fact;
      while (f % 3 == 0) { f /= 3; ++m; }
      if (k < 6 + m) {
        uint64_t coeff = pw(3, k - m) * invmod(f % 729, 729) % 729;
        eacc = (eacc + coeff * xp) % 729;
      }
      xp = xp * xr % 729;
    }
    if (eval_series(expo, {PadicScalar(3, 6, xr)}).residue() != eacc)
      return {false, "expOne partial sum mismatch at x=" +
                         std::to_string(xr)};

    uint64_t lacc = 0;
    xp = xr;  // series starts at k = 1
    for (uint32_t k = 1; k < 16; ++k) {
      uint64_t kk = k;
      uint32_t a = 0;
      while (kk % 3 == 0) { kk /= 3; ++a; }
      if (k < 6 + a) {
        uint64_t coeff = pw(3, k - a) * invmod(kk % 729, 729) % 729;
        if (k % 2 == 0) coeff = (729 - coeff) % 729;
        lacc = (lacc + coeff * xp) % 729;
      }
      xp = xp * xr % 729;
    }
    if (eval_series(logo, {PadicScalar(3, 6, xr)}).residue() != lacc)
      return {false, "logOne partial sum mismatch at x=" +
                         std::to_string(xr)};
  }
  return {true, "50-entry corpus plus 100 partial-sum points per series"};
}

// ---- 12: CLI determinism --------------------------------------------------
struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  CliRun r;
  std::string cmd = std::string(PROPKIT_BIN) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

Outcome c12_cli() {
  struct Example {
    std::string args;
    int exit_code;
    std::string anchor;
  };
  const std::vector<Example> examples = {
      {"elt omega --group abelian:3:2 --precision 4 --elt \"x(3,9)\"", 0,
       "\n2\n"},
      {"sub count --group abelian:2:2 --max-index-exp 2", 0, "1,3\n2,7\n"},
      {"sub basis --group abelian:2:2 --gens \"x(0,2)\"", 1,
       "NotOpenAtPrecision"},
  };
  for (const auto& ex : examples) {
    CliRun first = run_cli(ex.args);
    if (first.exit_code != ex.exit_code)
      return {false, "'" + ex.args + "' exited " +
                         std::to_string(first.exit_code) + ", wanted " +
                         std::to_string(ex.exit_code)};
    if (first.out.find(ex.anchor) == std::string::npos)
      return {false, "'" + ex.args + "' output lost its anchor"};
    for (int run = 1; run < 3; ++run) {
      CliRun again = run_cli(ex.args);
      if (again.out != first.out || again.exit_code != first.exit_code)
        return {false, "'" + ex.args + "' drifted between runs"};
    }
  }
  return {true, "3 invocations x 3 runs, byte-identical"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "group axioms", 5, c1_group_axioms},
      {2, "coordinate bijection", 5, c2_coordinate_bijection},
      {3, "depth formula vs quotient series", 30, c3_depth_vs_series},
      {4, "exponent laws", 5, c4_exponent_laws},
      {5, "good bases vs quotient oracle", 120, c5_good_bases},
      {6, "open subgroup counts", 60, c6_subgroup_counts},
      {7, "independence dichotomy", 60, c7_dichotomy},
      {8, "inconsistent coset arrays", 10, c8_tp2},
      {9, "generator count vs Frattini index", 60, c9_burnside},
      {10, "power predicate table", 10, c10_power_predicate},
      {11, "term language round trip", 5, c11_terms},
      {12, "CLI determinism", 10, c12_cli},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("unhandled: ") + e.what()};
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    bool in_budget = secs <= c.budget_seconds;
    bool pass = o.pass && in_budget;
    if (!pass) ++failures;
    std::string note = o.detail;
    if (o.pass && !in_budget) note = "over time budget: " + note;
    std::printf("criterion %2d: %s (%.2fs / %.0fs) %s -- %s\n", c.id,
                pass ? "PASS" : "FAIL", secs, c.budget_seconds, c.title,
                note.c_str());
    std::fflush(stdout);
  }
  return failures;
}
