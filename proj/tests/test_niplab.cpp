#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <functional>
#include <vector>

#include "doctest.h"
#include "propkit/errors.hpp"
#include "propkit/finitep.hpp"
#include "propkit/niplab.hpp"
#include "propkit/uniform.hpp"

using namespace propkit;

namespace {

// Exhaustive shatter oracles over explicit bitsets, written independently
// of the library's pruned DFS: try every item combination of every size.
uint32_t brute_indep(const DefinableFamily& fam) {
  uint32_t n = fam.sets.size();
  uint32_t best = 0;
  std::vector<uint32_t> pick;
  auto shattered = [&]() {
    for (uint64_t mask = 0; mask < (uint64_t{1} << pick.size()); ++mask) {
      bool found = false;
      for (uint32_t x = 0; x < fam.carrier && !found; ++x) {
        bool ok = true;
        for (size_t i = 0; i < pick.size() && ok; ++i) {
          bool inside = fam.sets[pick[i]].elems.test(x);
          if (inside != (((mask >> i) & 1) != 0)) ok = false;
        }
        found = ok;
      }
      if (!found) return false;
    }
    return true;
  };
  std::function<void(uint32_t)> rec = [&](uint32_t from) {
    if (pick.size() > best && shattered()) best = pick.size();
    for (uint32_t i = from; i < n; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

uint32_t brute_vc(const DefinableFamily& fam) {
  uint32_t best = 0;
  std::vector<uint32_t> pick;
  auto shattered = [&]() {
    for (uint64_t mask = 0; mask < (uint64_t{1} << pick.size()); ++mask) {
      bool found = false;
      for (const auto& s : fam.sets) {
        bool ok = true;
        for (size_t i = 0; i < pick.size() && ok; ++i)
          if (s.elems.test(pick[i]) != (((mask >> i) & 1) != 0)) ok = false;
        if (ok) { found = true; break; }
      }
      if (!found) return false;
    }
    return true;
  };
  std::function<void(uint32_t)> rec = [&](uint32_t from) {
    if (pick.size() > best && shattered()) best = pick.size();
    for (uint32_t x = from; x < fam.carrier; ++x) {
      pick.push_back(x);
      rec(x + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST_CASE("coset families from subgroup enumeration") {
  UniformGroupModel A = UniformGroupModel::abelian(2, 2, 6);
  FiniteGroupTable F = build_quotient(A, 1);  // Klein group
  DefinableFamily fam = coset_family(F, FamilySelector::up_to_index(2));
  CHECK(fam.carrier == 4);
  CHECK(fam.subgroups.size() == 3);  // proper subgroups of index <= 2
  CHECK(fam.sets.size() == 6);       // two cosets each
  // declared subgroup data replays: every set is one of its cosets
  for (const auto& c : fam.sets) {
    const ElemSet& K = fam.subgroups[c.subgroup];
    CHECK(c.elems.count() == K.count());
  }
  // the whole group never appears
  for (const auto& K : fam.subgroups) CHECK(K.count() < F.order);
}

TEST_CASE("wreath base family") {
  FiniteGroupTable W = build_wreath(2, 1);
  DefinableFamily fam = coset_family(W, FamilySelector::wreath_base());
  CHECK(fam.sets.size() == 2);  // one subgroup per base coordinate
  for (const auto& c : fam.sets) CHECK(c.elems.count() == 2);
  // selector requires wreath metadata
  CHECK_THROWS_AS(
      coset_family(build_cyclic(6), FamilySelector::wreath_base()),
      ModelMismatch);
}

TEST_CASE("explicit selectors validate coset structure") {
  FiniteGroupTable K = direct_product(build_cyclic(2), build_cyclic(2));
  FamilySelector sel;
  sel.kind = FamilySelector::Kind::Explicit;
  FamilySelector::Item good;
  good.label = "H";
  good.subgroup = ElemSet(4);
  good.subgroup.set(0);
  good.subgroup.set(1);
  good.elems = good.subgroup;
  sel.items = {good};
  CHECK_NOTHROW(coset_family(K, sel));

  // a set that is not a coset of its declared subgroup
  FamilySelector::Item bad = good;
  bad.elems = ElemSet(4);
  bad.elems.set(0);
  bad.elems.set(2);
  sel.items = {bad};
  CHECK_THROWS_AS(coset_family(K, sel), ModelMismatch);

  // a declared subgroup that is not closed
  FamilySelector::Item open;
  open.label = "X";
  open.subgroup = ElemSet(4);
  open.subgroup.set(0);
  open.subgroup.set(1);
  open.subgroup.set(2);
  open.elems = open.subgroup;
  sel.items = {open};
  CHECK_THROWS_AS(coset_family(K, sel), ModelMismatch);
}

TEST_CASE("independence dimension against the exhaustive oracle") {
  UniformGroupModel A = UniformGroupModel::abelian(2, 2, 6);
  for (uint32_t level : {1u, 2u}) {
    FiniteGroupTable F = build_quotient(A, level);
    DefinableFamily fam = coset_family(F, FamilySelector::up_to_index(2));
    ShatterReport rep = independence_dimension(fam, 10);
    CHECK_FALSE(rep.search_capped);
    CHECK(rep.dimension == brute_indep(fam));
    CHECK(rep.dimension == 2);  // the frozen constant for this family
    CHECK(rep.mode == "independence");

    // witness replay by hand: every reported pattern point realizes its
    // in/out pattern over the witness sets
    REQUIRE(rep.witness_items.size() == rep.dimension);
    std::vector<const DefinableFamily::Coset*> chosen;
    for (const auto& label : rep.witness_items) {
      for (const auto& c : fam.sets)
        if (c.label == label) chosen.push_back(&c);
    }
    REQUIRE(chosen.size() == rep.dimension);
    for (const auto& [mask, pointlabel] : rep.witness_patterns) {
      uint32_t x = 0;
      while (x < fam.carrier && fam.point_labels[x] != pointlabel) ++x;
      REQUIRE(x < fam.carrier);
      for (uint32_t i = 0; i < rep.dimension; ++i)
        CHECK(chosen[i]->elems.test(x) == (((mask >> i) & 1) != 0));
    }
  }

  FiniteGroupTable W = build_wreath(2, 2);
  DefinableFamily base = coset_family(W, FamilySelector::wreath_base());
  ShatterReport rep = independence_dimension(base, 10);
  CHECK(rep.dimension == 4);
  CHECK(rep.dimension == brute_indep(base));
}

TEST_CASE("vc dimension against the exhaustive oracle") {
  UniformGroupModel A = UniformGroupModel::abelian(2, 2, 6);
  FiniteGroupTable F = build_quotient(A, 1);
  DefinableFamily fam = coset_family(F, FamilySelector::up_to_index(2));
  ShatterReport rep = vc_dimension(fam, 10);
  CHECK(rep.mode == "vc");
  CHECK_FALSE(rep.search_capped);
  CHECK(rep.dimension == brute_vc(fam));

  FiniteGroupTable W = build_wreath(2, 1);
  DefinableFamily base = coset_family(W, FamilySelector::wreath_base());
  ShatterReport r2 = vc_dimension(base, 10);
  CHECK(r2.dimension == brute_vc(base));
}

TEST_CASE("search caps are reported, not silently wrong") {
  FiniteGroupTable W = build_wreath(2, 2);
  DefinableFamily base = coset_family(W, FamilySelector::wreath_base());
  // cap smaller than the true dimension: capped flag set, value = cap
  ShatterReport rep = independence_dimension(base, 2);
  CHECK(rep.dimension == 2);
  CHECK(rep.search_capped);
  CHECK_THROWS_AS(independence_dimension(base, 21), BudgetExceeded);
  // tiny node budget truncates the search
  ShatterReport tiny = independence_dimension(base, 10, 2);
  CHECK(tiny.search_capped);
}

TEST_CASE("tp2 arrays") {
  TP2Array arr = tp2_array(build_wreath(2, 2), 2, 2);
  CHECK(arr.rows == 2);
  CHECK(arr.cols == 2);
  CHECK(arr.rows_disjoint);
  CHECK(arr.paths_consistent);
  REQUIRE(arr.path_witnesses.size() == 4);
  for (const auto& w : arr.path_witnesses) {
    CHECK(w.ok);
    // replay: the witness element lies in the chosen coset of every row
    for (uint32_t r = 0; r < arr.rows; ++r)
      CHECK(arr.cosets[r][w.path[r]].test(w.element));
  }
  // within a row, column cosets are pairwise disjoint
  for (uint32_t r = 0; r < arr.rows; ++r)
    for (uint32_t c1 = 0; c1 < arr.cols; ++c1)
      for (uint32_t c2 = c1 + 1; c2 < arr.cols; ++c2)
        CHECK(arr.cosets[r][c1].intersect(arr.cosets[r][c2]).count() == 0);

  TP2Array one = tp2_array(build_wreath(3, 1), 1, 3);
  CHECK(one.paths_consistent);
  CHECK(one.path_witnesses.size() == 3);

  // a cyclic-product base works too
  FiniteGroupTable P = direct_product(
      direct_product(build_cyclic(2), build_cyclic(2)), build_cyclic(2));
  CHECK(tp2_array(P, 1, 3).paths_consistent);

  // shape larger than the base cannot be partitioned
  CHECK_THROWS_AS(tp2_array(build_wreath(2, 1), 2, 2), PartitionInfeasible);
  CHECK_THROWS_AS(tp2_array(build_wreath(2, 2), 0, 2), PartitionInfeasible);
  // no base decomposition on a bare metacyclic table
  CHECK_THROWS_AS(tp2_array(build_metacyclic_g2(2, {3}, 2), 1, 2),
                  PartitionInfeasible);
}

TEST_CASE("intersection width") {
  FiniteGroupTable K = direct_product(build_cyclic(2), build_cyclic(2));
  auto subs = enumerate_subgroups(K, 2);
  std::vector<ElemSet> order2;
  for (const auto& s : subs)
    if (s.elems.count() == 2) order2.push_back(s.elems);
  REQUIRE(order2.size() == 3);

  // any two of the three distinct order-2 subgroups already meet in {e}
  std::vector<uint32_t> wit;
  CHECK(baldwin_saxl_width(order2, &wit) == 2);
  CHECK(wit.size() == 2);
  ElemSet meet = order2[wit[0]].intersect(order2[wit[1]]);
  for (const auto& s : order2) meet = meet.intersect(s);
  CHECK(meet.count() == 1);

  // a single subgroup has width 1; a redundant chain collapses too
  CHECK(baldwin_saxl_width({order2[0]}) == 1);
  CHECK(baldwin_saxl_width({order2[0], order2[0], order2[1]}) == 2);

  CHECK_THROWS_AS(baldwin_saxl_width({}), ModelMismatch);
  std::vector<ElemSet> many(25, order2[0]);
  CHECK_THROWS_AS(baldwin_saxl_width(many), BudgetExceeded);
}
