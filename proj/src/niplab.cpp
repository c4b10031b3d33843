#include "propkit/niplab.hpp"

#include <algorithm>
#include <set>

#include "propkit/errors.hpp"
#include "propkit/padic.hpp"

namespace propkit {

namespace {

void validate_coset(const FiniteGroupTable& F, const ElemSet& K,
                    const ElemSet& C) {
  // K a subgroup containing the identity, C = g K for its first member g
  if (!K.test(0)) throw ModelMismatch("declared subgroup lacks identity");
  std::vector<uint16_t> km = K.members();
  if (closure_of(F, km) != K)
    throw ModelMismatch("declared subgroup is not closed");
  std::vector<uint16_t> cm = C.members();
  if (cm.empty()) throw ModelMismatch("empty coset");
  ElemSet built(F.order);
  for (uint16_t k : km) built.set(F.at(cm.front(), k));
  if (built != C)
    throw ModelMismatch("declared set is not a coset of its subgroup");
}

}  // namespace

DefinableFamily coset_family(const FiniteGroupTable& F,
                             const FamilySelector& sel,
                             const EnumOptions& opts) {
  DefinableFamily fam;
  fam.carrier = F.order;
  fam.point_labels = F.labels;
  std::set<std::vector<uint64_t>> seen;  // dedup cosets as sets
  switch (sel.kind) {
    case FamilySelector::Kind::AllSubgroupsUpToIndex: {
      fam.descriptor = "all cosets of subgroups of index <= " +
                       std::to_string(sel.max_index) + " in " + F.origin;
      std::vector<SubgroupInfo> subs =
          enumerate_subgroups(F, sel.max_index, opts);
      uint32_t si = 0;
      for (const SubgroupInfo& s : subs) {
        if (s.elems.count() == F.order) continue;  // exclude the whole group
        fam.subgroups.push_back(s.elems);
        fam.subgroup_labels.push_back("K" + std::to_string(si));
        std::vector<uint16_t> mem = s.elems.members();
        ElemSet covered(F.order);
        uint32_t ci = 0;
        for (uint32_t g = 0; g < F.order; ++g) {
          if (covered.test(g)) continue;
          ElemSet coset(F.order);
          for (uint16_t h : mem) {
            uint16_t e = F.at(static_cast<uint16_t>(g), h);
            coset.set(e);
            covered.set(e);
          }
          if (!seen.insert(coset.w).second) {
            ++ci;
            continue;
          }
          DefinableFamily::Coset c;
          c.label = "K" + std::to_string(si) + ".c" + std::to_string(ci++);
          c.subgroup = si;
          c.elems = std::move(coset);
          fam.sets.push_back(std::move(c));
        }
        ++si;
      }
      break;
    }
    case FamilySelector::Kind::WreathBaseCoordinates: {
      if (F.kind != TableKind::Wreath || F.wreath_base == 0)
        throw ModelMismatch("selector needs a wreath table");
      fam.descriptor = "base-coordinate subgroups of " + F.origin;
      for (uint32_t j = 0; j < F.wreath_base; ++j) {
        ElemSet B(F.order);
        for (uint32_t e = 0; e < F.order; ++e) {
          std::vector<uint64_t> dig = table_digits(F, static_cast<uint16_t>(e));
          if (dig[j] == 0 && dig[F.wreath_base] == 0) B.set(e);
        }
        validate_coset(F, B, B);
        fam.subgroups.push_back(B);
        fam.subgroup_labels.push_back("B" + std::to_string(j));
        DefinableFamily::Coset c;
        c.label = "B" + std::to_string(j);
        c.subgroup = j;
        c.elems = B;
        fam.sets.push_back(std::move(c));
      }
      break;
    }
    case FamilySelector::Kind::Explicit: {
      fam.descriptor = "explicit family on " + F.origin;
      for (const auto& it : sel.items) {
        validate_coset(F, it.subgroup, it.elems);
        uint32_t si = static_cast<uint32_t>(fam.subgroups.size());
        for (uint32_t k = 0; k < fam.subgroups.size(); ++k)
          if (fam.subgroups[k] == it.subgroup) {
            si = k;
            break;
          }
        if (si == fam.subgroups.size()) {
          fam.subgroups.push_back(it.subgroup);
          fam.subgroup_labels.push_back("K" + std::to_string(si));
        }
        if (!seen.insert(it.elems.w).second) continue;
        DefinableFamily::Coset c;
        c.label = it.label;
        c.subgroup = si;
        c.elems = it.elems;
        fam.sets.push_back(std::move(c));
      }
      break;
    }
  }
  for (const auto& c : fam.sets) {
    if (c.elems.n != F.order) throw ModelMismatch("coset carrier mismatch");
    validate_coset(F, fam.subgroups[c.subgroup], c.elems);
  }
  return fam;
}

// ---- shattering searches -----------------------------------------------

namespace {

struct PatternScan {
  // all 2^m membership patterns of `points` vs `sets` restricted as mode
  // demands; returns true when every pattern occurs, filling firsts with a
  // realizing index per pattern.
  static bool independence(const DefinableFamily& fam,
                           const std::vector<uint32_t>& chosen,
                           std::vector<int64_t>* firsts) {
    uint32_t m = static_cast<uint32_t>(chosen.size());
    uint64_t want = uint64_t{1} << m;
    std::vector<int64_t> first(want, -1);
    uint64_t found = 0;
    for (uint32_t e = 0; e < fam.carrier; ++e) {
      uint64_t mask = 0;
      for (uint32_t i = 0; i < m; ++i)
        if (fam.sets[chosen[i]].elems.test(e)) mask |= uint64_t{1} << i;
      if (first[mask] < 0) {
        first[mask] = e;
        if (++found == want) {
          if (firsts) *firsts = std::move(first);
          return true;
        }
      }
    }
    return false;
  }

  static bool vc(const DefinableFamily& fam,
                 const std::vector<uint32_t>& points,
                 std::vector<int64_t>* firsts) {
    uint32_t m = static_cast<uint32_t>(points.size());
    uint64_t want = uint64_t{1} << m;
    if (fam.sets.size() < want) return false;
    std::vector<int64_t> first(want, -1);
    uint64_t found = 0;
    for (uint32_t s = 0; s < fam.sets.size(); ++s) {
      uint64_t mask = 0;
      for (uint32_t i = 0; i < m; ++i)
        if (fam.sets[s].elems.test(points[i])) mask |= uint64_t{1} << i;
      if (first[mask] < 0) {
        first[mask] = s;
        if (++found == want) {
          if (firsts) *firsts = std::move(first);
          return true;
        }
      }
    }
    return false;
  }
};

struct DimSearch {
  const DefinableFamily& fam;
  bool vc_mode;
  uint32_t cap;
  uint64_t budget;
  uint64_t nodes = 0;
  bool truncated = false;
  std::vector<uint32_t> chosen, best;

  uint32_t universe() const {
    return vc_mode ? fam.carrier
                   : static_cast<uint32_t>(fam.sets.size());
  }

  bool feasible() {
    return vc_mode ? PatternScan::vc(fam, chosen, nullptr)
                   : PatternScan::independence(fam, chosen, nullptr);
  }

  void dfs() {
    if (chosen.size() > best.size()) best = chosen;
    if (chosen.size() >= cap) {
      truncated = true;  // cap reached: larger dimensions unexplored
      return;
    }
    uint32_t start = chosen.empty() ? 0 : chosen.back() + 1;
    for (uint32_t next = start; next < universe(); ++next) {
      if (++nodes > budget) {
        truncated = true;
        return;
      }
      chosen.push_back(next);
      if (feasible()) dfs();
      chosen.pop_back();
    }
  }
};

ShatterReport run_search(const DefinableFamily& fam, uint32_t cap,
                         uint64_t node_budget, bool vc_mode) {
  if (cap > 20) throw BudgetExceeded("dimension cap exceeds 20");
  ShatterReport rep;
  rep.mode = vc_mode ? "vc" : "independence";
  DimSearch s{fam, vc_mode, cap, node_budget, 0, false, {}, {}};
  s.dfs();
  rep.dimension = static_cast<uint32_t>(s.best.size());
  rep.search_capped = s.truncated;
  std::vector<int64_t> firsts;
  if (!s.best.empty()) {
    bool ok = vc_mode ? PatternScan::vc(fam, s.best, &firsts)
                      : PatternScan::independence(fam, s.best, &firsts);
    if (!ok) throw ModelMismatch("witness failed to replay");
    for (uint32_t idx : s.best)
      rep.witness_items.push_back(vc_mode ? fam.point_labels[idx]
                                          : fam.sets[idx].label);
    for (uint64_t mask = 0; mask < firsts.size(); ++mask) {
      int64_t at = firsts[mask];
      rep.witness_patterns.emplace_back(
          mask, vc_mode ? fam.sets[static_cast<size_t>(at)].label
                        : fam.point_labels[static_cast<size_t>(at)]);
    }
  }
  return rep;
}

}  // namespace

ShatterReport independence_dimension(const DefinableFamily& fam, uint32_t cap,
                                     uint64_t node_budget) {
  return run_search(fam, cap, node_budget, false);
}

ShatterReport vc_dimension(const DefinableFamily& fam, uint32_t cap,
                           uint64_t node_budget) {
  return run_search(fam, cap, node_budget, true);
}

// ---- TP2 array ---------------------------------------------------------

TP2Array tp2_array(const FiniteGroupTable& F, uint32_t rows, uint32_t cols) {
  // base coordinate scheme: wreath base block or cyclic product factors
  uint32_t base = 0;
  bool wreath = false;
  if (F.kind == TableKind::Wreath && F.wreath_base > 0) {
    base = F.wreath_base;
    wreath = true;
  } else if (F.kind == TableKind::DirectProduct &&
             !F.cyclic_factors.empty()) {
    base = static_cast<uint32_t>(F.cyclic_factors.size());
    for (uint64_t f : F.cyclic_factors)
      if (f < 2)
        throw PartitionInfeasible("cyclic factor too small for indicators");
  } else {
    throw PartitionInfeasible("table exposes no base decomposition");
  }
  if (rows == 0 || cols == 0)
    throw PartitionInfeasible("array shape must be positive");
  if (static_cast<uint64_t>(rows) * cols > base)
    throw PartitionInfeasible("base has only " + std::to_string(base) +
                              " coordinates for " + std::to_string(rows) +
                              "x" + std::to_string(cols) + " blocks");

  uint32_t ncoord = wreath ? base + 1 : base;  // +1: wreath shift digit
  TP2Array A;
  A.rows = rows;
  A.cols = cols;
  // digit cache
  std::vector<std::vector<uint64_t>> dig(F.order);
  for (uint32_t e = 0; e < F.order; ++e)
    dig[e] = table_digits(F, static_cast<uint16_t>(e));
  // indicator element index per coordinate
  std::vector<uint64_t> radix(ncoord, 1);
  if (wreath) {
    for (uint32_t i = 1; i < ncoord; ++i)
      radix[i] = radix[i - 1] * F.prime;
  } else {
    for (uint32_t i = 1; i < ncoord; ++i)
      radix[i] = radix[i - 1] * F.cyclic_factors[i - 1];
  }
  auto indicator = [&](uint32_t j) {
    return static_cast<uint16_t>(radix[j]);
  };

  for (uint32_t i = 0; i < rows; ++i) {
    std::vector<uint32_t> J;
    for (uint32_t t = 0; t < cols; ++t) J.push_back(i * cols + t);
    ElemSet S(F.order);
    for (uint32_t e = 0; e < F.order; ++e) {
      bool in = true;
      for (uint32_t j : J)
        if (dig[e][j] != 0) {
          in = false;
          break;
        }
      if (wreath && dig[e][base] != 0) in = false;
      if (in) S.set(e);
    }
    std::vector<ElemSet> rowsets;
    std::vector<std::string> rowlabels;
    std::vector<uint16_t> mem = S.members();
    for (uint32_t j : J) {
      ElemSet C(F.order);
      uint16_t g = indicator(j);
      for (uint16_t h : mem) C.set(F.at(h, g));
      rowsets.push_back(std::move(C));
      rowlabels.push_back("S" + std::to_string(i) + "." + F.labels[g]);
    }
    A.col_sets.push_back(std::move(J));
    A.row_subgroups.push_back(std::move(S));
    A.cosets.push_back(std::move(rowsets));
    A.coset_labels.push_back(std::move(rowlabels));
  }

  A.rows_disjoint = true;
  for (uint32_t i = 0; i < rows && A.rows_disjoint; ++i)
    for (uint32_t a = 0; a < cols && A.rows_disjoint; ++a)
      for (uint32_t b = a + 1; b < cols; ++b)
        if (A.cosets[i][a].intersect(A.cosets[i][b]).count() != 0) {
          A.rows_disjoint = false;
          break;
        }

  // every path: witness = sum of the chosen indicators
  A.paths_consistent = true;
  std::vector<uint32_t> path(rows, 0);
  for (;;) {
    uint64_t widx = 0;
    for (uint32_t i = 0; i < rows; ++i)
      widx += radix[A.col_sets[i][path[i]]];
    TP2Array::PathWitness w;
    w.path = path;
    w.element = static_cast<uint16_t>(widx);
    w.ok = true;
    for (uint32_t i = 0; i < rows; ++i)
      if (!A.cosets[i][path[i]].test(w.element)) {
        w.ok = false;
        break;
      }
    if (!w.ok) A.paths_consistent = false;
    A.path_witnesses.push_back(std::move(w));
    uint32_t i = rows;
    while (i-- > 0) {
      if (++path[i] < cols) break;
      path[i] = 0;
      if (i == 0) return A;
    }
  }
}

// ---- intersection width ------------------------------------------------

uint32_t baldwin_saxl_width(const std::vector<ElemSet>& subgroups,
                            std::vector<uint32_t>* witness,
                            uint64_t eval_budget) {
  size_t n = subgroups.size();
  if (n == 0) throw ModelMismatch("empty subgroup list");
  if (n > 24) throw BudgetExceeded("subgroup list longer than 24");
  for (const ElemSet& s : subgroups)
    if (s.n != subgroups[0].n)
      throw ModelMismatch("subgroup carriers differ");
  ElemSet total = subgroups[0];
  for (size_t i = 1; i < n; ++i) total = total.intersect(subgroups[i]);
  uint64_t evals = 0;
  for (uint32_t w = 1; w <= n; ++w) {
    std::vector<uint32_t> idx(w);
    for (uint32_t i = 0; i < w; ++i) idx[i] = i;
    for (;;) {
      if (++evals > eval_budget)
        throw BudgetExceeded("width search exceeded evaluation budget");
      ElemSet cur = subgroups[idx[0]];
      for (uint32_t i = 1; i < w; ++i)
        cur = cur.intersect(subgroups[idx[i]]);
      if (cur == total) {
        if (witness) *witness = idx;
        return w;
      }
      // next combination, lexicographic
      int32_t i = static_cast<int32_t>(w) - 1;
      while (i >= 0 &&
             idx[i] == n - w + static_cast<uint32_t>(i))
        --i;
      if (i < 0) break;
      ++idx[i];
      for (uint32_t j = static_cast<uint32_t>(i) + 1; j < w; ++j)
        idx[j] = idx[j - 1] + 1;
    }
  }
  if (witness) {
    witness->resize(n);
    for (uint32_t i = 0; i < n; ++i) (*witness)[i] = i;
  }
  return static_cast<uint32_t>(n);
}

}  // namespace propkit
