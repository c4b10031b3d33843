#include "propkit/goodbasis.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include "propkit/errors.hpp"
#include "propkit/levelview.hpp"
#include "propkit/padic.hpp"

namespace propkit {

GroupElement commutator(const UniformGroupModel& G, const GroupElement& a,
                        const GroupElement& b) {
  return G.multiply(G.multiply(G.invert(a), G.invert(b)), G.multiply(a, b));
}

uint32_t congruence_omega(const UniformGroupModel& G, const GroupElement& g) {
  uint32_t n = 1;
  while (n <= G.precision() && G.in_level(g, n + 1)) ++n;
  return n;
}

namespace {

bool vec_zero(const fp::Vec& v) {
  for (uint32_t x : v)
    if (x) return false;
  return true;
}

struct Pivot {
  uint32_t level = 0;
  uint32_t pos = 0;
  GroupElement h;
  fp::Vec row;
};

// Sifting state: one pivot per coordinate position, rows normalized with
// leading coefficient 1 at the pivot position.
struct Sifter {
  const UniformGroupModel& G;
  std::map<uint32_t, Pivot> by_pos;
  bool changed = false;

  explicit Sifter(const UniformGroupModel& g) : G(g) {}

  GroupElement shifted_power(const Pivot& pv, uint32_t n, uint64_t c) const {
    uint64_t e = c * checked_pow(G.prime(), n - pv.level);
    return G.power_int(pv.h, e);
  }

  void sift(GroupElement g) {
    uint64_t p = G.prime();
    for (;;) {
      uint32_t n = congruence_omega(G, g);
      if (n > G.precision()) return;  // absorbed into the current span
      fp::Vec r = G.layer_coeffs(g, n);
      GroupElement corr = G.identity();
      bool any = false;
      for (auto& [pos, pv] : by_pos) {
        if (pv.level > n) continue;
        uint64_t c = r[pos];
        if (c == 0) continue;
        for (size_t t = 0; t < r.size(); ++t)
          r[t] = fp::sub(r[t], fp::mul(static_cast<uint32_t>(c), pv.row[t], p),
                         p);
        corr = G.multiply(corr, shifted_power(pv, n, c));
        any = true;
      }
      if (any) g = G.multiply(G.invert(corr), g);
      if (vec_zero(r)) continue;  // depth strictly increased; keep sifting
      uint32_t j = 0;
      while (r[j] == 0) ++j;
      uint64_t s = invmod(r[j], p);
      if (s != 1) {
        g = G.power_int(g, s);
        for (auto& t : r) t = fp::mul(t, static_cast<uint32_t>(s), p);
      }
      auto it = by_pos.find(j);
      if (it == by_pos.end()) {
        by_pos.emplace(j, Pivot{n, j, g, r});
        changed = true;
        return;
      }
      if (it->second.level <= n)
        throw LayerSolveFailure("pivot collision during sifting");
      GroupElement displaced = it->second.h;
      it->second = Pivot{n, j, g, r};
      changed = true;
      sift(displaced);
      return;
    }
  }

  void complete() {
    uint64_t p = G.prime();
    for (;;) {
      changed = false;
      std::vector<GroupElement> hs;
      for (auto& [pos, pv] : by_pos) hs.push_back(pv.h);
      for (size_t i = 0; i < hs.size(); ++i) {
        sift(G.power_int(hs[i], p));
        for (size_t j = 0; j < hs.size(); ++j) {
          if (i == j) continue;
          sift(commutator(G, hs[i], hs[j]));
          sift(G.multiply(G.multiply(G.invert(hs[j]), hs[i]), hs[j]));
        }
      }
      if (!changed) break;
    }
  }
};

std::vector<uint32_t> digit_vector(const UniformGroupModel& G,
                                   const GroupElement& g, uint32_t m) {
  std::vector<uint64_t> codes = G.decode(g);
  uint64_t shift = checked_pow(G.prime(), m - 1);
  std::vector<uint32_t> v(codes.size());
  for (size_t i = 0; i < codes.size(); ++i)
    v[i] = static_cast<uint32_t>((codes[i] / shift) % G.prime());
  return v;
}

OpenSubgroup canonicalize(const UniformGroupModel& G, Sifter& S) {
  uint32_t d = G.dim();
  uint64_t p = G.prime();
  if (S.by_pos.size() != d)
    throw NotOpenAtPrecision(
        "generators span " + std::to_string(S.by_pos.size()) + " of " +
        std::to_string(d) + " directions at precision " +
        std::to_string(G.precision()));
  std::vector<Pivot> piv;
  for (auto& [pos, pv] : S.by_pos) piv.push_back(pv);
  std::sort(piv.begin(), piv.end(), [](const Pivot& a, const Pivot& b) {
    return a.level != b.level ? a.level < b.level : a.pos < b.pos;
  });

  // canonical rows: per level block, clear earlier pivot columns, then
  // reduced echelon within the block
  std::vector<fp::Vec> crows;
  std::vector<uint32_t> clevels, cpos;
  size_t i = 0;
  while (i < piv.size()) {
    size_t j = i;
    while (j < piv.size() && piv[j].level == piv[i].level) ++j;
    std::vector<fp::Vec> block;
    for (size_t k = i; k < j; ++k) {
      fp::Vec r = piv[k].row;
      for (size_t e = 0; e < crows.size(); ++e) {
        uint32_t c = r[cpos[e]];
        if (c)
          for (uint32_t t = 0; t < d; ++t)
            r[t] = fp::sub(r[t], fp::mul(c, crows[e][t], p), p);
      }
      block.push_back(r);
    }
    std::sort(block.begin(), block.end(), [](const fp::Vec& a,
                                             const fp::Vec& b) {
      size_t la = 0, lb = 0;
      while (la < a.size() && a[la] == 0) ++la;
      while (lb < b.size() && b[lb] == 0) ++lb;
      return la < lb;
    });
    for (size_t k = 0; k < block.size(); ++k) {
      size_t lead = 0;
      while (lead < d && block[k][lead] == 0) ++lead;
      if (lead == d)
        throw LayerSolveFailure("degenerate layer row in canonical form");
      uint32_t u = block[k][lead];
      if (u != 1) {
        uint32_t s = fp::inv(u, p);
        for (uint32_t t = 0; t < d; ++t)
          block[k][t] = fp::mul(block[k][t], s, p);
      }
      for (size_t k2 = 0; k2 < block.size(); ++k2) {
        if (k2 == k) continue;
        uint32_t c = block[k2][lead];
        if (c)
          for (uint32_t t = 0; t < d; ++t)
            block[k2][t] = fp::sub(block[k2][t], fp::mul(c, block[k][t], p), p);
      }
    }
    for (size_t k = 0; k < block.size(); ++k) {
      size_t lead = 0;
      while (block[k][lead] == 0) ++lead;
      crows.push_back(block[k]);
      clevels.push_back(piv[i].level);
      cpos.push_back(static_cast<uint32_t>(lead));
    }
    i = j;
  }

  // realize each canonical row as a group element over the sift pivots
  std::vector<GroupElement> elems;
  for (size_t e = 0; e < crows.size(); ++e) {
    uint32_t n = clevels[e];
    fp::Vec r = crows[e];
    GroupElement acc = G.identity();
    for (auto& [pos, pv] : S.by_pos) {
      if (pv.level > n) continue;
      uint32_t c = r[pos];
      if (!c) continue;
      for (uint32_t t = 0; t < d; ++t)
        r[t] = fp::sub(r[t], fp::mul(c, pv.row[t], p), p);
      acc = G.multiply(acc, S.shifted_power(pv, n, c));
    }
    if (!vec_zero(r))
      throw LayerSolveFailure("canonical row is outside the pivot span");
    elems.push_back(acc);
  }

  // deep digit clearing: below its own level, each element's digit vector
  // must vanish on every pivot column already available at that depth
  for (size_t e = 0; e < elems.size(); ++e) {
    for (uint32_t m = clevels[e] + 1; m <= G.precision(); ++m) {
      fp::Vec v = digit_vector(G, elems[e], m);
      std::vector<uint32_t> coef(crows.size(), 0);
      bool any = false;
      for (size_t l = 0; l < crows.size(); ++l) {
        if (clevels[l] > m) break;  // sorted by level: prefix is available
        uint64_t acc = v[cpos[l]];
        for (size_t k = 0; k < l; ++k)
          acc = fp::sub(static_cast<uint32_t>(acc),
                        fp::mul(coef[k], crows[k][cpos[l]], p), p);
        coef[l] = static_cast<uint32_t>(acc % p);
        if (coef[l]) any = true;
      }
      if (!any) continue;
      GroupElement corr = G.identity();
      for (size_t l = 0; l < crows.size(); ++l) {
        if (!coef[l]) continue;
        uint64_t ex = static_cast<uint64_t>(coef[l]) *
                      checked_pow(p, m - clevels[l]);
        corr = G.multiply(corr, G.power_int(elems[l], ex));
      }
      elems[e] = G.multiply(elems[e], G.invert(corr));
    }
  }

  OpenSubgroup H;
  H.group_spec = G.spec_string();
  H.precision = G.precision();
  H.levels = clevels;
  H.positions = cpos;
  H.elements = elems;
  for (const GroupElement& h : elems) H.coords.push_back(G.decode(h));
  H.rows = crows;
  return H;
}

}  // namespace

OpenSubgroup good_basis_from_generators(
    const UniformGroupModel& G, const std::vector<GroupElement>& gens) {
  Sifter S(G);
  for (const GroupElement& g : gens) S.sift(g);
  S.complete();
  return canonicalize(G, S);
}

bool subgroup_contains(const UniformGroupModel& G, const OpenSubgroup& H,
                       const GroupElement& g0) {
  if (H.group_spec != G.spec_string() || H.precision != G.precision())
    throw ModelMismatch("handle belongs to a different model");
  uint64_t p = G.prime();
  GroupElement g = g0;
  for (;;) {
    uint32_t n = congruence_omega(G, g);
    if (n > G.precision()) return true;
    fp::Vec ell = G.layer_coeffs(g, n);
    // forward substitution on the unitriangular pivot-column system
    std::vector<uint32_t> coef(H.rows.size(), 0);
    for (size_t l = 0; l < H.rows.size(); ++l) {
      if (H.levels[l] > n) break;
      uint64_t acc = ell[H.positions[l]];
      for (size_t k = 0; k < l; ++k)
        acc = fp::sub(static_cast<uint32_t>(acc),
                      fp::mul(coef[k], H.rows[k][H.positions[l]], p), p);
      coef[l] = static_cast<uint32_t>(acc % p);
    }
    fp::Vec resid = ell;
    GroupElement corr = G.identity();
    bool any = false;
    for (size_t l = 0; l < H.rows.size(); ++l) {
      if (H.levels[l] > n || coef[l] == 0) continue;
      for (size_t t = 0; t < resid.size(); ++t)
        resid[t] = fp::sub(resid[t], fp::mul(coef[l], H.rows[l][t], p), p);
      uint64_t ex =
          static_cast<uint64_t>(coef[l]) * checked_pow(p, n - H.levels[l]);
      corr = G.multiply(corr, G.power_int(H.elements[l], ex));
      any = true;
    }
    if (!vec_zero(resid)) return false;  // layer outside the available span
    if (any) g = G.multiply(G.invert(corr), g);
    if (!any && vec_zero(ell))
      throw LayerSolveFailure("zero layer at finite depth");
  }
}

uint64_t subgroup_index(const UniformGroupModel& G, const OpenSubgroup& H) {
  if (H.group_spec != G.spec_string() || H.precision != G.precision())
    throw ModelMismatch("handle belongs to a different model");
  return checked_pow(G.prime(), H.index_exponent());
}

bool same_subgroup(const UniformGroupModel& G, const OpenSubgroup& A,
                   const OpenSubgroup& B) {
  if (A.group_spec != G.spec_string() || B.group_spec != G.spec_string())
    throw ModelMismatch("handle belongs to a different model");
  if (A.levels != B.levels || A.positions != B.positions) return false;
  if (A.elements.size() != B.elements.size()) return false;
  for (size_t i = 0; i < A.elements.size(); ++i)
    if (!(A.elements[i] == B.elements[i])) return false;
  return true;
}

GoodBasisReport is_good_basis(const UniformGroupModel& G,
                              const std::vector<GroupElement>& tuple,
                              const GoodBasisOptions& opts) {
  GoodBasisReport rep;
  uint32_t d = G.dim();
  uint64_t p = G.prime();
  if (tuple.size() != d) {
    rep.failure = "tuple length differs from coordinate dimension";
    return rep;
  }
  std::vector<uint32_t> levels;
  for (const GroupElement& h : tuple) {
    uint32_t n = congruence_omega(G, h);
    if (n > G.precision()) {
      rep.failure = "tuple entry is the identity at working precision";
      return rep;
    }
    levels.push_back(n);
  }
  rep.levels = levels;
  for (size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i] > levels[i + 1]) {
      rep.failure = "depths are not nondecreasing";
      return rep;
    }
  uint32_t maxlvl = levels.empty() ? 1 : levels.back();
  uint32_t m = maxlvl + 1;  // verification quotient level

  uint64_t total = 1;
  std::vector<uint64_t> range(d);
  for (uint32_t i = 0; i < d; ++i) {
    range[i] = checked_pow(p, m - levels[i]);
    total *= range[i];
    if (total > opts.product_budget)
      throw BudgetExceeded("product enumeration exceeds budget");
  }

  LevelView view(G, m);
  std::vector<std::vector<uint64_t>> pw(d);
  std::vector<uint64_t> tcodes(d);
  for (uint32_t i = 0; i < d; ++i) {
    tcodes[i] = view.code_of(tuple[i]);
    pw[i].resize(range[i]);
    pw[i][0] = view.identity_code();
    for (uint64_t a = 1; a < range[i]; ++a)
      pw[i][a] = view.mul(pw[i][a - 1], tcodes[i]);
  }

  std::unordered_set<uint64_t> products;
  products.reserve(total * 2);
  std::vector<uint64_t> lambda(d, 0);
  std::vector<uint64_t> prefix(d + 1);
  prefix[0] = view.identity_code();
  for (uint32_t i = 0; i < d; ++i) prefix[i + 1] = prefix[i];  // all zeros
  uint32_t lowest_changed = 0;
  for (uint64_t step = 0; step < total; ++step) {
    for (uint32_t i = lowest_changed; i < d; ++i)
      prefix[i + 1] = view.mul(prefix[i], pw[i][lambda[i]]);
    uint64_t prod = prefix[d];
    products.insert(prod);
    // depth formula in the quotient
    uint32_t expect = m;  // "at least m" when all exponents vanish deeply
    for (uint32_t i = 0; i < d; ++i) {
      if (lambda[i] == 0) continue;
      uint64_t v = 0, x = lambda[i];
      while (x % p == 0) {
        x /= p;
        ++v;
      }
      expect = std::min(expect, levels[i] + static_cast<uint32_t>(v));
    }
    uint32_t got = view.congruence_level(prod);
    if (got != expect) {
      std::ostringstream os;
      os << "depth formula fails at exponents (";
      for (uint32_t i = 0; i < d; ++i) os << (i ? "," : "") << lambda[i];
      os << "): expected " << expect << ", found " << got;
      rep.failure = os.str();
      return rep;
    }
    // odometer increment
    lowest_changed = d;
    for (uint32_t i = d; i-- > 0;) {
      lambda[i]++;
      lowest_changed = i;
      if (lambda[i] < range[i]) break;
      lambda[i] = 0;
      if (i == 0) lowest_changed = 0;
    }
  }
  if (products.size() != total) {
    rep.failure = "product map is not injective in the quotient";
    return rep;
  }
  try {
    std::unordered_set<uint64_t> closed =
        view.closure(tcodes, opts.product_budget + 1);
    if (closed.size() != products.size()) {
      rep.failure = "product set differs from the generated subgroup";
      return rep;
    }
  } catch (const BudgetExceeded&) {
    // closure outgrew the full product set, so it cannot equal it
    rep.failure = "product set differs from the generated subgroup";
    return rep;
  }

  // seeded full-precision spot checks of the depth formula
  std::mt19937_64 rng(opts.seed);
  for (uint32_t t = 0; t < opts.random_samples; ++t) {
    GroupElement g = G.identity();
    uint32_t expect = G.precision() + 1;
    for (uint32_t i = 0; i < d; ++i) {
      uint64_t lam = rng() % G.coord_modulus();
      if (lam != 0) {
        uint64_t v = 0, x = lam;
        while (x % p == 0) {
          x /= p;
          ++v;
        }
        uint32_t e = levels[i] + static_cast<uint32_t>(v);
        expect = std::min(expect, e);
        g = G.multiply(g, G.power_int(tuple[i], lam));
      }
    }
    if (expect > G.precision()) expect = G.precision() + 1;
    uint32_t got = congruence_omega(G, g);
    Valuation om = G.omega(g);  // already a level: min_i(v(l_i) + 1)
    uint32_t om_level = om.is_finite() ? om.finite_value() : G.precision() + 1;
    if (got != expect || om_level != expect) {
      std::ostringstream os;
      os << "sampled depth disagrees at trial " << t << ": expected "
         << expect << ", congruence " << got << ", coordinate " << om_level;
      rep.failure = os.str();
      return rep;
    }
  }
  rep.ok = true;
  return rep;
}

std::vector<OpenSubgroup> enumerate_open_subgroups(const UniformGroupModel& G,
                                                   uint32_t k,
                                                   uint64_t order_budget,
                                                   const EnumOptions& opts) {
  uint64_t p = G.prime();
  if (k + 1 > G.precision())
    throw NotOpenAtPrecision("precision " + std::to_string(G.precision()) +
                             " too low to certify index p^" +
                             std::to_string(k));
  std::vector<OpenSubgroup> out;
  if (k == 0) {
    std::vector<GroupElement> gens;
    for (uint32_t i = 0; i < G.dim(); ++i) gens.push_back(G.basis_element(i));
    out.push_back(good_basis_from_generators(G, gens));
    return out;
  }
  FiniteGroupTable F = build_quotient(G, k, order_budget);
  uint64_t max_index = checked_pow(p, k);
  std::vector<SubgroupInfo> subs = enumerate_subgroups(F, max_index, opts);
  uint64_t pk = checked_pow(p, k);
  for (const SubgroupInfo& s : subs) {
    std::vector<GroupElement> gens;
    for (uint16_t idx : s.elems.members())
      gens.push_back(G.encode(table_digits(F, idx)));
    for (uint32_t i = 0; i < G.dim(); ++i)
      gens.push_back(G.power_int(G.basis_element(i), pk));
    OpenSubgroup H = good_basis_from_generators(G, gens);
    uint64_t want_index = F.order / s.elems.count();
    if (subgroup_index(G, H) != want_index)
      throw LayerSolveFailure("lifted subgroup index disagrees with quotient");
    out.push_back(std::move(H));
  }
  std::sort(out.begin(), out.end(),
            [](const OpenSubgroup& a, const OpenSubgroup& b) {
              if (a.index_exponent() != b.index_exponent())
                return a.index_exponent() < b.index_exponent();
              if (a.levels != b.levels) return a.levels < b.levels;
              if (a.positions != b.positions) return a.positions < b.positions;
              for (size_t i = 0; i < a.elements.size(); ++i)
                if (!(a.elements[i] == b.elements[i]))
                  return a.elements[i].data < b.elements[i].data;
              return false;
            });
  for (size_t i = 0; i + 1 < out.size(); ++i)
    if (same_subgroup(G, out[i], out[i + 1]))
      throw LayerSolveFailure("duplicate subgroup in enumeration");
  return out;
}

std::string to_string(const OpenSubgroup& H) {
  std::ostringstream os;
  os << "subgroup{group=" << H.group_spec << " precision=" << H.precision
     << " basis=";
  for (size_t i = 0; i < H.coords.size(); ++i) {
    if (i) os << ";";
    os << "x(";
    for (size_t t = 0; t < H.coords[i].size(); ++t)
      os << (t ? "," : "") << H.coords[i][t];
    os << ")";
  }
  os << "}";
  return os.str();
}

OpenSubgroup parse_open_subgroup(const UniformGroupModel& G,
                                 const std::string& text) {
  auto fail = [&](const std::string& why, size_t at) {
    throw ParseError("subgroup literal: " + why, at);
  };
  const std::string head = "subgroup{group=";
  if (text.rfind(head, 0) != 0) fail("missing subgroup{ header", 0);
  size_t sp1 = text.find(' ', head.size());
  if (sp1 == std::string::npos) fail("missing precision field", head.size());
  std::string spec = text.substr(head.size(), sp1 - head.size());
  if (spec != G.spec_string())
    throw ModelMismatch("handle belongs to a different model");
  const std::string ph = " precision=";
  if (text.compare(sp1, ph.size(), ph) != 0)
    fail("missing precision field", sp1);
  size_t sp2 = text.find(' ', sp1 + ph.size());
  if (sp2 == std::string::npos) fail("missing basis field", sp1);
  uint32_t prec = 0;
  try {
    prec = static_cast<uint32_t>(
        std::stoul(text.substr(sp1 + ph.size(), sp2 - sp1 - ph.size())));
  } catch (const std::exception&) {
    fail("malformed precision", sp1);
  }
  if (prec != G.precision())
    throw ModelMismatch("handle precision differs from model");
  const std::string bh = " basis=";
  if (text.compare(sp2, bh.size(), bh) != 0) fail("missing basis field", sp2);
  if (text.empty() || text.back() != '}') fail("missing closing brace",
                                               text.size());
  std::string body = text.substr(sp2 + bh.size(),
                                 text.size() - sp2 - bh.size() - 1);
  std::vector<GroupElement> elems;
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = body.find(';', pos);
    std::string item =
        body.substr(pos, end == std::string::npos ? std::string::npos
                                                  : end - pos);
    if (item.size() < 3 || item.substr(0, 2) != "x(" || item.back() != ')')
      fail("malformed basis entry", sp2 + pos);
    std::vector<uint64_t> codes;
    std::string inner = item.substr(2, item.size() - 3);
    size_t ip = 0;
    while (ip <= inner.size()) {
      size_t ie = inner.find(',', ip);
      std::string num = inner.substr(
          ip, ie == std::string::npos ? std::string::npos : ie - ip);
      if (num.empty()) fail("empty coordinate", sp2 + pos);
      try {
        codes.push_back(std::stoull(num));
      } catch (const std::exception&) {
        fail("malformed coordinate", sp2 + pos);
      }
      if (ie == std::string::npos) break;
      ip = ie + 1;
    }
    elems.push_back(G.encode(codes));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  // re-canonicalize and insist the text named a canonical tuple
  OpenSubgroup H = good_basis_from_generators(G, elems);
  if (H.elements.size() != elems.size())
    throw ParseError("subgroup literal: basis length mismatch", 0);
  for (size_t i = 0; i < elems.size(); ++i)
    if (!(H.elements[i] == elems[i]))
      throw ParseError("subgroup literal: basis is not in canonical form", 0);
  return H;
}

}  // namespace propkit
