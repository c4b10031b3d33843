#include "propkit/finitep.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "propkit/errors.hpp"
#include "propkit/levelview.hpp"
#include "propkit/padic.hpp"

namespace propkit {

// ---- ElemSet -----------------------------------------------------------

ElemSet ElemSet::full(uint32_t size) {
  ElemSet s(size);
  for (uint32_t i = 0; i < size; ++i) s.set(i);
  return s;
}

uint32_t ElemSet::count() const {
  uint32_t c = 0;
  for (uint64_t x : w) c += static_cast<uint32_t>(__builtin_popcountll(x));
  return c;
}

std::vector<uint16_t> ElemSet::members() const {
  std::vector<uint16_t> m;
  m.reserve(count());
  for (uint32_t i = 0; i < n; ++i)
    if (test(i)) m.push_back(static_cast<uint16_t>(i));
  return m;
}

ElemSet ElemSet::intersect(const ElemSet& o) const {
  if (n != o.n) throw ModelMismatch("bitset carrier size mismatch");
  ElemSet r(n);
  for (size_t i = 0; i < w.size(); ++i) r.w[i] = w[i] & o.w[i];
  return r;
}

bool ElemSet::contains_all(const ElemSet& o) const {
  if (n != o.n) throw ModelMismatch("bitset carrier size mismatch");
  for (size_t i = 0; i < w.size(); ++i)
    if ((o.w[i] & ~w[i]) != 0) return false;
  return true;
}

bool ElemSet::operator<(const ElemSet& o) const {
  uint32_t a = count(), b = o.count();
  if (a != b) return a < b;
  return w < o.w;
}

// ---- shared helpers ----------------------------------------------------

namespace {

uint16_t comm(const FiniteGroupTable& F, uint16_t a, uint16_t b) {
  return F.at(F.at(F.at(F.inverse(a), F.inverse(b)), a), b);
}

uint16_t pow_tab(const FiniteGroupTable& F, uint16_t x, uint64_t e) {
  uint16_t acc = 0;
  for (uint64_t i = 0; i < e; ++i) acc = F.at(acc, x);
  return acc;
}

std::vector<uint64_t> factor_order(uint64_t n) {
  std::vector<uint64_t> ps;
  for (uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

void check_order_budget(uint64_t order, uint64_t budget) {
  if (order > budget)
    throw BudgetExceeded("table order " + std::to_string(order) +
                         " exceeds budget " + std::to_string(budget));
  if (order > 65535)
    throw BudgetExceeded("table order exceeds index width");
}

void fill_inverses_by_scan(FiniteGroupTable& F) {
  F.inv.assign(F.order, 0);
  for (uint32_t a = 0; a < F.order; ++a) {
    bool found = false;
    for (uint32_t b = 0; b < F.order; ++b)
      if (F.at(static_cast<uint16_t>(a), static_cast<uint16_t>(b)) == 0) {
        F.inv[a] = static_cast<uint16_t>(b);
        found = true;
        break;
      }
    if (!found) throw ModelMismatch("element without inverse in table");
  }
}

}  // namespace

// ---- validation --------------------------------------------------------

void validate_table(const FiniteGroupTable& F) {
  uint64_t n = F.order;
  if (n == 0) throw ModelMismatch("empty table");
  if (F.mul.size() != n * n || F.inv.size() != n || F.labels.size() != n)
    throw ModelMismatch("table field sizes inconsistent");
  for (uint16_t v : F.mul)
    if (v >= n) throw ModelMismatch("table entry out of range");
  for (uint32_t a = 0; a < n; ++a) {
    uint16_t ua = static_cast<uint16_t>(a);
    if (F.at(0, ua) != ua || F.at(ua, 0) != ua)
      throw ModelMismatch("identity law fails");
    if (F.at(ua, F.inv[a]) != 0 || F.at(F.inv[a], ua) != 0)
      throw ModelMismatch("inverse law fails");
  }
  auto assoc = [&](uint16_t a, uint16_t b, uint16_t c) {
    if (F.at(F.at(a, b), c) != F.at(a, F.at(b, c)))
      throw ModelMismatch("associativity fails");
  };
  if (n <= 256) {
    for (uint32_t a = 0; a < n; ++a)
      for (uint32_t b = 0; b < n; ++b)
        for (uint32_t c = 0; c < n; ++c)
          assoc(static_cast<uint16_t>(a), static_cast<uint16_t>(b),
                static_cast<uint16_t>(c));
  } else {
    std::mt19937_64 rng(0x5eedf00dULL);
    for (uint32_t t = 0; t < 20000; ++t)
      assoc(static_cast<uint16_t>(rng() % n), static_cast<uint16_t>(rng() % n),
            static_cast<uint16_t>(rng() % n));
  }
}

// ---- builders ----------------------------------------------------------

FiniteGroupTable build_cyclic(uint64_t n, uint64_t order_budget) {
  if (n == 0) throw ModelMismatch("cyclic group order must be positive");
  check_order_budget(n, order_budget);
  FiniteGroupTable F;
  F.kind = TableKind::DirectProduct;
  F.order = static_cast<uint32_t>(n);
  F.origin = "cyclic(" + std::to_string(n) + ")";
  F.cyclic_factors = {n};
  F.mul.resize(n * n);
  for (uint64_t a = 0; a < n; ++a)
    for (uint64_t b = 0; b < n; ++b)
      F.mul[a * n + b] = static_cast<uint16_t>((a + b) % n);
  F.labels.resize(n);
  for (uint64_t a = 0; a < n; ++a) F.labels[a] = std::to_string(a);
  fill_inverses_by_scan(F);
  validate_table(F);
  return F;
}

FiniteGroupTable direct_product(const FiniteGroupTable& A,
                                const FiniteGroupTable& B,
                                uint64_t order_budget) {
  uint64_t n = static_cast<uint64_t>(A.order) * B.order;
  check_order_budget(n, order_budget);
  FiniteGroupTable F;
  F.kind = TableKind::DirectProduct;
  F.order = static_cast<uint32_t>(n);
  F.origin = "product(" + A.origin + ", " + B.origin + ")";
  if (!A.cyclic_factors.empty() && !B.cyclic_factors.empty()) {
    F.cyclic_factors = A.cyclic_factors;
    F.cyclic_factors.insert(F.cyclic_factors.end(), B.cyclic_factors.begin(),
                            B.cyclic_factors.end());
  }
  F.mul.resize(n * n);
  F.labels.resize(n);
  for (uint32_t ib = 0; ib < B.order; ++ib)
    for (uint32_t ia = 0; ia < A.order; ++ia) {
      uint64_t i = ia + static_cast<uint64_t>(A.order) * ib;
      F.labels[i] = "(" + A.labels[ia] + "," + B.labels[ib] + ")";
    }
  for (uint64_t i = 0; i < n; ++i) {
    uint16_t ia = static_cast<uint16_t>(i % A.order);
    uint16_t ib = static_cast<uint16_t>(i / A.order);
    for (uint64_t j = 0; j < n; ++j) {
      uint16_t ja = static_cast<uint16_t>(j % A.order);
      uint16_t jb = static_cast<uint16_t>(j / A.order);
      F.mul[i * n + j] = static_cast<uint16_t>(
          A.at(ia, ja) + static_cast<uint64_t>(A.order) * B.at(ib, jb));
    }
  }
  fill_inverses_by_scan(F);
  validate_table(F);
  return F;
}

FiniteGroupTable build_wreath(uint64_t p, uint32_t n, uint64_t order_budget) {
  if (!is_prime_u64(p)) throw ModelMismatch("wreath base modulus not prime");
  uint64_t B = checked_pow(p, n);   // block length = top order
  uint64_t top = B;
  uint64_t order = checked_pow(p, B + n);
  check_order_budget(order, order_budget);
  FiniteGroupTable F;
  F.kind = TableKind::Wreath;
  F.order = static_cast<uint32_t>(order);
  F.prime = p;
  F.wreath_n = n;
  F.wreath_base = static_cast<uint32_t>(B);
  F.origin = "wreath(" + std::to_string(p) + "," + std::to_string(n) + ")";

  // digit cache: index -> (f(0..B-1), s)
  std::vector<std::vector<uint16_t>> dig(order,
                                         std::vector<uint16_t>(B + 1, 0));
  std::vector<uint64_t> powp(B + 1, 1);
  for (uint64_t i = 1; i <= B; ++i) powp[i] = powp[i - 1] * p;
  for (uint64_t idx = 0; idx < order; ++idx) {
    uint64_t r = idx;
    for (uint64_t i = 0; i < B; ++i) {
      dig[idx][i] = static_cast<uint16_t>(r % p);
      r /= p;
    }
    dig[idx][B] = static_cast<uint16_t>(r);  // shift, < top
  }
  F.labels.resize(order);
  for (uint64_t idx = 0; idx < order; ++idx) {
    std::string s = "w(";
    for (uint64_t i = 0; i < B; ++i) {
      if (i) s += ",";
      s += std::to_string(dig[idx][i]);
    }
    s += "|" + std::to_string(dig[idx][B]) + ")";
    F.labels[idx] = s;
  }
  F.mul.resize(order * order);
  for (uint64_t i = 0; i < order; ++i) {
    const auto& a = dig[i];
    uint64_t s = a[B];
    for (uint64_t j = 0; j < order; ++j) {
      const auto& b = dig[j];
      uint64_t code = 0;
      for (uint64_t k = 0; k < B; ++k) {
        uint64_t shifted = b[(k + B - s) % B];
        code += ((a[k] + shifted) % p) * powp[k];
      }
      code += ((s + b[B]) % top) * powp[B];
      F.mul[i * order + j] = static_cast<uint16_t>(code);
    }
  }
  fill_inverses_by_scan(F);
  validate_table(F);
  return F;
}

FiniteGroupTable build_metacyclic_g2(uint64_t p,
                                     const std::vector<uint64_t>& qs,
                                     uint32_t m, uint64_t order_budget) {
  if (!is_prime_u64(p)) throw ModelMismatch("metacyclic p not prime");
  if (qs.empty()) throw ModelMismatch("metacyclic factor list empty");
  if (m < qs.size())
    throw ModelMismatch("top cyclic order too small for action");
  std::vector<uint64_t> us;
  for (size_t i = 0; i < qs.size(); ++i) {
    uint64_t q = qs[i];
    if (!is_prime_u64(q)) throw ModelMismatch("metacyclic q not prime");
    for (size_t j = 0; j < i; ++j)
      if (qs[j] == q) throw ModelMismatch("metacyclic q repeated");
    uint64_t need = checked_pow(p, i + 1);
    if ((q - 1) % need != 0)
      throw ModelMismatch("q-1 not divisible by required power of p");
    // smallest unit of multiplicative order exactly p^(i+1) mod q
    uint64_t chosen = 0;
    for (uint64_t u = 2; u < q; ++u) {
      uint64_t e = 1, x = u % q;
      while (x != 1 && e <= need) {
        x = mulmod(x, u, q);
        ++e;
      }
      if (x == 1 && e == need) {
        chosen = u;
        break;
      }
    }
    if (chosen == 0) throw ModelMismatch("no unit of required order mod q");
    us.push_back(chosen);
  }
  uint64_t ptop = checked_pow(p, m);
  uint64_t base = 1;
  for (uint64_t q : qs) base *= q;
  uint64_t order = base * ptop;
  check_order_budget(order, order_budget);

  FiniteGroupTable F;
  F.kind = TableKind::Metacyclic;
  F.order = static_cast<uint32_t>(order);
  F.prime = p;
  F.metacyclic_m = m;
  F.metacyclic_q = qs;
  F.metacyclic_u = us;
  {
    std::string s = "metacyclic(" + std::to_string(p) + ";";
    for (size_t i = 0; i < qs.size(); ++i)
      s += (i ? "," : "") + std::to_string(qs[i]);
    s += ";" + std::to_string(m) + ")";
    F.origin = s;
  }
  size_t nf = qs.size();
  std::vector<std::vector<uint64_t>> dig(order,
                                         std::vector<uint64_t>(nf + 1, 0));
  for (uint64_t idx = 0; idx < order; ++idx) {
    uint64_t r = idx;
    for (size_t i = 0; i < nf; ++i) {
      dig[idx][i] = r % qs[i];
      r /= qs[i];
    }
    dig[idx][nf] = r;
  }
  // action powers u_i^s mod q_i for s < p^m
  std::vector<std::vector<uint64_t>> act(nf, std::vector<uint64_t>(ptop, 1));
  for (size_t i = 0; i < nf; ++i)
    for (uint64_t s = 1; s < ptop; ++s)
      act[i][s] = mulmod(act[i][s - 1], us[i], qs[i]);
  F.labels.resize(order);
  for (uint64_t idx = 0; idx < order; ++idx) {
    std::string s = "g(";
    for (size_t i = 0; i < nf; ++i) {
      if (i) s += ",";
      s += std::to_string(dig[idx][i]);
    }
    s += "|" + std::to_string(dig[idx][nf]) + ")";
    F.labels[idx] = s;
  }
  F.mul.resize(order * order);
  for (uint64_t i = 0; i < order; ++i) {
    const auto& a = dig[i];
    uint64_t s = a[nf];
    for (uint64_t j = 0; j < order; ++j) {
      const auto& b = dig[j];
      uint64_t code = 0, radix = 1;
      for (size_t k = 0; k < nf; ++k) {
        uint64_t c = (a[k] + mulmod(act[k][s], b[k], qs[k])) % qs[k];
        code += c * radix;
        radix *= qs[k];
      }
      code += ((s + b[nf]) % ptop) * radix;
      F.mul[i * order + j] = static_cast<uint16_t>(code);
    }
  }
  fill_inverses_by_scan(F);
  validate_table(F);
  return F;
}

FiniteGroupTable build_quotient(const UniformGroupModel& G, uint32_t level,
                                uint64_t order_budget) {
  if (level < 1 || level > G.precision())
    throw ModelMismatch("quotient level out of range for model precision");
  uint64_t p = G.prime();
  uint32_t d = G.dim();
  uint64_t q = checked_pow(p, level);
  uint64_t order = checked_pow(q, d);
  check_order_budget(order, order_budget);

  LevelView view(G, level + 1);
  std::vector<uint64_t> raws(order);
  std::unordered_map<uint64_t, uint16_t> rawmap;
  rawmap.reserve(order * 2);
  FiniteGroupTable F;
  F.kind = TableKind::Quotient;
  F.order = static_cast<uint32_t>(order);
  F.prime = p;
  F.group_spec = G.spec_string();
  F.level = level;
  F.qdim = d;
  F.origin = "quotient(" + G.spec_string() + ", level " +
             std::to_string(level) + ")";
  F.labels.resize(order);
  for (uint64_t idx = 0; idx < order; ++idx) {
    std::vector<uint64_t> codes(d);
    uint64_t r = idx;
    for (uint32_t i = 0; i < d; ++i) {
      codes[i] = r % q;
      r /= q;
    }
    GroupElement g = G.encode(codes);
    raws[idx] = view.code_of(g);
    if (!rawmap.emplace(raws[idx], static_cast<uint16_t>(idx)).second)
      throw LayerSolveFailure("coordinate carrier collides in quotient");
    std::string s = "x(";
    for (uint32_t i = 0; i < d; ++i) {
      if (i) s += ",";
      s += std::to_string(codes[i]);
    }
    F.labels[idx] = s + ")";
  }
  F.mul.resize(order * order);
  F.inv.resize(order);
  for (uint64_t i = 0; i < order; ++i) {
    for (uint64_t j = 0; j < order; ++j) {
      auto it = rawmap.find(view.mul(raws[i], raws[j]));
      if (it == rawmap.end())
        throw LayerSolveFailure("quotient carrier not closed");
      F.mul[i * order + j] = it->second;
    }
    auto it = rawmap.find(view.inv(raws[i]));
    if (it == rawmap.end())
      throw LayerSolveFailure("quotient carrier not closed under inverse");
    F.inv[i] = it->second;
  }
  validate_table(F);
  // uniformity spot check: descending power-commutator chain with p^d steps
  std::vector<ElemSet> chain = lower_p_series(F);
  uint64_t pd = checked_pow(p, d);
  if (chain.size() != static_cast<size_t>(level) + 1)
    throw LayerSolveFailure("quotient chain has unexpected length");
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    uint64_t a = chain[k].count(), b = chain[k + 1].count();
    if (a != b * pd)
      throw LayerSolveFailure("quotient layer sizes are not uniform");
  }
  return F;
}

FiniteGroupTable subgroup_table(const FiniteGroupTable& F, const ElemSet& S) {
  if (S.n != F.order) throw ModelMismatch("bitset does not match table");
  if (!S.test(0)) throw ModelMismatch("subgroup must contain identity");
  std::vector<uint16_t> mem = S.members();
  uint32_t k = static_cast<uint32_t>(mem.size());
  std::vector<int32_t> pos(F.order, -1);
  for (uint32_t i = 0; i < k; ++i) pos[mem[i]] = static_cast<int32_t>(i);
  FiniteGroupTable R;
  R.kind = TableKind::DirectProduct;  // opaque: no digit scheme
  R.order = k;
  R.prime = F.prime;
  R.origin = "subgroup(order " + std::to_string(k) + ") of " + F.origin;
  R.mul.resize(static_cast<size_t>(k) * k);
  R.labels.resize(k);
  for (uint32_t i = 0; i < k; ++i) {
    R.labels[i] = F.labels[mem[i]];
    for (uint32_t j = 0; j < k; ++j) {
      uint16_t prod = F.at(mem[i], mem[j]);
      if (pos[prod] < 0) throw ModelMismatch("set not closed under product");
      R.mul[static_cast<size_t>(i) * k + j] =
          static_cast<uint16_t>(pos[prod]);
    }
  }
  fill_inverses_by_scan(R);
  validate_table(R);
  return R;
}

// ---- queries -----------------------------------------------------------

std::vector<uint64_t> table_digits(const FiniteGroupTable& F, uint16_t idx) {
  std::vector<uint64_t> radices;
  switch (F.kind) {
    case TableKind::Quotient: {
      if (F.qdim == 0) throw ModelMismatch("table has no digit scheme");
      uint64_t q = checked_pow(F.prime, F.level);
      radices.assign(F.qdim, q);
      break;
    }
    case TableKind::Wreath: {
      if (F.wreath_base == 0) throw ModelMismatch("table has no digit scheme");
      radices.assign(F.wreath_base, F.prime);
      radices.push_back(checked_pow(F.prime, F.wreath_n));
      break;
    }
    case TableKind::Metacyclic: {
      if (F.metacyclic_q.empty())
        throw ModelMismatch("table has no digit scheme");
      radices = F.metacyclic_q;
      radices.push_back(checked_pow(F.prime, F.metacyclic_m));
      break;
    }
    case TableKind::DirectProduct: {
      if (F.cyclic_factors.empty())
        throw ModelMismatch("table has no digit scheme");
      radices = F.cyclic_factors;
      break;
    }
  }
  std::vector<uint64_t> out(radices.size());
  uint64_t r = idx;
  for (size_t i = 0; i < radices.size(); ++i) {
    out[i] = r % radices[i];
    r /= radices[i];
  }
  return out;
}

uint32_t element_order(const FiniteGroupTable& F, uint16_t x) {
  uint32_t ord = 1;
  uint16_t e = x;
  while (e != 0) {
    e = F.at(e, x);
    ++ord;
    if (ord > F.order) throw ModelMismatch("element order exceeds table");
  }
  return x == 0 ? 1 : ord;
}

ElemSet closure_of(const FiniteGroupTable& F,
                   const std::vector<uint16_t>& gens) {
  ElemSet S(F.order);
  S.set(0);
  std::vector<uint16_t> queue{0};
  std::vector<uint16_t> gl;
  for (uint16_t g : gens)
    if (g != 0 && std::find(gl.begin(), gl.end(), g) == gl.end())
      gl.push_back(g);
  for (size_t i = 0; i < queue.size(); ++i)
    for (uint16_t g : gl) {
      uint16_t v = F.at(queue[i], g);
      if (!S.test(v)) {
        S.set(v);
        queue.push_back(v);
      }
    }
  return S;
}

// ---- subgroup enumeration ----------------------------------------------

namespace {

// In a p-group, every subgroup is reached from the trivial one by a chain
// of index-p steps H < H' with H normal in H'.  Extensions of H are found
// from coset representatives g with g normalizing H and g^p in H; then
// H' = H u Hg u ... u Hg^(p-1) without any closure search.
std::vector<SubgroupInfo> enumerate_subgroups_pgroup(
    const FiniteGroupTable& F, uint64_t p, const EnumOptions& opts) {
  std::vector<SubgroupInfo> all;
  std::set<std::vector<uint64_t>> seen;
  SubgroupInfo triv;
  triv.elems = ElemSet(F.order);
  triv.elems.set(0);
  all.push_back(triv);
  seen.insert(triv.elems.w);
  for (size_t qi = 0; qi < all.size(); ++qi) {
    SubgroupInfo H = all[qi];  // copy: `all` grows during the loop
    std::vector<uint16_t> mem = H.elems.members();
    if (mem.size() == F.order) continue;
    ElemSet covered = H.elems;
    for (uint32_t g = 0; g < F.order; ++g) {
      if (covered.test(g)) continue;
      uint16_t ug = static_cast<uint16_t>(g);
      for (uint16_t h : mem) covered.set(F.at(h, ug));
      // one representative per coset Hg; the extension filter is
      // coset-invariant so testing the first representative suffices
      bool normalizes = true;
      uint16_t gi = F.inverse(ug);
      for (uint16_t s : H.gens)
        if (!H.elems.test(F.at(F.at(gi, s), ug))) {
          normalizes = false;
          break;
        }
      if (!normalizes) continue;
      if (!H.elems.test(pow_tab(F, ug, p))) continue;
      SubgroupInfo K;
      K.elems = H.elems;
      K.gens = H.gens;
      K.gens.push_back(ug);
      uint16_t x = ug;
      for (uint64_t k = 1; k < p; ++k) {
        for (uint16_t h : mem) K.elems.set(F.at(h, x));
        x = F.at(x, ug);
      }
      if (K.elems.count() != mem.size() * p)
        throw ModelMismatch("index-p extension has wrong size");
      if (seen.insert(K.elems.w).second) {
        all.push_back(K);
        if (all.size() > opts.subgroup_cap)
          throw BudgetExceeded("subgroup enumeration exceeded cap");
      }
    }
  }
  return all;
}

std::vector<SubgroupInfo> enumerate_subgroups_generic(
    const FiniteGroupTable& F, const EnumOptions& opts) {
  std::vector<SubgroupInfo> all;
  std::set<std::vector<uint64_t>> seen;
  SubgroupInfo triv;
  triv.elems = ElemSet(F.order);
  triv.elems.set(0);
  all.push_back(triv);
  seen.insert(triv.elems.w);
  for (size_t qi = 0; qi < all.size(); ++qi) {
    SubgroupInfo H = all[qi];
    std::vector<uint16_t> mem = H.elems.members();
    if (mem.size() == F.order) continue;
    ElemSet covered = H.elems;
    for (uint32_t g = 0; g < F.order; ++g) {
      if (covered.test(g)) continue;
      uint16_t ug = static_cast<uint16_t>(g);
      for (uint16_t h : mem) covered.set(F.at(h, ug));
      std::vector<uint16_t> gens = H.gens;
      gens.push_back(ug);
      SubgroupInfo K;
      K.elems = closure_of(F, gens);
      K.gens = gens;
      if (seen.insert(K.elems.w).second) {
        all.push_back(K);
        if (all.size() > opts.subgroup_cap)
          throw BudgetExceeded("subgroup enumeration exceeded cap");
      }
    }
  }
  return all;
}

}  // namespace

std::vector<SubgroupInfo> enumerate_subgroups(const FiniteGroupTable& F,
                                              uint64_t max_index,
                                              const EnumOptions& opts) {
  std::vector<uint64_t> ps = factor_order(F.order);
  std::vector<SubgroupInfo> all =
      (ps.size() == 1) ? enumerate_subgroups_pgroup(F, ps[0], opts)
                       : enumerate_subgroups_generic(F, opts);
  std::vector<SubgroupInfo> out;
  for (auto& s : all)
    if (static_cast<uint64_t>(s.elems.count()) * max_index >= F.order)
      out.push_back(std::move(s));
  std::sort(out.begin(), out.end(),
            [](const SubgroupInfo& a, const SubgroupInfo& b) {
              return a.elems < b.elems;
            });
  return out;
}

// ---- characteristic series ---------------------------------------------

std::vector<ElemSet> lower_p_series(const FiniteGroupTable& F) {
  std::vector<uint64_t> ps = factor_order(F.order);
  if (F.order > 1 && ps.size() != 1)
    throw NotPGroup("order " + std::to_string(F.order) +
                    " is not a prime power");
  std::vector<ElemSet> chain;
  chain.push_back(ElemSet::full(F.order));
  if (F.order == 1) return chain;
  uint64_t p = ps[0];
  while (chain.back().count() > 1) {
    const ElemSet& P = chain.back();
    std::vector<uint16_t> mem = P.members();
    std::unordered_set<uint16_t> genset;
    for (uint16_t a : mem) {
      genset.insert(pow_tab(F, a, p));
      for (uint32_t g = 0; g < F.order; ++g)
        genset.insert(comm(F, a, static_cast<uint16_t>(g)));
    }
    ElemSet next = closure_of(
        F, std::vector<uint16_t>(genset.begin(), genset.end()));
    if (next.count() >= P.count())
      throw NotPGroup("power-commutator chain fails to descend");
    chain.push_back(std::move(next));
  }
  return chain;
}

ElemSet frattini(const FiniteGroupTable& F, const EnumOptions& opts) {
  if (F.order == 1) return ElemSet::full(1);
  std::vector<uint64_t> ps = factor_order(F.order);
  if (ps.size() == 1) {
    uint64_t p = ps[0];
    // K = F^p [F,F]; maximal subgroups are exactly the index-p preimages
    // of hyperplanes in the elementary abelian quotient F/K.
    std::unordered_set<uint16_t> genset;
    for (uint32_t a = 0; a < F.order; ++a) {
      genset.insert(pow_tab(F, static_cast<uint16_t>(a), p));
      for (uint32_t b = 0; b < F.order; ++b)
        genset.insert(
            comm(F, static_cast<uint16_t>(a), static_cast<uint16_t>(b)));
    }
    ElemSet K = closure_of(
        F, std::vector<uint16_t>(genset.begin(), genset.end()));
    uint32_t ksz = K.count();
    uint64_t vsz = F.order / ksz;
    uint32_t r = 0;
    for (uint64_t t = vsz; t > 1; t /= p) {
      if (t % p != 0) throw ModelMismatch("quotient size not a p-power");
      ++r;
    }
    if (r == 0) return K;
    // coset labels
    std::vector<uint16_t> kmem = K.members();
    std::vector<int32_t> cosid(F.order, -1);
    std::vector<uint16_t> reps;
    for (uint32_t e = 0; e < F.order; ++e) {
      if (cosid[e] >= 0) continue;
      int32_t id = static_cast<int32_t>(reps.size());
      reps.push_back(static_cast<uint16_t>(e));
      for (uint16_t k : kmem) cosid[F.at(static_cast<uint16_t>(e), k)] = id;
    }
    auto vmul = [&](uint32_t a, uint32_t b) {
      return static_cast<uint32_t>(cosid[F.at(reps[a], reps[b])]);
    };
    // greedy basis of the quotient vector space
    std::vector<uint32_t> basis;
    std::vector<bool> span(vsz, false);
    span[cosid[0] >= 0 ? cosid[0] : 0] = true;  // identity coset
    std::vector<uint32_t> spanlist{static_cast<uint32_t>(cosid[0])};
    for (uint32_t c = 0; c < vsz && basis.size() < r; ++c) {
      if (span[c]) continue;
      basis.push_back(c);
      std::vector<uint32_t> grown = spanlist;
      for (uint32_t s : spanlist) {
        uint32_t x = s;
        for (uint64_t k = 1; k < p; ++k) {
          x = vmul(x, c);
          if (!span[x]) {
            span[x] = true;
            grown.push_back(x);
          }
        }
      }
      spanlist = grown;
    }
    if (basis.size() != r) throw ModelMismatch("quotient basis not found");
    // coordinates: enumerate all tuples over the basis
    std::vector<std::vector<uint8_t>> coords(vsz);
    uint64_t tuples = checked_pow(p, r);
    for (uint64_t t = 0; t < tuples; ++t) {
      uint64_t rr = t;
      uint32_t c = static_cast<uint32_t>(cosid[0]);
      std::vector<uint8_t> tup(r);
      for (uint32_t i = 0; i < r; ++i) {
        tup[i] = static_cast<uint8_t>(rr % p);
        rr /= p;
        for (uint8_t k = 0; k < tup[i]; ++k) c = vmul(c, basis[i]);
      }
      coords[c] = tup;
    }
    // intersect pullbacks of all hyperplanes (normalized functionals)
    ElemSet phi = ElemSet::full(F.order);
    for (uint64_t f = 1; f < tuples; ++f) {
      uint64_t rr = f;
      std::vector<uint8_t> fun(r);
      uint32_t first = r;
      for (uint32_t i = 0; i < r; ++i) {
        fun[i] = static_cast<uint8_t>(rr % p);
        rr /= p;
        if (fun[i] != 0 && first == r) first = i;
      }
      if (fun[first] != 1) continue;  // one functional per hyperplane
      ElemSet M(F.order);
      for (uint32_t e = 0; e < F.order; ++e) {
        const auto& tup = coords[cosid[e]];
        uint64_t dot = 0;
        for (uint32_t i = 0; i < r; ++i) dot += fun[i] * tup[i];
        if (dot % p == 0) M.set(e);
      }
      phi = phi.intersect(M);
    }
    if (!(phi == K))
      throw ModelMismatch("maximal-subgroup intersection disagrees");
    return phi;
  }
  // general case: full enumeration
  std::vector<SubgroupInfo> subs = enumerate_subgroups(F, F.order, opts);
  std::vector<const SubgroupInfo*> proper;
  for (const auto& s : subs)
    if (s.elems.count() < F.order) proper.push_back(&s);
  ElemSet phi = ElemSet::full(F.order);
  bool any = false;
  for (const auto* h : proper) {
    bool maximal = true;
    for (const auto* k : proper)
      if (k != h && k->elems.contains_all(h->elems) &&
          k->elems.count() > h->elems.count()) {
        maximal = false;
        break;
      }
    if (maximal) {
      phi = phi.intersect(h->elems);
      any = true;
    }
  }
  if (!any) return ElemSet::full(F.order);  // no proper subgroup
  return phi;
}

// ---- generator search --------------------------------------------------

namespace {

struct GenSearch {
  const FiniteGroupTable& F;
  std::map<std::vector<uint64_t>, uint32_t> failed;  // bits -> tried depth

  bool extend(const SubgroupInfo& H, uint32_t remaining) {
    uint32_t sz = H.elems.count();
    if (sz == F.order) return true;
    if (remaining == 0) return false;
    auto it = failed.find(H.elems.w);
    if (it != failed.end() && it->second >= remaining) return false;
    std::vector<uint16_t> mem = H.elems.members();
    ElemSet covered = H.elems;
    for (uint32_t g = 0; g < F.order; ++g) {
      if (covered.test(g)) continue;
      uint16_t ug = static_cast<uint16_t>(g);
      for (uint16_t h : mem) covered.set(F.at(h, ug));
      SubgroupInfo K;
      K.gens = H.gens;
      K.gens.push_back(ug);
      K.elems = closure_of(F, K.gens);
      if (extend(K, remaining - 1)) return true;
    }
    uint32_t& rec = failed[H.elems.w];
    rec = std::max(rec, remaining);
    return false;
  }
};

}  // namespace

uint32_t min_generators(const FiniteGroupTable& F, const EnumOptions&) {
  if (F.order == 1) return 0;
  GenSearch s{F, {}};
  SubgroupInfo triv;
  triv.elems = ElemSet(F.order);
  triv.elems.set(0);
  for (uint32_t k = 1;; ++k) {
    if (s.extend(triv, k)) return k;
    if (checked_pow(2, k) > F.order)
      throw ModelMismatch("generator search failed to terminate");
  }
}

uint32_t rank_of(const FiniteGroupTable& F, const EnumOptions& opts) {
  std::vector<SubgroupInfo> subs = enumerate_subgroups(F, F.order, opts);
  uint32_t best = 0;
  for (const auto& s : subs) {
    FiniteGroupTable H = subgroup_table(F, s.elems);
    best = std::max(best, min_generators(H, opts));
  }
  return best;
}

// ---- nilpotency / Sylow ------------------------------------------------

std::vector<std::pair<uint64_t, ElemSet>> sylow_decompose(
    const FiniteGroupTable& F) {
  // ascending central chain; stalling before the whole group means the
  // table is not nilpotent and has no direct Sylow decomposition
  ElemSet Z(F.order);
  Z.set(0);
  for (;;) {
    if (Z.count() == F.order) break;
    ElemSet next(F.order);
    for (uint32_t x = 0; x < F.order; ++x) {
      bool central = true;
      for (uint32_t g = 0; g < F.order; ++g)
        if (!Z.test(comm(F, static_cast<uint16_t>(x),
                         static_cast<uint16_t>(g)))) {
          central = false;
          break;
        }
      if (central) next.set(x);
    }
    if (next == Z)
      throw NotNilpotent("central chain stalls at order " +
                         std::to_string(Z.count()));
    Z = next;
  }
  std::vector<uint64_t> ps = factor_order(F.order);
  std::vector<std::pair<uint64_t, ElemSet>> out;
  uint64_t product = 1;
  for (uint64_t p : ps) {
    ElemSet S(F.order);
    for (uint32_t x = 0; x < F.order; ++x) {
      uint32_t ord = element_order(F, static_cast<uint16_t>(x));
      while (ord % p == 0) ord /= p;
      if (ord == 1) S.set(x);
    }
    ElemSet C = closure_of(F, S.members());
    if (!(C == S)) throw NotNilpotent("p-elements do not form a subgroup");
    product *= S.count();
    out.emplace_back(p, std::move(S));
  }
  if (product != F.order)
    throw NotNilpotent("Sylow sizes do not multiply to the order");
  return out;
}

// ---- export ------------------------------------------------------------

std::string mul_table_csv(const FiniteGroupTable& F) {
  std::ostringstream os;
  os << "# order=" << F.order << "\n";
  os << "# origin=" << F.origin << "\n";
  os << "# labels=";
  for (uint32_t i = 0; i < F.order; ++i) {
    if (i) os << "|";
    os << F.labels[i];
  }
  os << "\n";
  for (uint32_t a = 0; a < F.order; ++a) {
    for (uint32_t b = 0; b < F.order; ++b) {
      if (b) os << ",";
      os << F.at(static_cast<uint16_t>(a), static_cast<uint16_t>(b));
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace propkit
