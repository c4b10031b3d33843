#include "propkit/levelview.hpp"

#include <algorithm>

#include "propkit/errors.hpp"
#include "propkit/padic.hpp"

namespace propkit {

namespace {

// Inverse of an invertible matrix mod a prime power.  Pivots are always
// units here because the matrices we feed in are congruent to I mod p.
std::vector<uint64_t> matrix_inverse_mod(std::vector<uint64_t> a, uint32_t n,
                                         uint64_t mod, uint64_t p) {
  if (mod == 1) return std::vector<uint64_t>(a.size(), 0);
  std::vector<uint64_t> inv(n * n, 0);
  for (uint32_t i = 0; i < n; ++i) inv[i * n + i] = 1 % mod;
  for (uint32_t col = 0; col < n; ++col) {
    uint32_t piv = col;
    while (piv < n && a[piv * n + col] % p == 0) ++piv;
    if (piv == n) throw ModelMismatch("matrix not invertible at this level");
    if (piv != col) {
      for (uint32_t j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(inv[piv * n + j], inv[col * n + j]);
      }
    }
    uint64_t s = invmod(a[col * n + col], mod);
    for (uint32_t j = 0; j < n; ++j) {
      a[col * n + j] = mulmod(a[col * n + j], s, mod);
      inv[col * n + j] = mulmod(inv[col * n + j], s, mod);
    }
    for (uint32_t r = 0; r < n; ++r) {
      if (r == col) continue;
      uint64_t f = a[r * n + col];
      if (f == 0) continue;
      for (uint32_t j = 0; j < n; ++j) {
        a[r * n + j] =
            (a[r * n + j] + mod - mulmod(f, a[col * n + j], mod)) % mod;
        inv[r * n + j] =
            (inv[r * n + j] + mod - mulmod(f, inv[col * n + j], mod)) % mod;
      }
    }
  }
  return inv;
}

}  // namespace

LevelView::LevelView(const UniformGroupModel& G, uint32_t m) : G_(&G), m_(m) {
  if (m < 1 || m > G.precision() + 1)
    throw ModelMismatch("quotient level out of range for model precision");
  uint64_t p = G.prime();
  if (G.kind() == GroupKind::Abelian) {
    slots_ = G.dim();
    entry_mod_ = checked_pow(p, m - 1);
  } else {
    slots_ = G.matrix_size() * G.matrix_size();
    entry_mod_ = checked_pow(p, G.eps() + m - 1);
  }
  // Packing capacity guard; also bounds the carrier below 2^63 codes.
  checked_pow(entry_mod_, slots_);
  order_ = checked_pow(p, static_cast<uint64_t>(G.dim()) * (m - 1));
}

std::vector<uint64_t> LevelView::unpack(uint64_t code) const {
  std::vector<uint64_t> e(slots_);
  if (entry_mod_ == 1) return e;
  for (uint32_t i = 0; i < slots_; ++i) {
    e[i] = code % entry_mod_;
    code /= entry_mod_;
  }
  return e;
}

uint64_t LevelView::pack(const std::vector<uint64_t>& entries) const {
  uint64_t code = 0;
  for (uint32_t i = slots_; i-- > 0;)
    code = code * entry_mod_ + entries[i] % entry_mod_;
  return code;
}

uint64_t LevelView::code_of(const GroupElement& g) const {
  if (g.data.size() != slots_)
    throw ModelMismatch("element shape does not match view");
  uint64_t code = 0;
  for (uint32_t i = slots_; i-- > 0;)
    code = code * entry_mod_ + (entry_mod_ == 1 ? 0 : g.data[i] % entry_mod_);
  return code;
}

uint64_t LevelView::identity_code() const { return code_of(G_->identity()); }

uint64_t LevelView::mul(uint64_t a, uint64_t b) const {
  std::vector<uint64_t> x = unpack(a), y = unpack(b);
  std::vector<uint64_t> z(slots_, 0);
  if (entry_mod_ == 1) return 0;
  if (G_->kind() == GroupKind::Abelian) {
    for (uint32_t i = 0; i < slots_; ++i) z[i] = (x[i] + y[i]) % entry_mod_;
  } else {
    uint32_t n = G_->matrix_size();
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t k = 0; k < n; ++k) {
        uint64_t f = x[i * n + k];
        if (f == 0) continue;
        for (uint32_t j = 0; j < n; ++j)
          z[i * n + j] =
              (z[i * n + j] + mulmod(f, y[k * n + j], entry_mod_)) % entry_mod_;
      }
  }
  return pack(z);
}

uint64_t LevelView::inv(uint64_t a) const {
  if (entry_mod_ == 1) return 0;
  std::vector<uint64_t> x = unpack(a);
  if (G_->kind() == GroupKind::Abelian) {
    for (auto& v : x) v = (entry_mod_ - v) % entry_mod_;
    return pack(x);
  }
  return pack(
      matrix_inverse_mod(x, G_->matrix_size(), entry_mod_, G_->prime()));
}

uint64_t LevelView::pow(uint64_t a, uint64_t e) const {
  uint64_t acc = identity_code(), base = a;
  while (e > 0) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  return acc;
}

uint64_t LevelView::conj(uint64_t a, uint64_t g) const {
  return mul(mul(inv(g), a), g);
}

uint64_t LevelView::comm(uint64_t a, uint64_t b) const {
  return mul(mul(inv(a), inv(b)), mul(a, b));
}

uint32_t LevelView::congruence_level(uint64_t a) const {
  if (a == identity_code()) return m_;
  std::vector<uint64_t> x = unpack(a);
  std::vector<uint64_t> diff(slots_);
  if (G_->kind() == GroupKind::Abelian) {
    diff = x;
  } else {
    uint32_t n = G_->matrix_size();
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = 0; j < n; ++j)
        diff[i * n + j] = (x[i * n + j] + entry_mod_ -
                           ((i == j ? 1u : 0u) % entry_mod_)) %
                          entry_mod_;
    uint64_t pe = checked_pow(G_->prime(), G_->eps());
    for (auto& v : diff) v /= pe;  // congruence guarantee: exact division
  }
  // diff is now the level-1 residual; find how p-divisible it is.
  uint32_t lvl = 1;
  uint64_t p = G_->prime();
  while (lvl < m_ - 1) {
    uint64_t q = checked_pow(p, lvl);
    bool all = true;
    for (uint64_t v : diff)
      if (v % q != 0) {
        all = false;
        break;
      }
    if (!all) break;
    ++lvl;
  }
  return lvl;
}

std::unordered_set<uint64_t> LevelView::closure(
    const std::vector<uint64_t>& gens, uint64_t cap) const {
  std::vector<uint64_t> gl;
  for (uint64_t g : gens)
    if (g != identity_code() &&
        std::find(gl.begin(), gl.end(), g) == gl.end())
      gl.push_back(g);
  std::unordered_set<uint64_t> set;
  std::vector<uint64_t> queue;
  set.insert(identity_code());
  queue.push_back(identity_code());
  for (size_t i = 0; i < queue.size(); ++i) {
    for (uint64_t g : gl) {
      uint64_t v = mul(queue[i], g);
      if (set.insert(v).second) {
        if (set.size() > cap)
          throw BudgetExceeded("subgroup closure exceeded budget");
        queue.push_back(v);
      }
    }
  }
  return set;
}

std::unordered_set<uint64_t> LevelView::normal_closure(
    const std::vector<uint64_t>& gens, uint64_t cap) const {
  std::vector<uint64_t> gl;
  for (uint64_t g : gens)
    if (g != identity_code() &&
        std::find(gl.begin(), gl.end(), g) == gl.end())
      gl.push_back(g);
  std::vector<uint64_t> xs = basis_codes();
  std::unordered_set<uint64_t> set;
  std::vector<uint64_t> queue;
  set.insert(identity_code());
  queue.push_back(identity_code());
  size_t done = 0;     // queue prefix already expanded with current gens
  size_t conjed = 0;   // gens already closed under basis conjugation
  for (;;) {
    for (size_t i = done; i < queue.size(); ++i) {
      for (uint64_t g : gl) {
        uint64_t v = mul(queue[i], g);
        if (set.insert(v).second) {
          if (set.size() > cap)
            throw BudgetExceeded("normal closure exceeded budget");
          queue.push_back(v);
        }
      }
    }
    done = queue.size();
    bool grew = false;
    size_t upto = gl.size();
    for (size_t k = conjed; k < upto; ++k) {
      for (uint64_t x : xs) {
        uint64_t c = conj(gl[k], x);
        if (!set.count(c) &&
            std::find(gl.begin(), gl.end(), c) == gl.end()) {
          gl.push_back(c);
          grew = true;
        }
      }
    }
    conjed = upto;
    if (!grew && conjed == gl.size()) break;
    done = 0;  // re-sweep the whole set against the enlarged generator list
  }
  return set;
}

std::vector<uint64_t> LevelView::basis_codes() const {
  std::vector<uint64_t> xs;
  for (uint32_t i = 0; i < G_->dim(); ++i)
    xs.push_back(code_of(G_->basis_element(i)));
  return xs;
}

}  // namespace propkit
