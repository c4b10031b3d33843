#include "propkit/uniform.hpp"

#include <charconv>
#include <sstream>

namespace propkit {

namespace {

uint64_t parse_u64_strict(std::string_view s, size_t pos_base) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("expected unsigned integer", pos_base);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t at = s.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

}  // namespace

UniformGroupModel UniformGroupModel::abelian(uint64_t p, uint32_t d,
                                             uint32_t precision) {
  if (!is_prime_u64(p)) throw ModelMismatch("p must be prime");
  if (d < 1) throw ModelMismatch("dimension must be >= 1");
  if (precision < 1) throw ModelMismatch("precision must be >= 1");
  UniformGroupModel m;
  m.kind_ = GroupKind::Abelian;
  m.p_ = p;
  m.dim_ = d;
  m.mat_ = 0;
  m.eps_ = p == 2 ? 2 : 1;
  m.N_ = precision;
  m.coord_mod_ = checked_pow(p, precision);
  m.elem_mod_ = m.coord_mod_;
  for (uint32_t i = 0; i < d; ++i) {
    GroupElement e;
    e.data.assign(d, 0);
    e.data[i] = 1;
    m.basis_.push_back(std::move(e));
  }
  return m;
}

UniformGroupModel UniformGroupModel::congruence_gl(uint64_t p, uint32_t mm,
                                                   uint32_t precision) {
  if (!is_prime_u64(p)) throw ModelMismatch("p must be prime");
  if (mm < 1) throw ModelMismatch("matrix size must be >= 1");
  if (precision < 1) throw ModelMismatch("precision must be >= 1");
  UniformGroupModel m;
  m.kind_ = GroupKind::CongruenceGL;
  m.p_ = p;
  m.mat_ = mm;
  m.dim_ = mm * mm;
  m.eps_ = p == 2 ? 2 : 1;
  m.N_ = precision;
  m.coord_mod_ = checked_pow(p, precision);
  m.elem_mod_ = checked_pow(p, precision + m.eps_);
  m.init_matrix_basis();
  return m;
}

UniformGroupModel UniformGroupModel::congruence_sl2(uint64_t p,
                                                    uint32_t precision) {
  if (!is_prime_u64(p)) throw ModelMismatch("p must be prime");
  if (precision < 1) throw ModelMismatch("precision must be >= 1");
  UniformGroupModel m;
  m.kind_ = GroupKind::CongruenceSL2;
  m.p_ = p;
  m.mat_ = 2;
  m.dim_ = 3;
  m.eps_ = p == 2 ? 2 : 1;
  m.N_ = precision;
  m.coord_mod_ = checked_pow(p, precision);
  m.elem_mod_ = checked_pow(p, precision + m.eps_);
  m.init_matrix_basis();
  return m;
}

void UniformGroupModel::init_matrix_basis() {
  const uint64_t peps = checked_pow(p_, eps_);
  const uint32_t mm = mat_;
  auto ident = [&] {
    GroupElement e;
    e.data.assign(size_t(mm) * mm, 0);
    for (uint32_t i = 0; i < mm; ++i) e.data[size_t(i) * mm + i] = 1;
    return e;
  };
  basis_.clear();
  if (kind_ == GroupKind::CongruenceGL) {
    // I + p^eps E_ij, row-major order.
    for (uint32_t i = 0; i < mm; ++i)
      for (uint32_t j = 0; j < mm; ++j) {
        GroupElement e = ident();
        e.data[size_t(i) * mm + j] =
            (e.data[size_t(i) * mm + j] + peps) % elem_mod_;
        basis_.push_back(std::move(e));
      }
  } else {
    // sl2: I + p^eps E_12, I + p^eps E_21, diag(1+p^eps, (1+p^eps)^{-1}).
    GroupElement a = ident(), b = ident(), c = ident();
    a.data[1] = peps;
    b.data[2] = peps;
    c.data[0] = (1 + peps) % elem_mod_;
    c.data[3] = invmod((1 + peps) % elem_mod_, elem_mod_);
    basis_.push_back(std::move(a));
    basis_.push_back(std::move(b));
    basis_.push_back(std::move(c));
  }
  // Level-1 images (x_i - I)/p^eps mod p must span the layer; the same
  // spanning matrix solves every deeper level.
  std::vector<fp::Vec> cols;
  for (const auto& e : basis_) {
    fp::Vec col(size_t(mm) * mm, 0);
    GroupElement id = ident();
    for (size_t k = 0; k < e.data.size(); ++k) {
      uint64_t diff = (e.data[k] + elem_mod_ - id.data[k]) % elem_mod_;
      col[k] = uint32_t(diff / peps % p_);
    }
    cols.push_back(std::move(col));
  }
  layer_solver_ = fp::Solver(p_, cols);
  if (layer_solver_.rank() != dim_)
    throw LayerSolveFailure("basis images fail to span the first layer");
}

UniformGroupModel UniformGroupModel::from_spec(const std::string& spec,
                                               uint32_t precision) {
  auto parts = split(spec, ':');
  if (parts.empty()) throw ParseError("empty group spec", 0);
  const std::string& kind = parts[0];
  if (kind == "abelian" || kind == "gl") {
    if (parts.size() != 3)
      throw ParseError("expected " + kind + ":p:d", spec.size());
    uint64_t p = parse_u64_strict(parts[1], 0);
    uint64_t d = parse_u64_strict(parts[2], 0);
    if (d < 1 || d > 16) throw ModelMismatch("d out of range [1,16]");
    return kind == "abelian" ? abelian(p, uint32_t(d), precision)
                             : congruence_gl(p, uint32_t(d), precision);
  }
  if (kind == "sl2") {
    if (parts.size() != 2) throw ParseError("expected sl2:p", spec.size());
    uint64_t p = parse_u64_strict(parts[1], 0);
    return congruence_sl2(p, precision);
  }
  throw ParseError("unknown group kind: " + kind, 0);
}

UniformGroupModel UniformGroupModel::from_config(const std::string& config) {
  std::istringstream in(config);
  std::string tok, kind;
  uint64_t p = 0, d = 0, precision = 0;
  while (in >> tok) {
    size_t eq = tok.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value, got " + tok, 0);
    std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "kind")
      kind = v;
    else if (k == "p")
      p = parse_u64_strict(v, 0);
    else if (k == "d")
      d = parse_u64_strict(v, 0);
    else if (k == "precision")
      precision = parse_u64_strict(v, 0);
    else
      throw ParseError("unknown config key: " + k, 0);
  }
  if (kind.empty() || p == 0 || precision == 0)
    throw ParseError("config requires kind, p, precision", 0);
  if (kind == "sl2") return congruence_sl2(p, uint32_t(precision));
  if (d == 0) throw ParseError("config requires d for kind " + kind, 0);
  if (kind == "abelian")
    return abelian(p, uint32_t(d), uint32_t(precision));
  if (kind == "gl") return congruence_gl(p, uint32_t(d), uint32_t(precision));
  throw ParseError("unknown group kind: " + kind, 0);
}

std::string UniformGroupModel::spec_string() const {
  switch (kind_) {
    case GroupKind::Abelian:
      return "abelian:" + std::to_string(p_) + ":" + std::to_string(dim_);
    case GroupKind::CongruenceGL:
      return "gl:" + std::to_string(p_) + ":" + std::to_string(mat_);
    case GroupKind::CongruenceSL2:
      return "sl2:" + std::to_string(p_);
  }
  return "";
}

std::string UniformGroupModel::config_string() const {
  std::string kind, d;
  switch (kind_) {
    case GroupKind::Abelian:
      kind = "abelian";
      d = " d=" + std::to_string(dim_);
      break;
    case GroupKind::CongruenceGL:
      kind = "gl";
      d = " d=" + std::to_string(mat_);
      break;
    case GroupKind::CongruenceSL2:
      kind = "sl2";
      break;
  }
  return "kind=" + kind + " p=" + std::to_string(p_) + d +
         " precision=" + std::to_string(N_);
}

bool UniformGroupModel::same_model(const UniformGroupModel& o) const {
  return kind_ == o.kind_ && p_ == o.p_ && dim_ == o.dim_ && N_ == o.N_;
}

void UniformGroupModel::validate_element(const GroupElement& g) const {
  size_t want = kind_ == GroupKind::Abelian ? dim_ : size_t(mat_) * mat_;
  if (g.data.size() != want)
    throw ModelMismatch("element has " + std::to_string(g.data.size()) +
                        " entries, model expects " + std::to_string(want));
}

GroupElement UniformGroupModel::identity() const {
  GroupElement e;
  if (kind_ == GroupKind::Abelian) {
    e.data.assign(dim_, 0);
  } else {
    e.data.assign(size_t(mat_) * mat_, 0);
    for (uint32_t i = 0; i < mat_; ++i) e.data[size_t(i) * mat_ + i] = 1;
  }
  return e;
}

GroupElement UniformGroupModel::multiply(const GroupElement& a,
                                         const GroupElement& b) const {
  validate_element(a);
  validate_element(b);
  GroupElement out;
  if (kind_ == GroupKind::Abelian) {
    out.data.resize(dim_);
    for (uint32_t i = 0; i < dim_; ++i) {
      uint64_t s = a.data[i] + b.data[i];
      out.data[i] = s >= coord_mod_ ? s - coord_mod_ : s;
    }
    return out;
  }
  const uint32_t mm = mat_;
  out.data.assign(size_t(mm) * mm, 0);
  for (uint32_t i = 0; i < mm; ++i)
    for (uint32_t k = 0; k < mm; ++k) {
      uint64_t aik = a.data[size_t(i) * mm + k];
      if (aik == 0) continue;
      for (uint32_t j = 0; j < mm; ++j) {
        uint64_t t = out.data[size_t(i) * mm + j] +
                     mulmod(aik, b.data[size_t(k) * mm + j], elem_mod_);
        out.data[size_t(i) * mm + j] = t % elem_mod_;
      }
    }
  return out;
}

GroupElement UniformGroupModel::invert(const GroupElement& a) const {
  validate_element(a);
  GroupElement out;
  if (kind_ == GroupKind::Abelian) {
    out.data.resize(dim_);
    for (uint32_t i = 0; i < dim_; ++i)
      out.data[i] = a.data[i] == 0 ? 0 : coord_mod_ - a.data[i];
    return out;
  }
  // Gauss-Jordan over Z/p^(N+eps); congruence elements keep unit pivots on
  // the diagonal throughout.
  const uint32_t mm = mat_;
  std::vector<uint64_t> w = a.data;
  out = identity();
  for (uint32_t c = 0; c < mm; ++c) {
    uint32_t piv = c;
    while (piv < mm && w[size_t(piv) * mm + c] % p_ == 0) ++piv;
    if (piv == mm) throw ModelMismatch("matrix is not invertible mod p^k");
    if (piv != c)
      for (uint32_t j = 0; j < mm; ++j) {
        std::swap(w[size_t(piv) * mm + j], w[size_t(c) * mm + j]);
        std::swap(out.data[size_t(piv) * mm + j],
                  out.data[size_t(c) * mm + j]);
      }
    uint64_t s = invmod(w[size_t(c) * mm + c], elem_mod_);
    for (uint32_t j = 0; j < mm; ++j) {
      w[size_t(c) * mm + j] = mulmod(w[size_t(c) * mm + j], s, elem_mod_);
      out.data[size_t(c) * mm + j] =
          mulmod(out.data[size_t(c) * mm + j], s, elem_mod_);
    }
    for (uint32_t i = 0; i < mm; ++i) {
      if (i == c) continue;
      uint64_t f = w[size_t(i) * mm + c];
      if (f == 0) continue;
      for (uint32_t j = 0; j < mm; ++j) {
        uint64_t sub1 = mulmod(f, w[size_t(c) * mm + j], elem_mod_);
        w[size_t(i) * mm + j] =
            (w[size_t(i) * mm + j] + elem_mod_ - sub1) % elem_mod_;
        uint64_t sub2 = mulmod(f, out.data[size_t(c) * mm + j], elem_mod_);
        out.data[size_t(i) * mm + j] =
            (out.data[size_t(i) * mm + j] + elem_mod_ - sub2) % elem_mod_;
      }
    }
  }
  return out;
}

GroupElement UniformGroupModel::power_int(const GroupElement& g,
                                          uint64_t e) const {
  if (kind_ == GroupKind::Abelian) {
    validate_element(g);
    GroupElement out;
    out.data.resize(dim_);
    for (uint32_t i = 0; i < dim_; ++i)
      out.data[i] = mulmod(g.data[i], e % coord_mod_, coord_mod_);
    return out;
  }
  GroupElement acc = identity(), base = g;
  while (e) {
    if (e & 1) acc = multiply(acc, base);
    base = multiply(base, base);
    e >>= 1;
  }
  return acc;
}

GroupElement UniformGroupModel::power(const GroupElement& g,
                                      const PadicScalar& lambda) const {
  if (lambda.prime() != p_)
    throw ModelMismatch("exponent prime " + std::to_string(lambda.prime()) +
                        " does not match model prime " + std::to_string(p_));
  if (lambda.precision() < N_)
    throw ModelMismatch("exponent precision must be >= model precision");
  // g^(p^N) lies in P_{N+1}, so the residue mod p^N determines the power
  // exactly at working precision.
  return power_int(g, lambda.truncated(N_).residue());
}

GroupElement UniformGroupModel::encode(
    const std::vector<uint64_t>& codes) const {
  if (codes.size() != dim_)
    throw ModelMismatch("expected " + std::to_string(dim_) +
                        " coordinates, got " + std::to_string(codes.size()));
  for (uint64_t c : codes)
    if (c >= coord_mod_)
      throw ModelMismatch("coordinate " + std::to_string(c) +
                          " out of range for modulus " +
                          std::to_string(coord_mod_));
  if (kind_ == GroupKind::Abelian) {
    GroupElement e;
    e.data = codes;
    return e;
  }
  GroupElement acc = identity();
  for (uint32_t i = 0; i < dim_; ++i)
    if (codes[i] != 0) acc = multiply(acc, power_int(basis_[i], codes[i]));
  return acc;
}

GroupElement UniformGroupModel::encode(const CoordinateVector& coords) const {
  std::vector<uint64_t> codes;
  codes.reserve(coords.size());
  for (const auto& c : coords) {
    if (c.prime() != p_) throw ModelMismatch("coordinate prime mismatch");
    if (c.precision() < N_)
      throw ModelMismatch("coordinate precision below model precision");
    codes.push_back(c.truncated(N_).residue());
  }
  return encode(codes);
}

bool UniformGroupModel::in_level(const GroupElement& g, uint32_t n) const {
  validate_element(g);
  if (n <= 1) return true;
  if (n > N_ + 1)
    throw ModelMismatch("level out of range: " + std::to_string(n));
  if (kind_ == GroupKind::Abelian) {
    uint64_t q = checked_pow(p_, n - 1);
    if (n == N_ + 1) q = coord_mod_;
    for (uint64_t c : g.data)
      if (c % q != 0) return false;
    return true;
  }
  uint64_t q = checked_pow(p_, eps_ + n - 1);
  GroupElement id = identity();
  for (size_t k = 0; k < g.data.size(); ++k) {
    uint64_t diff = (g.data[k] + elem_mod_ - id.data[k]) % elem_mod_;
    if (diff % q != 0) return false;
  }
  return true;
}

std::vector<uint64_t> UniformGroupModel::raw_layer(const GroupElement& g,
                                                   uint32_t n) const {
  // (g - I) / p^(eps + n - 1) mod p, entrywise (matrix kinds only).
  uint64_t q = checked_pow(p_, eps_ + n - 1);
  GroupElement id = identity();
  std::vector<uint64_t> out(g.data.size());
  for (size_t k = 0; k < g.data.size(); ++k) {
    uint64_t diff = (g.data[k] + elem_mod_ - id.data[k]) % elem_mod_;
    out[k] = diff / q % p_;
  }
  return out;
}

fp::Vec UniformGroupModel::layer_coeffs(const GroupElement& g,
                                        uint32_t n) const {
  if (!in_level(g, n))
    throw LayerSolveFailure("element is not in level " + std::to_string(n));
  if (kind_ == GroupKind::Abelian) {
    uint64_t q = checked_pow(p_, n - 1);
    fp::Vec v(dim_);
    for (uint32_t i = 0; i < dim_; ++i)
      v[i] = uint32_t(g.data[i] / q % p_);
    return v;
  }
  std::vector<uint64_t> raw = raw_layer(g, n);
  fp::Vec y(raw.size());
  for (size_t k = 0; k < raw.size(); ++k) y[k] = uint32_t(raw[k]);
  auto sol = layer_solver_.solve(y);
  if (!sol)
    throw LayerSolveFailure(
        "layer vector is outside the basis span at level " +
        std::to_string(n));
  return *sol;
}

std::vector<uint64_t> UniformGroupModel::decode(const GroupElement& g) const {
  validate_element(g);
  if (kind_ == GroupKind::Abelian) return g.data;
  std::vector<uint64_t> codes(dim_, 0);
  GroupElement partial = identity();
  for (uint32_t n = 1; n <= N_; ++n) {
    GroupElement r = multiply(invert(partial), g);
    if (r == identity()) break;
    fp::Vec a = layer_coeffs(r, n);
    uint64_t shift = checked_pow(p_, n - 1);
    bool moved = false;
    for (uint32_t i = 0; i < dim_; ++i)
      if (a[i]) {
        codes[i] += shift * a[i];
        moved = true;
      }
    if (moved) partial = encode(codes);
  }
  if (encode(codes) != g)
    throw LayerSolveFailure("decode did not reproduce the element");
  return codes;
}

CoordinateVector UniformGroupModel::decode_scalars(
    const GroupElement& g) const {
  std::vector<uint64_t> codes = decode(g);
  CoordinateVector out;
  out.reserve(codes.size());
  for (uint64_t c : codes) out.emplace_back(p_, N_, c);
  return out;
}

Valuation UniformGroupModel::omega(const GroupElement& g) const {
  std::vector<uint64_t> codes = decode(g);
  uint32_t best = N_ + 1;
  for (uint64_t c : codes) {
    if (c == 0) continue;
    uint32_t v = 0;
    while (c % p_ == 0) {
      c /= p_;
      ++v;
    }
    best = std::min(best, v + 1);
  }
  if (best == N_ + 1) return Valuation::at_least(N_ + 1);
  return Valuation::finite(best);
}

std::vector<uint64_t> UniformGroupModel::f_map(
    const std::vector<uint64_t>& lambda, const std::vector<uint64_t>& mu) const {
  return decode(multiply(encode(lambda), invert(encode(mu))));
}

GroupElement UniformGroupModel::random_element(std::mt19937_64& rng) const {
  std::vector<uint64_t> codes(dim_);
  for (auto& c : codes) c = rng() % coord_mod_;
  return encode(codes);
}

std::string UniformGroupModel::print_coords(const GroupElement& g) const {
  std::vector<uint64_t> codes = decode(g);
  std::string s = "x(";
  for (size_t i = 0; i < codes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(codes[i]);
  }
  return s + ")";
}

std::string UniformGroupModel::print_raw(const GroupElement& g) const {
  validate_element(g);
  if (kind_ == GroupKind::Abelian) return print_coords(g);
  std::string s = "[";
  for (uint32_t i = 0; i < mat_; ++i) {
    if (i) s += ",";
    s += "[";
    for (uint32_t j = 0; j < mat_; ++j) {
      if (j) s += ",";
      s += std::to_string(g.data[size_t(i) * mat_ + j]);
    }
    s += "]";
  }
  return s + "]";
}

GroupElement UniformGroupModel::parse_element(const std::string& text) const {
  auto expect = [&](size_t i, char c) {
    if (i >= text.size() || text[i] != c)
      throw ParseError(std::string("expected '") + c + "'", i);
  };
  if (!text.empty() && text[0] == 'x') {
    expect(1, '(');
    if (text.back() != ')') throw ParseError("expected ')'", text.size());
    auto parts = split(text.substr(2, text.size() - 3), ',');
    if (parts.size() != dim_)
      throw ModelMismatch("expected " + std::to_string(dim_) +
                          " coordinates, got " + std::to_string(parts.size()));
    std::vector<uint64_t> codes;
    for (auto& p : parts) codes.push_back(parse_u64_strict(p, 0));
    return encode(codes);
  }
  if (!text.empty() && text[0] == '[') {
    if (kind_ == GroupKind::Abelian)
      throw ModelMismatch("abelian models have no matrix form");
    // [[a,b],[c,d]]: strip outer brackets, split rows.
    if (text.back() != ']') throw ParseError("expected ']'", text.size());
    std::string body = text.substr(1, text.size() - 2);
    GroupElement g;
    g.data.assign(size_t(mat_) * mat_, 0);
    size_t i = 0;
    for (uint32_t r = 0; r < mat_; ++r) {
      if (r) {
        if (i >= body.size() || body[i] != ',')
          throw ParseError("expected ','", i + 1);
        ++i;
      }
      if (i >= body.size() || body[i] != '[')
        throw ParseError("expected '['", i + 1);
      size_t close = body.find(']', i);
      if (close == std::string::npos)
        throw ParseError("expected ']'", body.size());
      auto parts = split(body.substr(i + 1, close - i - 1), ',');
      if (parts.size() != mat_)
        throw ModelMismatch("matrix row needs " + std::to_string(mat_) +
                            " entries");
      for (uint32_t c = 0; c < mat_; ++c) {
        uint64_t v = parse_u64_strict(parts[c], 0);
        if (v >= elem_mod_)
          throw ModelMismatch("entry " + std::to_string(v) +
                              " out of range for modulus " +
                              std::to_string(elem_mod_));
        g.data[size_t(r) * mat_ + c] = v;
      }
      i = close + 1;
    }
    if (i != body.size()) throw ParseError("trailing characters", i + 1);
    // Validate congruence-subgroup membership; decode() will reject
    // anything outside the model (wrong determinant, wrong layer).
    if (!in_level(g, 1) || decode(g).empty())
      throw ModelMismatch("matrix is not in the model");
    uint64_t peps = checked_pow(p_, eps_);
    GroupElement id = identity();
    for (size_t k = 0; k < g.data.size(); ++k) {
      uint64_t diff = (g.data[k] + elem_mod_ - id.data[k]) % elem_mod_;
      if (diff % peps != 0)
        throw ModelMismatch("matrix is not congruent to I mod p^eps");
    }
    return g;
  }
  throw ParseError("expected element: x(...) or [[...]]", 0);
}

}  // namespace propkit
