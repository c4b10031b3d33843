// prop-kit: batch frontend over the propkit library.  One subcommand per
// process, deterministic output bytes for a fixed flag set.

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "propkit/errors.hpp"
#include "propkit/finitep.hpp"
#include "propkit/goodbasis.hpp"
#include "propkit/niplab.hpp"
#include "propkit/padic.hpp"
#include "propkit/termlang.hpp"
#include "propkit/uniform.hpp"

using json = nlohmann::ordered_json;
using namespace propkit;

namespace {

// Flag-level mistakes that CLI11 cannot see (bad combinations, malformed
// sub-grammars).  Reported like CLI11 errors and exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string group = "abelian:3:2";
  uint32_t precision = 6;
  std::string format = "table";
  uint64_t budget = 4096;   // enumeration / table-order budget
  uint32_t cap = 12;        // shatter-search cap
  uint64_t seed = 0;
};

std::string config_line(const RunConfig& c) {
  std::ostringstream os;
  os << "group=" << c.group << " precision=" << c.precision
     << " format=" << c.format << " budget=" << c.budget << " cap=" << c.cap
     << " seed=" << c.seed;
  return os.str();
}

json config_json(const RunConfig& c) {
  json j;
  j["group"] = c.group;
  j["precision"] = c.precision;
  j["format"] = c.format;
  j["budget"] = c.budget;
  j["cap"] = c.cap;
  j["seed"] = c.seed;
  return j;
}

// Emit the envelope: '#' header lines for table/csv, a single object for
// json.  `body` renders the result in the selected format.
void emit(const RunConfig& cfg, const std::string& command,
          const json& result,
          const std::function<void(std::ostream&)>& body) {
  if (cfg.format == "json") {
    json j;
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["result"] = result;
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << "# command=" << command << "\n";
  std::cout << "# " << config_line(cfg) << "\n";
  body(std::cout);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<GroupElement> parse_elements(const UniformGroupModel& G,
                                         const std::vector<std::string>& flags) {
  std::vector<GroupElement> out;
  for (const auto& f : flags)
    for (const auto& piece : split_list(f, ';')) out.push_back(G.parse_element(piece));
  return out;
}

// Exponent flag: a plain (possibly negative) integer, or a scalar literal
// "p^N:r" matched against the model.
GroupElement apply_exponent(const UniformGroupModel& G, const GroupElement& g,
                            const std::string& text) {
  if (text.find('^') != std::string::npos)
    return G.power(g, PadicScalar::parse(text));
  size_t pos = 0;
  long long e = 0;
  try {
    e = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw UsageError("--exp expects an integer or a p^N:r literal, got '" + text + "'");
  }
  if (pos != text.size())
    throw UsageError("--exp expects an integer or a p^N:r literal, got '" + text + "'");
  if (e >= 0) return G.power_int(g, static_cast<uint64_t>(e));
  return G.power_int(G.invert(g), static_cast<uint64_t>(-e));
}

json element_result(const UniformGroupModel& G, const GroupElement& g) {
  json r;
  r["text"] = G.print_coords(g);
  r["codes"] = G.decode(g);
  json scalars = json::array();
  for (const auto& s : G.decode_scalars(g)) scalars.push_back(s.to_string());
  r["scalars"] = scalars;
  return r;
}

void emit_element(const RunConfig& cfg, const std::string& command,
                  const UniformGroupModel& G, const GroupElement& g) {
  emit(cfg, command, element_result(G, g),
       [&](std::ostream& os) { os << G.print_coords(g) << "\n"; });
}

OpenSubgroup subgroup_from_flags(const UniformGroupModel& G,
                                 const std::vector<std::string>& gens,
                                 const std::string& handle) {
  if (!gens.empty() && !handle.empty())
    throw UsageError("pass either --gens or --sub, not both");
  if (!gens.empty()) return good_basis_from_generators(G, parse_elements(G, gens));
  if (!handle.empty()) return parse_open_subgroup(G, handle);
  throw UsageError("one of --gens or --sub is required");
}

json subgroup_json(const OpenSubgroup& H) {
  json r;
  r["handle"] = to_string(H);
  r["levels"] = H.levels;
  r["positions"] = H.positions;
  r["index_exp"] = H.index_exponent();
  return r;
}

// ---- finite-table spec: wreath:P:N | g2:P:Q1-Q2-..:M | quotient:LEVEL |
// cyclic:N | product:N1-N2-.. ----------------------------------------------
FiniteGroupTable table_from_spec(const std::string& spec, const RunConfig& cfg) {
  auto parts = split_list(spec, ':');
  if (parts.empty()) throw UsageError("empty --table spec");
  auto need = [&](size_t n) {
    if (parts.size() != n)
      throw UsageError("--table spec '" + spec + "' has the wrong arity");
  };
  auto num = [&](const std::string& s) -> uint64_t {
    try {
      size_t pos = 0;
      uint64_t v = std::stoull(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad number '" + s + "' in --table spec");
    }
  };
  const std::string& kind = parts[0];
  if (kind == "wreath") {
    need(3);
    return build_wreath(num(parts[1]), static_cast<uint32_t>(num(parts[2])),
                        cfg.budget);
  }
  if (kind == "g2") {
    need(4);
    std::vector<uint64_t> qs;
    for (const auto& q : split_list(parts[2], '-')) qs.push_back(num(q));
    return build_metacyclic_g2(num(parts[1]), qs,
                               static_cast<uint32_t>(num(parts[3])), cfg.budget);
  }
  if (kind == "quotient") {
    need(2);
    UniformGroupModel G = UniformGroupModel::from_spec(cfg.group, cfg.precision);
    return build_quotient(G, static_cast<uint32_t>(num(parts[1])), cfg.budget);
  }
  if (kind == "cyclic") {
    need(2);
    return build_cyclic(num(parts[1]), cfg.budget);
  }
  if (kind == "product") {
    need(2);
    auto ns = split_list(parts[1], '-');
    if (ns.empty()) throw UsageError("product spec needs at least one factor");
    FiniteGroupTable F = build_cyclic(num(ns[0]), cfg.budget);
    for (size_t i = 1; i < ns.size(); ++i)
      F = direct_product(F, build_cyclic(num(ns[i]), cfg.budget), cfg.budget);
    return F;
  }
  throw UsageError("unknown --table kind '" + kind + "'");
}

FamilySelector selector_from_flags(const std::string& family,
                                   uint64_t max_index) {
  if (family == "base") return FamilySelector::wreath_base();
  if (family == "cosets") return FamilySelector::up_to_index(max_index);
  throw UsageError("--family must be 'base' or 'cosets', got '" + family + "'");
}

void emit_table_build(const RunConfig& cfg, const std::string& command,
                      const FiniteGroupTable& F) {
  json r;
  r["order"] = F.order;
  r["origin"] = F.origin;
  r["prime"] = F.prime;
  r["labels"] = F.labels;
  json rows = json::array();
  for (uint32_t a = 0; a < F.order; ++a) {
    json row = json::array();
    for (uint32_t b = 0; b < F.order; ++b)
      row.push_back(F.at(static_cast<uint16_t>(a), static_cast<uint16_t>(b)));
    rows.push_back(std::move(row));
  }
  r["mul"] = std::move(rows);
  emit(cfg, command, r, [&](std::ostream& os) {
    if (cfg.format == "csv") {
      os << mul_table_csv(F);
      return;
    }
    os << "order=" << F.order << "\n";
    os << "origin=" << F.origin << "\n";
    os << "prime=" << F.prime << "\n";
  });
}

std::string join_u32(const std::vector<uint32_t>& v, char sep) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << sep;
    os << v[i];
  }
  return os.str();
}

void emit_shatter(const RunConfig& cfg, const std::string& command,
                  const DefinableFamily& fam, const ShatterReport& rep) {
  json r;
  r["mode"] = rep.mode;
  r["family"] = fam.descriptor;
  r["family_size"] = static_cast<uint64_t>(fam.sets.size());
  r["dimension"] = rep.dimension;
  r["capped"] = rep.search_capped;
  r["witness_items"] = rep.witness_items;
  json pats = json::array();
  for (const auto& [mask, item] : rep.witness_patterns) {
    json p;
    p["pattern"] = mask;
    p["item"] = item;
    pats.push_back(std::move(p));
  }
  r["witness_patterns"] = std::move(pats);
  emit(cfg, command, r, [&](std::ostream& os) {
    if (cfg.format == "csv") {
      os << "mode," << rep.mode << "\n";
      os << "family," << fam.descriptor << "\n";
      os << "family_size," << fam.sets.size() << "\n";
      os << "dimension," << rep.dimension << "\n";
      os << "capped," << (rep.search_capped ? "true" : "false") << "\n";
      for (const auto& it : rep.witness_items) os << "witness," << it << "\n";
      for (const auto& [mask, item] : rep.witness_patterns)
        os << "pattern," << mask << "," << item << "\n";
      return;
    }
    os << "mode=" << rep.mode << "\n";
    os << "family=" << fam.descriptor << "\n";
    os << "family_size=" << fam.sets.size() << "\n";
    os << "dimension=" << rep.dimension << "\n";
    os << "capped=" << (rep.search_capped ? "true" : "false") << "\n";
    for (const auto& it : rep.witness_items) os << "witness " << it << "\n";
    for (const auto& [mask, item] : rep.witness_patterns)
      os << "pattern " << mask << " -> " << item << "\n";
  });
}

int dispatch(const RunConfig& cfg, const std::string& command,
             const std::map<std::string, std::string>& sflags,
             const std::vector<std::string>& elts,
             const std::vector<std::string>& gens) {
  auto sflag = [&](const std::string& name) -> const std::string& {
    static const std::string empty;
    auto it = sflags.find(name);
    return it == sflags.end() ? empty : it->second;
  };
  auto nflag = [&](const std::string& name, uint64_t dflt) -> uint64_t {
    const std::string& s = sflag(name);
    if (s.empty()) return dflt;
    try {
      size_t pos = 0;
      uint64_t v = std::stoull(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("flag --" + name + " expects a number, got '" + s + "'");
    }
  };
  auto model = [&]() {
    return UniformGroupModel::from_spec(cfg.group, cfg.precision);
  };
  auto one_elt = [&](const UniformGroupModel& G) {
    auto es = parse_elements(G, elts);
    if (es.size() != 1) throw UsageError("exactly one --elt is required");
    return es[0];
  };

  // ---- elt ----------------------------------------------------------------
  if (command == "elt.mul") {
    UniformGroupModel G = model();
    auto es = parse_elements(G, elts);
    if (es.size() < 2) throw UsageError("elt mul needs at least two --elt values");
    GroupElement acc = es[0];
    for (size_t i = 1; i < es.size(); ++i) acc = G.multiply(acc, es[i]);
    emit_element(cfg, command, G, acc);
    return 0;
  }
  if (command == "elt.pow") {
    UniformGroupModel G = model();
    const std::string& e = sflag("exp");
    if (e.empty()) throw UsageError("elt pow requires --exp");
    emit_element(cfg, command, G, apply_exponent(G, one_elt(G), e));
    return 0;
  }
  if (command == "elt.omega") {
    UniformGroupModel G = model();
    Valuation om = G.omega(one_elt(G));
    json r;
    r["finite"] = om.is_finite();
    r["level"] = om.bound();
    emit(cfg, command, r,
         [&](std::ostream& os) { os << om.to_string() << "\n"; });
    return 0;
  }
  if (command == "elt.coords") {
    UniformGroupModel G = model();
    emit_element(cfg, command, G, one_elt(G));
    return 0;
  }

  // ---- term ---------------------------------------------------------------
  if (command == "term.eval") {
    const std::string& expr = sflag("expr");
    if (expr.empty()) throw UsageError("term eval requires --expr");
    uint64_t prime = nflag("prime", 3);
    Environment env(prime, cfg.precision);
    for (const auto& b : split_list(sflag("bind"), ';')) {
      auto eq = b.find('=');
      if (eq == std::string::npos)
        throw UsageError("--bind expects name=value, got '" + b + "'");
      std::string name = b.substr(0, eq), val = b.substr(eq + 1);
      if (val.find('^') != std::string::npos) {
        env.bind(name, PadicScalar::parse(val));
      } else {
        try {
          size_t pos = 0;
          long long v = std::stoll(val, &pos);
          if (pos != val.size()) throw std::invalid_argument(val);
          PadicScalar s = v >= 0
              ? PadicScalar::from_int(prime, cfg.precision, static_cast<uint64_t>(v))
              : PadicScalar::from_int(prime, cfg.precision, static_cast<uint64_t>(-v)).negated();
          env.bind(name, s);
        } catch (const std::exception&) {
          throw UsageError("--bind value '" + val + "' is not a number or p^N:r literal");
        }
      }
    }
    auto parsed = parse_any(expr);
    json r;
    if (std::holds_alternative<Term>(parsed)) {
      const Term& t = std::get<Term>(parsed);
      PadicScalar v = eval_term(t, env);
      r["kind"] = "term";
      r["printed"] = print_term(t);
      r["value"] = v.to_string();
      emit(cfg, command, r,
           [&](std::ostream& os) { os << v.to_string() << "\n"; });
    } else {
      const Formula& f = std::get<Formula>(parsed);
      bool v = eval_formula(f, env);
      r["kind"] = "formula";
      r["printed"] = print_formula(f);
      r["value"] = v;
      emit(cfg, command, r,
           [&](std::ostream& os) { os << (v ? "true" : "false") << "\n"; });
    }
    return 0;
  }

  // ---- sub ----------------------------------------------------------------
  if (command == "sub.basis") {
    UniformGroupModel G = model();
    OpenSubgroup H = subgroup_from_flags(G, gens, sflag("sub"));
    emit(cfg, command, subgroup_json(H), [&](std::ostream& os) {
      os << to_string(H) << "\n";
      os << "levels=" << join_u32(H.levels, ',') << "\n";
      os << "positions=" << join_u32(H.positions, ',') << "\n";
      os << "index_exp=" << H.index_exponent() << "\n";
    });
    return 0;
  }
  if (command == "sub.member") {
    UniformGroupModel G = model();
    OpenSubgroup H = subgroup_from_flags(G, gens, sflag("sub"));
    bool in = subgroup_contains(G, H, one_elt(G));
    json r;
    r["member"] = in;
    emit(cfg, command, r,
         [&](std::ostream& os) { os << (in ? "true" : "false") << "\n"; });
    return 0;
  }
  if (command == "sub.index") {
    UniformGroupModel G = model();
    OpenSubgroup H = subgroup_from_flags(G, gens, sflag("sub"));
    uint64_t idx = subgroup_index(G, H);
    json r;
    r["index"] = idx;
    r["index_exp"] = H.index_exponent();
    emit(cfg, command, r, [&](std::ostream& os) { os << idx << "\n"; });
    return 0;
  }
  if (command == "sub.enumerate" || command == "sub.count") {
    UniformGroupModel G = model();
    uint32_t k = static_cast<uint32_t>(nflag("max-index-exp", 1));
    auto subs = enumerate_open_subgroups(G, k, cfg.budget);
    if (command == "sub.enumerate") {
      json r;
      r["count"] = static_cast<uint64_t>(subs.size());
      json arr = json::array();
      for (const auto& H : subs) {
        json e;
        e["index_exp"] = H.index_exponent();
        e["handle"] = to_string(H);
        arr.push_back(std::move(e));
      }
      r["subgroups"] = std::move(arr);
      emit(cfg, command, r, [&](std::ostream& os) {
        for (const auto& H : subs) {
          if (cfg.format == "csv")
            os << H.index_exponent() << "," << to_string(H) << "\n";
          else
            os << to_string(H) << "\n";
        }
      });
      return 0;
    }
    // count: one row per exponent 1..k (the whole group, exponent 0, is
    // not a proper covering row).
    std::vector<uint64_t> counts(k + 1, 0);
    for (const auto& H : subs) counts[H.index_exponent()]++;
    json r;
    json arr = json::array();
    for (uint32_t e = 1; e <= k; ++e) {
      json row;
      row["k"] = e;
      row["count"] = counts[e];
      arr.push_back(std::move(row));
    }
    r["counts"] = std::move(arr);
    emit(cfg, command, r, [&](std::ostream& os) {
      for (uint32_t e = 1; e <= k; ++e) os << e << "," << counts[e] << "\n";
    });
    return 0;
  }

  // ---- quotient -----------------------------------------------------------
  if (command == "quotient.build") {
    UniformGroupModel G = model();
    uint32_t level = static_cast<uint32_t>(nflag("level", 2));
    emit_table_build(cfg, command, build_quotient(G, level, cfg.budget));
    return 0;
  }
  if (command == "quotient.series") {
    UniformGroupModel G = model();
    uint32_t level = static_cast<uint32_t>(nflag("level", 2));
    FiniteGroupTable F = build_quotient(G, level, cfg.budget);
    auto chain = lower_p_series(F);
    json r;
    json arr = json::array();
    for (size_t i = 0; i < chain.size(); ++i) {
      json row;
      row["n"] = static_cast<uint64_t>(i + 1);
      row["order"] = chain[i].count();
      arr.push_back(std::move(row));
    }
    r["series"] = std::move(arr);
    emit(cfg, command, r, [&](std::ostream& os) {
      for (size_t i = 0; i < chain.size(); ++i) {
        if (cfg.format == "csv")
          os << (i + 1) << "," << chain[i].count() << "\n";
        else
          os << "P_" << (i + 1) << " order=" << chain[i].count() << "\n";
      }
    });
    return 0;
  }
  if (command == "quotient.frattini" || command == "quotient.rank") {
    UniformGroupModel G = model();
    uint32_t level = static_cast<uint32_t>(nflag("level", 2));
    FiniteGroupTable F = build_quotient(G, level, cfg.budget);
    if (command == "quotient.rank") {
      uint32_t rk = rank_of(F);
      json r;
      r["rank"] = rk;
      emit(cfg, command, r, [&](std::ostream& os) { os << rk << "\n"; });
      return 0;
    }
    ElemSet phi = frattini(F);
    uint64_t index = F.order / phi.count();
    uint32_t d = 0;
    for (uint64_t q = index; q > 1; q /= F.prime) ++d;
    json r;
    r["frattini_order"] = phi.count();
    r["index"] = index;
    r["rank"] = d;
    emit(cfg, command, r, [&](std::ostream& os) {
      os << "frattini_order=" << phi.count() << "\n";
      os << "index=" << index << "\n";
      os << "rank=" << d << "\n";
    });
    return 0;
  }

  // ---- build --------------------------------------------------------------
  if (command == "build.wreath") {
    uint64_t p = nflag("p", 3);
    uint32_t n = static_cast<uint32_t>(nflag("n", 1));
    emit_table_build(cfg, command, build_wreath(p, n, cfg.budget));
    return 0;
  }
  if (command == "build.g2") {
    uint64_t p = nflag("p", 3);
    uint32_t m = static_cast<uint32_t>(nflag("m", 1));
    const std::string& qtext = sflag("qs");
    if (qtext.empty()) throw UsageError("build g2 requires --qs (comma-separated)");
    std::vector<uint64_t> qs;
    for (const auto& q : split_list(qtext, ',')) {
      try {
        size_t pos = 0;
        qs.push_back(std::stoull(q, &pos));
        if (pos != q.size()) throw std::invalid_argument(q);
      } catch (const std::exception&) {
        throw UsageError("bad --qs entry '" + q + "'");
      }
    }
    emit_table_build(cfg, command, build_metacyclic_g2(p, qs, m, cfg.budget));
    return 0;
  }

  // ---- lab ----------------------------------------------------------------
  if (command == "lab.indep" || command == "lab.vc") {
    const std::string& tspec = sflag("table");
    if (tspec.empty()) throw UsageError("this subcommand requires --table");
    FiniteGroupTable F = table_from_spec(tspec, cfg);
    FamilySelector sel = selector_from_flags(
        sflag("family").empty() ? "cosets" : sflag("family"),
        nflag("max-index", 2));
    EnumOptions eo;
    eo.subgroup_cap = cfg.budget * 16;
    DefinableFamily fam = coset_family(F, sel, eo);
    ShatterReport rep = command == "lab.indep"
                            ? independence_dimension(fam, cfg.cap)
                            : vc_dimension(fam, cfg.cap);
    emit_shatter(cfg, command, fam, rep);
    return 0;
  }
  if (command == "lab.tp2") {
    const std::string& tspec = sflag("table");
    if (tspec.empty()) throw UsageError("this subcommand requires --table");
    FiniteGroupTable F = table_from_spec(tspec, cfg);
    uint32_t rows = static_cast<uint32_t>(nflag("rows", 1));
    uint32_t cols = static_cast<uint32_t>(nflag("cols", 2));
    TP2Array arr = tp2_array(F, rows, cols);
    json r;
    r["rows"] = arr.rows;
    r["cols"] = arr.cols;
    r["rows_disjoint"] = arr.rows_disjoint;
    r["paths_consistent"] = arr.paths_consistent;
    r["col_sets"] = arr.col_sets;
    r["coset_labels"] = arr.coset_labels;
    json wit = json::array();
    for (const auto& w : arr.path_witnesses) {
      json e;
      e["path"] = w.path;
      e["element"] = w.element;
      e["ok"] = w.ok;
      wit.push_back(std::move(e));
    }
    r["witnesses"] = std::move(wit);
    emit(cfg, command, r, [&](std::ostream& os) {
      if (cfg.format == "csv") {
        os << "rows," << arr.rows << "\n"
           << "cols," << arr.cols << "\n"
           << "rows_disjoint," << (arr.rows_disjoint ? "true" : "false") << "\n"
           << "paths_consistent," << (arr.paths_consistent ? "true" : "false")
           << "\n";
        for (const auto& w : arr.path_witnesses)
          os << "witness," << join_u32(w.path, '|') << "," << w.element << ","
             << (w.ok ? "true" : "false") << "\n";
        return;
      }
      os << "rows=" << arr.rows << " cols=" << arr.cols << "\n";
      os << "rows_disjoint=" << (arr.rows_disjoint ? "true" : "false") << "\n";
      os << "paths_consistent=" << (arr.paths_consistent ? "true" : "false")
         << "\n";
      for (const auto& w : arr.path_witnesses)
        os << "path " << join_u32(w.path, ',') << " element=" << w.element
           << " ok=" << (w.ok ? "true" : "false") << "\n";
    });
    return 0;
  }
  if (command == "lab.bswidth") {
    const std::string& tspec = sflag("table");
    if (tspec.empty()) throw UsageError("this subcommand requires --table");
    FiniteGroupTable F = table_from_spec(tspec, cfg);
    FamilySelector sel = selector_from_flags(
        sflag("family").empty() ? "cosets" : sflag("family"),
        nflag("max-index", 2));
    EnumOptions eo;
    eo.subgroup_cap = cfg.budget * 16;
    DefinableFamily fam = coset_family(F, sel, eo);
    std::vector<uint32_t> witness;
    uint32_t w = baldwin_saxl_width(fam.subgroups, &witness);
    json r;
    r["width"] = w;
    r["family"] = fam.descriptor;
    r["witness"] = witness;
    json labels = json::array();
    for (uint32_t i : witness) labels.push_back(fam.subgroup_labels[i]);
    r["labels"] = std::move(labels);
    emit(cfg, command, r, [&](std::ostream& os) {
      os << "width=" << w << "\n";
      for (uint32_t i : witness)
        os << "witness " << fam.subgroup_labels[i] << "\n";
    });
    return 0;
  }

  throw UsageError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);

  CLI::App app{"prop-kit: coordinates, open subgroups and definable-family "
               "experiments over uniform pro-p models"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::map<std::string, std::string> sflags;
  std::vector<std::string> elts, gens;
  std::string command;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--group", cfg.group, "group spec kind:p:d (abelian, gl, sl2)")
        ->capture_default_str();
    sc->add_option("--precision", cfg.precision, "working precision N >= 1")
        ->capture_default_str();
    sc->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();
    sc->add_option("--budget", cfg.budget, "enumeration/order budget")
        ->capture_default_str();
    sc->add_option("--cap", cfg.cap, "shatter-search cap")
        ->capture_default_str();
    sc->add_option("--seed", cfg.seed, "seed for randomized checks")
        ->capture_default_str();
  };
  auto add_str = [&](CLI::App* sc, const std::string& name,
                     const std::string& help) {
    sc->add_option("--" + name, sflags[name], help);
  };

  struct SubSpec {
    const char* group;
    const char* name;
    const char* help;
    std::vector<const char*> strs;
    bool has_elt = false;
    bool has_gens = false;
  };
  const std::vector<SubSpec> specs = {
      {"elt", "mul", "multiply elements", {}, true, false},
      {"elt", "pow", "raise an element to an exponent", {"exp"}, true, false},
      {"elt", "omega", "congruence level of an element", {}, true, false},
      {"elt", "coords", "canonical coordinates of an element", {}, true, false},
      {"term", "eval", "evaluate a term or formula", {"expr", "bind", "prime"}, false, false},
      {"sub", "basis", "canonical good basis from generators", {"sub"}, false, true},
      {"sub", "member", "membership test against a subgroup", {"sub"}, true, true},
      {"sub", "index", "index of an open subgroup", {"sub"}, false, true},
      {"sub", "enumerate", "list open subgroups up to index p^k", {"max-index-exp"}, false, false},
      {"sub", "count", "count open subgroups per index exponent", {"max-index-exp"}, false, false},
      {"quotient", "build", "finite congruence quotient table", {"level"}, false, false},
      {"quotient", "series", "lower p-series of a quotient", {"level"}, false, false},
      {"quotient", "frattini", "Frattini subgroup of a quotient", {"level"}, false, false},
      {"quotient", "rank", "max subgroup generator rank of a quotient", {"level"}, false, false},
      {"build", "wreath", "wreath-product table C_p wr C_{p^n}", {"p", "n"}, false, false},
      {"build", "g2", "metacyclic-by-cyclic table", {"p", "qs", "m"}, false, false},
      {"lab", "indep", "independence dimension of a coset family", {"table", "family", "max-index"}, false, false},
      {"lab", "vc", "VC dimension of a coset family", {"table", "family", "max-index"}, false, false},
      {"lab", "tp2", "rows-by-cols inconsistent coset array", {"table", "rows", "cols"}, false, false},
      {"lab", "bswidth", "intersection width of a subgroup family", {"table", "family", "max-index"}, false, false},
  };

  std::map<std::string, CLI::App*> groups;
  for (const auto& s : specs) {
    if (!groups.count(s.group)) {
      CLI::App* g = app.add_subcommand(s.group, "");
      g->require_subcommand(1);
      groups[s.group] = g;
    }
    CLI::App* sc = groups[s.group]->add_subcommand(s.name, s.help);
    add_common(sc);
    for (const char* f : s.strs) add_str(sc, f, "");
    if (s.has_elt) sc->add_option("--elt", elts, "element literal");
    if (s.has_gens) sc->add_option("--gens", gens, "generator list (';' separated)");
    std::string cmd = std::string(s.group) + "." + s.name;
    sc->callback([&command, cmd]() { command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cfg.precision < 1) throw UsageError("--precision must be >= 1");
    if (cfg.budget == 0) throw UsageError("--budget must be positive");
    if (cfg.cap == 0) throw UsageError("--cap must be positive");
    return dispatch(cfg, command, sflags, elts, gens);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    // Library errors carry their own type name in what().
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
