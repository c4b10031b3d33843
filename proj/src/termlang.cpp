#include "propkit/termlang.hpp"

#include <cctype>
#include <charconv>

namespace propkit {

namespace {

struct Token {
  enum class Kind { LParen, RParen, Int, Ident, End };
  Kind kind;
  std::string text;
  size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < text_.size() && std::isspace((unsigned char)text_[i_])) ++i_;
    size_t start = i_;
    if (i_ >= text_.size()) {
      tok_ = {Token::Kind::End, "", start};
      return;
    }
    char c = text_[i_];
    if (c == '(') {
      ++i_;
      tok_ = {Token::Kind::LParen, "(", start};
      return;
    }
    if (c == ')') {
      ++i_;
      tok_ = {Token::Kind::RParen, ")", start};
      return;
    }
    if (c == '-' || std::isdigit((unsigned char)c)) {
      size_t j = i_ + 1;
      while (j < text_.size() && std::isdigit((unsigned char)text_[j])) ++j;
      if (j == i_ + 1 && c == '-')
        throw ParseError("stray '-'", start);
      tok_ = {Token::Kind::Int, std::string(text_.substr(i_, j - i_)), start};
      i_ = j;
      return;
    }
    if (std::isalpha((unsigned char)c)) {
      size_t j = i_ + 1;
      while (j < text_.size() &&
             (std::isalnum((unsigned char)text_[j]) || text_[j] == '_'))
        ++j;
      tok_ = {Token::Kind::Ident, std::string(text_.substr(i_, j - i_)),
              start};
      i_ = j;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

  std::string_view text_;
  size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Term term() {
    Term t = parse_term_inner();
    expect_end();
    return t;
  }

  Formula formula() {
    Formula f = parse_formula_inner();
    expect_end();
    return f;
  }

  std::variant<Term, Formula> any() {
    // A bare identifier or integer is a term; otherwise dispatch on the
    // head symbol of the first list.
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::LParen) return term();
    Lexer probe = lex_;
    probe.take();
    Token head = probe.take();
    if (head.kind == Token::Kind::Ident &&
        (head.text == "eq" || head.text == "pow" || head.text == "not" ||
         head.text == "and" || head.text == "or"))
      return formula();
    return term();
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    if (t.kind == Token::Kind::End)
      throw ParseError(msg + " (at end of input)", t.pos);
    throw ParseError(msg + ", got '" + t.text + "'", t.pos);
  }

  void expect_end() {
    if (lex_.peek().kind != Token::Kind::End)
      fail(lex_.peek(), "expected end of input");
  }

  Token expect(Token::Kind k, const std::string& what) {
    if (lex_.peek().kind != k) fail(lex_.peek(), "expected " + what);
    return lex_.take();
  }

  Term parse_term_inner() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Int) {
      Token tok = lex_.take();
      Term out;
      out.kind = Term::Kind::IntLit;
      int64_t v = 0;
      auto [p, ec] =
          std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(),
                          v);
      if (ec != std::errc() || p != tok.text.data() + tok.text.size())
        throw ParseError("integer literal out of range", tok.pos);
      out.value = v;
      return out;
    }
    if (t.kind == Token::Kind::Ident) {
      Token tok = lex_.take();
      Term out;
      out.kind = Term::Kind::Var;
      out.name = tok.text;
      return out;
    }
    if (t.kind != Token::Kind::LParen) fail(t, "expected term");
    lex_.take();
    Token head = expect(Token::Kind::Ident, "operator");
    Term out;
    if (head.text == "add" || head.text == "mul") {
      out.kind = head.text == "add" ? Term::Kind::Add : Term::Kind::Mul;
      out.args.push_back(parse_term_inner());
      out.args.push_back(parse_term_inner());
    } else if (head.text == "neg") {
      out.kind = Term::Kind::Neg;
      out.args.push_back(parse_term_inner());
    } else if (head.text == "D") {
      out.kind = Term::Kind::Div;
      out.args.push_back(parse_term_inner());
      out.args.push_back(parse_term_inner());
    } else if (head.text == "ser") {
      out.kind = Term::Kind::Ser;
      out.name = expect(Token::Kind::Ident, "series name").text;
      while (lex_.peek().kind != Token::Kind::RParen &&
             lex_.peek().kind != Token::Kind::End)
        out.args.push_back(parse_term_inner());
    } else {
      fail(head, "unknown term operator");
    }
    expect(Token::Kind::RParen, "')'");
    return out;
  }

  Formula parse_formula_inner() {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::LParen) fail(t, "expected formula");
    lex_.take();
    Token head = expect(Token::Kind::Ident, "connective");
    Formula out;
    if (head.text == "eq") {
      out.kind = Formula::Kind::Eq;
      out.terms.push_back(parse_term_inner());
      out.terms.push_back(parse_term_inner());
    } else if (head.text == "pow") {
      out.kind = Formula::Kind::Pow;
      Token n = expect(Token::Kind::Int, "power index");
      uint64_t v = 0;
      auto [p, ec] =
          std::from_chars(n.text.data(), n.text.data() + n.text.size(), v);
      if (ec != std::errc() || p != n.text.data() + n.text.size() || v < 1 ||
          v > 0xffffffffull)
        throw ParseError("power index must be a positive integer", n.pos);
      out.n = uint32_t(v);
      out.terms.push_back(parse_term_inner());
    } else if (head.text == "not") {
      out.kind = Formula::Kind::Not;
      out.args.push_back(parse_formula_inner());
    } else if (head.text == "and" || head.text == "or") {
      out.kind = head.text == "and" ? Formula::Kind::And : Formula::Kind::Or;
      out.args.push_back(parse_formula_inner());
      out.args.push_back(parse_formula_inner());
    } else {
      fail(head, "unknown connective");
    }
    expect(Token::Kind::RParen, "')'");
    return out;
  }

  Lexer lex_;
};

}  // namespace

Term parse_term(std::string_view text) { return Parser(text).term(); }
Formula parse_formula(std::string_view text) {
  return Parser(text).formula();
}
std::variant<Term, Formula> parse_any(std::string_view text) {
  return Parser(text).any();
}

std::string print_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
      return t.name;
    case Term::Kind::IntLit:
      return std::to_string(t.value);
    case Term::Kind::Add:
      return "(add " + print_term(t.args[0]) + " " + print_term(t.args[1]) +
             ")";
    case Term::Kind::Mul:
      return "(mul " + print_term(t.args[0]) + " " + print_term(t.args[1]) +
             ")";
    case Term::Kind::Neg:
      return "(neg " + print_term(t.args[0]) + ")";
    case Term::Kind::Div:
      return "(D " + print_term(t.args[0]) + " " + print_term(t.args[1]) +
             ")";
    case Term::Kind::Ser: {
      std::string s = "(ser " + t.name;
      for (const auto& a : t.args) s += " " + print_term(a);
      return s + ")";
    }
  }
  return "";
}

std::string print_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Eq:
      return "(eq " + print_term(f.terms[0]) + " " + print_term(f.terms[1]) +
             ")";
    case Formula::Kind::Pow:
      return "(pow " + std::to_string(f.n) + " " + print_term(f.terms[0]) +
             ")";
    case Formula::Kind::Not:
      return "(not " + print_formula(f.args[0]) + ")";
    case Formula::Kind::And:
      return "(and " + print_formula(f.args[0]) + " " +
             print_formula(f.args[1]) + ")";
    case Formula::Kind::Or:
      return "(or " + print_formula(f.args[0]) + " " +
             print_formula(f.args[1]) + ")";
  }
  return "";
}

Environment::Environment(uint64_t prime, uint32_t precision)
    : prime_(prime), precision_(precision) {
  if (!is_prime_u64(prime))
    throw ModelMismatch("environment prime must be prime: " +
                        std::to_string(prime));
  if (precision < 1) throw ModelMismatch("environment precision must be >= 1");
  checked_pow(prime, precision);
}

void Environment::bind(const std::string& name, const PadicScalar& v) {
  if (v.prime() != prime_)
    throw ModelMismatch("binding for " + name + " has prime " +
                        std::to_string(v.prime()) + ", environment has " +
                        std::to_string(prime_));
  if (v.precision() != precision_)
    throw ModelMismatch("binding for " + name + " has precision " +
                        std::to_string(v.precision()) +
                        ", environment has " + std::to_string(precision_));
  vars_.insert_or_assign(name, v);
}

const PadicScalar* Environment::lookup(const std::string& name) const {
  auto it = vars_.find(name);
  return it == vars_.end() ? nullptr : &it->second;
}

PadicScalar eval_term(const Term& t, const Environment& env) {
  switch (t.kind) {
    case Term::Kind::Var: {
      const PadicScalar* v = env.lookup(t.name);
      if (!v) throw EvalError("unbound variable: " + t.name);
      return *v;
    }
    case Term::Kind::IntLit:
      return PadicScalar::from_int(env.prime(), env.precision(), t.value);
    case Term::Kind::Add:
      return eval_term(t.args[0], env) + eval_term(t.args[1], env);
    case Term::Kind::Mul:
      return eval_term(t.args[0], env) * eval_term(t.args[1], env);
    case Term::Kind::Neg:
      return eval_term(t.args[0], env).negated();
    case Term::Kind::Div:
      return d_div(eval_term(t.args[0], env), eval_term(t.args[1], env));
    case Term::Kind::Ser: {
      RestrictedSeries s = builtin_series(t.name, env.prime());
      if (t.args.size() != s.arity)
        throw EvalError("series " + t.name + " expects " +
                        std::to_string(s.arity) + " argument(s), got " +
                        std::to_string(t.args.size()));
      std::vector<PadicScalar> args;
      args.reserve(t.args.size());
      for (const auto& a : t.args) args.push_back(eval_term(a, env));
      return eval_series(s, args);
    }
  }
  throw EvalError("corrupt term");
}

bool eval_formula(const Formula& f, const Environment& env) {
  switch (f.kind) {
    case Formula::Kind::Eq: {
      PadicScalar a = eval_term(f.terms[0], env);
      PadicScalar b = eval_term(f.terms[1], env);
      // Equality at the common precision of the evaluated sides (truncated
      // division may have lowered it).
      uint32_t n = std::min(a.precision(), b.precision());
      return a.truncated(n) == b.truncated(n);
    }
    case Formula::Kind::Pow:
      return is_nth_power(eval_term(f.terms[0], env), f.n);
    case Formula::Kind::Not:
      return !eval_formula(f.args[0], env);
    case Formula::Kind::And:
      // Evaluate both sides: an InsufficientPrecision on either side must
      // surface rather than be short-circuited away.
      {
        bool a = eval_formula(f.args[0], env);
        bool b = eval_formula(f.args[1], env);
        return a && b;
      }
    case Formula::Kind::Or: {
      bool a = eval_formula(f.args[0], env);
      bool b = eval_formula(f.args[1], env);
      return a || b;
    }
  }
  throw EvalError("corrupt formula");
}

}  // namespace propkit
