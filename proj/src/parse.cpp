#include <cctype>
#include <cstdlib>

#include "wavered/expr.hpp"

namespace wavered {

namespace {

// Recursive descent over
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := atom ("^" signed_rational)?
//   atom   := number | ident | func "(" expr ")" | "(" expr ")" | "-" atom
// with sqrt lowered to a rational power at parse time. The exponent after
// "^" is a rational literal, optionally parenthesized.
class Parser {
 public:
  Parser(const std::string& text, const VarSpace& space) : s_(text), space_(space) {}

  Expr run() {
    skip_ws();
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& s_;
  const VarSpace& space_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+')) {
        e = add2(e, parse_term());
      } else if (accept('-')) {
        e = sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (accept('*')) {
        e = mul2(e, parse_factor());
      } else if (accept('/')) {
        e = div(e, parse_factor());
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    skip_ws();
    // unary minus binds looser than '^': -a^e is -(a^e)
    if (pos_ < s_.size() && s_[pos_] == '-') {
      ++pos_;
      return neg(parse_factor());
    }
    Expr a = parse_atom();
    if (accept('^')) {
      Rational r = parse_signed_rational();
      return pow(a, r);
    }
    return a;
  }

  Rational parse_signed_rational() {
    skip_ws();
    bool paren = accept('(');
    skip_ws();
    bool negate = false;
    if (accept('-')) negate = true;
    long long n = parse_integer();
    long long d = 1;
    if (accept('/')) d = parse_integer();
    if (paren) expect(')');
    if (d == 0) fail("zero denominator in exponent");
    return Rational(negate ? -n : n, d);
  }

  long long parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected integer");
    return std::stoll(s_.substr(start, pos_ - start));
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident_or_call();
    fail("unexpected character");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      std::size_t fstart = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      // optional exponent part (accepted as a superset of the grammar; the
      // printer may emit it for float constants)
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return fnum(std::strtod(s_.substr(start, pos_ - start).c_str(), nullptr));
      }
      // exact decimal: digits.digits as a rational scaled by a power of ten
      std::string ip = s_.substr(start, fstart - 1 - start);
      std::string fp = s_.substr(fstart, pos_ - fstart);
      if (ip.empty() && fp.empty()) fail("malformed number");
      if (fp.size() > 17) return fnum(std::strtod(s_.substr(start, pos_ - start).c_str(), nullptr));
      long long scale = 1;
      for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
      long long ival = ip.empty() ? 0 : std::stoll(ip);
      long long fval = fp.empty() ? 0 : std::stoll(fp);
      auto r = rat::make(static_cast<__int128>(ival) * scale + fval, scale);
      if (!r) return fnum(std::strtod(s_.substr(start, pos_ - start).c_str(), nullptr));
      return num(*r);
    }
    long long n = std::stoll(s_.substr(start, pos_ - start));
    // "a/b" at the atom level is handled by the term-level division; the
    // value is identical, so there is no dedicated rational-literal branch.
    return num(n);
  }

  Expr parse_ident_or_call() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])))) ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (peek_is('(')) {
      bool known = name == "sqrt" || name == "exp" || name == "log" || name == "sin" || name == "cos";
      if (!known) throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      std::vector<Expr> args;
      args.push_back(parse_expr());
      while (accept(',')) args.push_back(parse_expr());
      expect(')');
      if (args.size() != 1) throw ParseError("function '" + name + "' takes one argument", start);
      if (name == "sqrt") return sqrt_(args[0]);
      if (name == "exp") return call(Fn::Exp, args[0]);
      if (name == "log") return call(Fn::Log, args[0]);
      if (name == "sin") return call(Fn::Sin, args[0]);
      return call(Fn::Cos, args[0]);
    }
    if (!space_.is_known(name)) fail("unknown identifier '" + name + "'");
    return var(name);
  }
};

}  // namespace

Expr parse(const std::string& text, const VarSpace& space) {
  Parser p(text, space);
  return p.run();
}

}  // namespace wavered
