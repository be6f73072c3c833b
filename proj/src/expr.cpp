#include "wavered/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_set>

namespace wavered {

namespace {

std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

std::size_t node_hash(const Node& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 1099511628211ull;
  switch (n.kind) {
    case Kind::Num:
      h = hash_combine(h, std::hash<long long>()(n.value.num));
      h = hash_combine(h, std::hash<long long>()(n.value.den));
      break;
    case Kind::FloatNum:
      h = hash_combine(h, std::hash<double>()(n.fvalue));
      break;
    case Kind::Var:
      h = hash_combine(h, std::hash<std::string>()(n.name));
      break;
    case Kind::Pow:
      h = hash_combine(h, std::hash<long long>()(n.exponent.num));
      h = hash_combine(h, std::hash<long long>()(n.exponent.den));
      break;
    case Kind::Call:
      h = hash_combine(h, static_cast<std::size_t>(n.fn));
      break;
    default:
      break;
  }
  for (const Expr& k : n.kids) h = hash_combine(h, std::hash<const Node*>()(k.get()));
  return h;
}

bool node_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  switch (a.kind) {
    case Kind::Num:
      if (!(a.value == b.value)) return false;
      break;
    case Kind::FloatNum:
      if (a.fvalue != b.fvalue) return false;
      break;
    case Kind::Var:
      if (a.name != b.name) return false;
      break;
    case Kind::Pow:
      if (!(a.exponent == b.exponent)) return false;
      break;
    case Kind::Call:
      if (a.fn != b.fn) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (a.kids[i].get() != b.kids[i].get()) return false;
  return true;
}

struct InternHash {
  std::size_t operator()(const Expr& e) const { return e->hash; }
};
struct InternEq {
  bool operator()(const Expr& a, const Expr& b) const { return node_equal(*a, *b); }
};

// Hash-cons table. Concurrent reads go through the mutex too; contention is
// negligible at the scale this library runs at.
std::unordered_set<Expr, InternHash, InternEq>& intern_table() {
  static std::unordered_set<Expr, InternHash, InternEq> table;
  return table;
}
std::mutex& intern_mutex() {
  static std::mutex m;
  return m;
}

Expr intern(Node&& n) {
  n.hash = node_hash(n);
  auto candidate = std::make_shared<const Node>(std::move(n));
  std::lock_guard<std::mutex> lock(intern_mutex());
  auto [it, inserted] = intern_table().insert(candidate);
  return *it;
}

}  // namespace

Expr num(Rational r) {
  Node n;
  n.kind = Kind::Num;
  n.value = r;
  return intern(std::move(n));
}
Expr num(long long v) { return num(Rational(v)); }
Expr num(long long a, long long b) { return num(Rational(a, b)); }

Expr fnum(double v) {
  Node n;
  n.kind = Kind::FloatNum;
  n.fvalue = v;
  return intern(std::move(n));
}

Expr var(const std::string& name) {
  Node n;
  n.kind = Kind::Var;
  n.name = name;
  return intern(std::move(n));
}

Expr add(std::vector<Expr> kids) {
  if (kids.empty()) return kZero;
  if (kids.size() == 1) return kids[0];
  Node n;
  n.kind = Kind::Add;
  n.kids = std::move(kids);
  return intern(std::move(n));
}

Expr mul(std::vector<Expr> kids) {
  if (kids.empty()) return kOne;
  if (kids.size() == 1) return kids[0];
  Node n;
  n.kind = Kind::Mul;
  n.kids = std::move(kids);
  return intern(std::move(n));
}

Expr pow(Expr base, Rational exponent) {
  Node n;
  n.kind = Kind::Pow;
  n.exponent = exponent;
  n.kids = {std::move(base)};
  return intern(std::move(n));
}

Expr call(Fn fn, Expr arg) {
  Node n;
  n.kind = Kind::Call;
  n.fn = fn;
  n.kids = {std::move(arg)};
  return intern(std::move(n));
}

Expr add2(Expr a, Expr b) { return add({std::move(a), std::move(b)}); }
Expr sub(Expr a, Expr b) { return add({std::move(a), neg(std::move(b))}); }
Expr mul2(Expr a, Expr b) { return mul({std::move(a), std::move(b)}); }
Expr div(Expr a, Expr b) { return mul({std::move(a), pow(std::move(b), Rational(-1))}); }
Expr neg(Expr a) { return mul({num(-1), std::move(a)}); }
Expr sqrt_(Expr a) { return pow(std::move(a), Rational(1, 2)); }

const Expr kZero = num(0);
const Expr kOne = num(1);

int compare(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case Kind::Num: {
      if (a->value == b->value) return 0;
      return a->value < b->value ? -1 : 1;
    }
    case Kind::FloatNum:
      if (a->fvalue == b->fvalue) return 0;
      return a->fvalue < b->fvalue ? -1 : 1;
    case Kind::Var:
      return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Kind::Pow: {
      int c = compare(a->kids[0], b->kids[0]);
      if (c != 0) return c;
      if (a->exponent == b->exponent) return 0;
      return a->exponent < b->exponent ? -1 : 1;
    }
    case Kind::Call: {
      if (a->fn != b->fn) return a->fn < b->fn ? -1 : 1;
      return compare(a->kids[0], b->kids[0]);
    }
    case Kind::Add:
    case Kind::Mul: {
      std::size_t m = std::min(a->kids.size(), b->kids.size());
      for (std::size_t i = 0; i < m; ++i) {
        int c = compare(a->kids[i], b->kids[i]);
        if (c != 0) return c;
      }
      if (a->kids.size() == b->kids.size()) return 0;
      return a->kids.size() < b->kids.size() ? -1 : 1;
    }
  }
  return 0;
}

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
  }
  return "?";
}

// --- printing ---

namespace {

// precedence levels: 0 sum, 1 product, 2 power/atom
void print_rec(std::ostringstream& os, const Expr& e, int parent_prec);

bool term_negative(const Expr& t) {
  if (t->kind == Kind::Num) return t->value.num < 0;
  if (t->kind == Kind::FloatNum) return t->fvalue < 0;
  if (t->kind == Kind::Mul && !t->kids.empty()) return term_negative(t->kids[0]);
  return false;
}

Expr term_negate(const Expr& t) {
  if (t->kind == Kind::Num) return num(Rational(-t->value.num, t->value.den));
  if (t->kind == Kind::FloatNum) return fnum(-t->fvalue);
  if (t->kind == Kind::Mul && !t->kids.empty() && (is_num(t->kids[0]) || t->kids[0]->kind == Kind::FloatNum)) {
    std::vector<Expr> kids = t->kids;
    kids[0] = term_negate(kids[0]);
    if (kids.size() >= 2 && is_one_num(kids[0])) kids.erase(kids.begin());
    return mul(std::move(kids));
  }
  return neg(t);
}

void print_num(std::ostringstream& os, const Rational& r, int parent_prec) {
  bool paren = parent_prec >= 1 && (r.num < 0 || r.den != 1);
  if (parent_prec >= 2) paren = r.num < 0 || r.den != 1;
  if (r.num >= 0 && r.den == 1) paren = false;
  if (paren && parent_prec == 1 && r.num >= 0) paren = r.den != 1;
  if (paren) os << "(";
  os << r.str();
  if (paren) os << ")";
}

void print_rec(std::ostringstream& os, const Expr& e, int parent_prec) {
  switch (e->kind) {
    case Kind::Num:
      print_num(os, e->value, parent_prec);
      return;
    case Kind::FloatNum: {
      std::ostringstream t;
      t.precision(17);
      t << e->fvalue;
      std::string s = t.str();
      bool paren = parent_prec >= 1 && (e->fvalue < 0);
      if (paren) os << "(";
      os << s;
      if (paren) os << ")";
      return;
    }
    case Kind::Var:
      os << e->name;
      return;
    case Kind::Call:
      os << fn_name(e->fn) << "(";
      print_rec(os, e->kids[0], 0);
      os << ")";
      return;
    case Kind::Pow: {
      if (e->exponent == Rational(1, 2)) {
        os << "sqrt(";
        print_rec(os, e->kids[0], 0);
        os << ")";
        return;
      }
      bool paren = parent_prec >= 2;
      if (paren) os << "(";
      // base of a power always parenthesized unless it is a simple atom
      const Expr& b = e->kids[0];
      bool batom = b->kind == Kind::Var || b->kind == Kind::Call ||
                   (b->kind == Kind::Num && b->value.num >= 0 && b->value.den == 1);
      if (!batom) {
        os << "(";
        print_rec(os, b, 0);
        os << ")";
      } else {
        print_rec(os, b, 2);
      }
      os << "^" << e->exponent.str();
      if (paren) os << ")";
      return;
    }
    case Kind::Mul: {
      bool paren = parent_prec >= 2;
      if (paren) os << "(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << "*";
        print_rec(os, e->kids[i], i == 0 ? 1 : 2);
      }
      if (paren) os << ")";
      return;
    }
    case Kind::Add: {
      bool paren = parent_prec >= 1;
      if (paren) os << "(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        const Expr& t = e->kids[i];
        if (i == 0) {
          print_rec(os, t, 0 == 0 ? 1 : 0);
        } else if (term_negative(t)) {
          os << " - ";
          print_rec(os, term_negate(t), 1);
        } else {
          os << " + ";
          print_rec(os, t, 1);
        }
      }
      if (paren) os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print_rec(os, e, 0);
  return os.str();
}

// --- VarSpace ---

VarSpace::VarSpace(int n, std::set<std::string> reduced, std::set<std::string> params)
    : n_(n), reduced_(std::move(reduced)), params_(std::move(params)) {
  if (n < 1) throw SpecError("VarSpace: n must be >= 1");
  for (const auto& r : reduced_) {
    if (params_.count(r)) throw SpecError("VarSpace: name '" + r + "' is both reduced and parameter");
    if (is_coord(r)) throw SpecError("VarSpace: name '" + r + "' collides with a coordinate");
  }
  for (const auto& p : params_)
    if (is_coord(p)) throw SpecError("VarSpace: name '" + p + "' collides with a coordinate");
}

std::vector<std::string> VarSpace::coords() const {
  std::vector<std::string> out;
  for (int mu = 0; mu <= n_; ++mu) out.push_back(coord(mu));
  return out;
}

bool VarSpace::is_coord(const std::string& name) const {
  if (name.size() < 2 || name[0] != 'x') return false;
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  if (name.size() > 1 && name[1] == '0' && name.size() > 2) return false;  // no leading zeros
  int idx = std::stoi(name.substr(1));
  return idx >= 0 && idx <= n_;
}

bool VarSpace::is_known(const std::string& name) const {
  return is_coord(name) || reduced_.count(name) || params_.count(name);
}

// --- structural queries ---

void free_vars(const Expr& e, std::set<std::string>& out) {
  if (e->kind == Kind::Var) {
    out.insert(e->name);
    return;
  }
  for (const Expr& k : e->kids) free_vars(k, out);
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  free_vars(e, out);
  return out;
}

bool contains_var(const Expr& e, const std::string& name) {
  if (e->kind == Kind::Var) return e->name == name;
  for (const Expr& k : e->kids)
    if (contains_var(k, name)) return true;
  return false;
}

bool depends_on(const Expr& e, const std::set<std::string>& vars) {
  Expr s = simplify(e);
  for (const auto& v : vars)
    if (contains_var(s, v)) return true;
  return false;
}

Expr subst(const Expr& e, const std::string& name, const Expr& replacement) {
  return subst(e, std::map<std::string, Expr>{{name, replacement}});
}

namespace {
Expr subst_raw(const Expr& e, const std::map<std::string, Expr>& repl) {
  if (e->kind == Kind::Var) {
    auto it = repl.find(e->name);
    return it == repl.end() ? e : it->second;
  }
  if (e->kids.empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(e->kids.size());
  bool changed = false;
  for (const Expr& k : e->kids) {
    Expr nk = subst_raw(k, repl);
    changed = changed || nk.get() != k.get();
    kids.push_back(std::move(nk));
  }
  if (!changed) return e;
  switch (e->kind) {
    case Kind::Add: return add(std::move(kids));
    case Kind::Mul: return mul(std::move(kids));
    case Kind::Pow: return pow(kids[0], e->exponent);
    case Kind::Call: return call(e->fn, kids[0]);
    default: return e;
  }
}
}  // namespace

Expr subst(const Expr& e, const std::map<std::string, Expr>& repl) {
  return simplify(subst_raw(e, repl));
}

// --- differentiation ---

namespace {
Expr diff_raw(const Expr& e, const std::string& name) {
  switch (e->kind) {
    case Kind::Num:
    case Kind::FloatNum:
      return kZero;
    case Kind::Var:
      return e->name == name ? kOne : kZero;
    case Kind::Add: {
      std::vector<Expr> kids;
      for (const Expr& k : e->kids) kids.push_back(diff_raw(k, name));
      return add(std::move(kids));
    }
    case Kind::Mul: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        std::vector<Expr> fac = e->kids;
        fac[i] = diff_raw(e->kids[i], name);
        terms.push_back(mul(std::move(fac)));
      }
      return add(std::move(terms));
    }
    case Kind::Pow: {
      // d b^r = r * b^(r-1) * db, r a rational constant
      const Expr& b = e->kids[0];
      auto rm1 = rat::sub(e->exponent, Rational(1));
      if (!rm1) return fnum(0);  // unreachable at sane exponents
      return mul({num(e->exponent), pow(b, *rm1), diff_raw(b, name)});
    }
    case Kind::Call: {
      const Expr& a = e->kids[0];
      Expr da = diff_raw(a, name);
      switch (e->fn) {
        case Fn::Exp: return mul({call(Fn::Exp, a), da});
        case Fn::Log: return mul({pow(a, Rational(-1)), da});
        case Fn::Sin: return mul({call(Fn::Cos, a), da});
        case Fn::Cos: return mul({num(-1), call(Fn::Sin, a), da});
      }
      return kZero;
    }
  }
  return kZero;
}
}  // namespace

Expr diff(const Expr& e, const std::string& name) { return simplify(diff_raw(e, name)); }

// --- evaluation ---

namespace {

[[noreturn]] void domain_fail(const char* what, const Expr& e) {
  throw EvalError(what, to_string(e));
}

template <typename T>
struct Ops;

template <>
struct Ops<double> {
  static double from_num(const Rational& r) { return r.to_double(); }
  static double from_f(double v) { return v; }
  static double value_of(double v) { return v; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) { return a * b; }
  static double pow_r(double b, const Rational& r, const Expr& e, double tube) {
    if (r.num < 0) {
      if (b == 0.0) domain_fail("division by zero", e);
      if (std::abs(b) <= tube) domain_fail("near-singular denominator", e);
    }
    if (r.den != 1) {
      if (b < 0) domain_fail("fractional power of negative value", e);
      if (tube > 0 && b < tube) domain_fail("radicand near domain boundary", e);
    }
    return std::pow(b, r.to_double());
  }
  static double fn(Fn f, double a, const Expr& e, double tube) {
    switch (f) {
      case Fn::Exp: return std::exp(a);
      case Fn::Log:
        if (a <= tube) domain_fail(a <= 0 ? "log of non-positive value" : "log argument near zero", e);
        return std::log(a);
      case Fn::Sin: return std::sin(a);
      case Fn::Cos: return std::cos(a);
    }
    return 0;
  }
};

template <>
struct Ops<Dual> {
  static Dual from_num(const Rational& r) { return {r.to_double(), 0.0}; }
  static Dual from_f(double v) { return {v, 0.0}; }
  static double value_of(const Dual& v) { return v.v; }
  static Dual add(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  static Dual mul(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  static Dual pow_r(const Dual& b, const Rational& r, const Expr& e, double tube) {
    double v = Ops<double>::pow_r(b.v, r, e, tube);
    double re = r.to_double();
    return {v, re * std::pow(b.v, re - 1.0) * b.d};
  }
  static Dual fn(Fn f, const Dual& a, const Expr& e, double tube) {
    double v = Ops<double>::fn(f, a.v, e, tube);
    switch (f) {
      case Fn::Exp: return {v, v * a.d};
      case Fn::Log: return {v, a.d / a.v};
      case Fn::Sin: return {v, std::cos(a.v) * a.d};
      case Fn::Cos: return {v, -std::sin(a.v) * a.d};
    }
    return {0, 0};
  }
};

template <typename T, typename Lookup>
T eval_rec(const Expr& e, const Lookup& lookup, double tube) {
  switch (e->kind) {
    case Kind::Num: return Ops<T>::from_num(e->value);
    case Kind::FloatNum: return Ops<T>::from_f(e->fvalue);
    case Kind::Var: return lookup(e);
    case Kind::Add: {
      T acc = Ops<T>::from_num(Rational(0));
      for (const Expr& k : e->kids) acc = Ops<T>::add(acc, eval_rec<T>(k, lookup, tube));
      return acc;
    }
    case Kind::Mul: {
      T acc = Ops<T>::from_num(Rational(1));
      for (const Expr& k : e->kids) acc = Ops<T>::mul(acc, eval_rec<T>(k, lookup, tube));
      return acc;
    }
    case Kind::Pow: return Ops<T>::pow_r(eval_rec<T>(e->kids[0], lookup, tube), e->exponent, e, tube);
    case Kind::Call: return Ops<T>::fn(e->fn, eval_rec<T>(e->kids[0], lookup, tube), e, tube);
  }
  return Ops<T>::from_num(Rational(0));
}

}  // namespace

double eval(const Expr& e, const std::map<std::string, double>& env, double singular_tube) {
  auto lookup = [&](const Expr& v) -> double {
    auto it = env.find(v->name);
    if (it == env.end()) throw EvalError("unbound symbol", v->name);
    return it->second;
  };
  return eval_rec<double>(e, lookup, singular_tube);
}

Dual eval_dual(const Expr& e, const std::map<std::string, double>& env, const std::string& seed,
               double singular_tube) {
  auto lookup = [&](const Expr& v) -> Dual {
    auto it = env.find(v->name);
    if (it == env.end()) throw EvalError("unbound symbol", v->name);
    return {it->second, v->name == seed ? 1.0 : 0.0};
  };
  return eval_rec<Dual>(e, lookup, singular_tube);
}

}  // namespace wavered
