#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "wavered/expr.hpp"

namespace wavered {

namespace {

// Numeric coefficient that stays exact rational as long as the arithmetic
// fits in 64 bits, then degrades to double.
struct Coef {
  bool exact = true;
  Rational r{0};
  double f = 0.0;

  static Coef of(const Rational& v) {
    Coef c;
    c.r = v;
    return c;
  }
  static Coef of_f(double v) {
    Coef c;
    c.exact = false;
    c.f = v;
    return c;
  }
  double value() const { return exact ? r.to_double() : f; }
  bool is_zero() const { return exact ? r.is_zero() : f == 0.0; }
  bool is_one() const { return exact ? r.is_one() : f == 1.0; }

  Coef& operator+=(const Coef& o) {
    if (exact && o.exact) {
      if (auto s = rat::add(r, o.r)) {
        r = *s;
        return *this;
      }
    }
    f = value() + o.value();
    exact = false;
    return *this;
  }
  Coef& operator*=(const Coef& o) {
    if (exact && o.exact) {
      if (auto p = rat::mul(r, o.r)) {
        r = *p;
        return *this;
      }
    }
    f = value() * o.value();
    exact = false;
    return *this;
  }
  friend bool operator==(const Coef& a, const Coef& b) {
    if (a.exact && b.exact) return a.r == b.r;
    return a.value() == b.value();
  }
  Expr to_expr() const { return exact ? num(r) : fnum(f); }
};

bool is_const_node(const Expr& e) { return e->kind == Kind::Num || e->kind == Kind::FloatNum; }

Coef const_of(const Expr& e) {
  return e->kind == Kind::Num ? Coef::of(e->value) : Coef::of_f(e->fvalue);
}

// term -> (numeric coefficient, coefficient-free key); key of a pure
// constant is 1
std::pair<Coef, Expr> split_coef(const Expr& t) {
  if (is_const_node(t)) return {const_of(t), kOne};
  if (t->kind == Kind::Mul && !t->kids.empty() && is_const_node(t->kids[0])) {
    std::vector<Expr> rest(t->kids.begin() + 1, t->kids.end());
    return {const_of(t->kids[0]), mul(std::move(rest))};
  }
  return {Coef::of(Rational(1)), t};
}

std::pair<Expr, Rational> as_base_exp(const Expr& f) {
  if (f->kind == Kind::Pow) return {f->kids[0], f->exponent};
  return {f, Rational(1)};
}

std::vector<Expr> factors_of(const Expr& key) {
  if (is_one_num(key)) return {};
  if (key->kind == Kind::Mul) return key->kids;
  return {key};
}

class Simplifier {
 public:
  explicit Simplifier(bool combine) : combine_(combine) {}

  Expr run(const Expr& e) {
    auto it = cache_.find(e.get());
    if (it != cache_.end()) return it->second;
    Expr out;
    switch (e->kind) {
      case Kind::Num:
      case Kind::FloatNum:
      case Kind::Var:
        out = e;
        break;
      case Kind::Add: {
        std::vector<Expr> kids;
        kids.reserve(e->kids.size());
        for (const Expr& k : e->kids) kids.push_back(run(k));
        out = canon_add(std::move(kids));
        break;
      }
      case Kind::Mul: {
        std::vector<Expr> kids;
        kids.reserve(e->kids.size());
        for (const Expr& k : e->kids) kids.push_back(run(k));
        out = canon_mul(std::move(kids));
        break;
      }
      case Kind::Pow:
        out = canon_pow(run(e->kids[0]), e->exponent);
        break;
      case Kind::Call:
        out = canon_call(e->fn, run(e->kids[0]));
        break;
    }
    cache_.emplace(e.get(), out);
    return out;
  }

 private:
  bool combine_;
  std::unordered_map<const Node*, Expr> cache_;

  static constexpr int kExpandBudget = 128;

  // ---- Pow ----
  Expr canon_pow(Expr base, Rational r) {
    if (r.is_zero()) return kOne;
    if (r.is_one()) return base;
    if (base->kind == Kind::Num) {
      if (r.is_integer()) {
        if (auto v = rat::pow_int(base->value, r.num)) return num(*v);
        return fnum(std::pow(base->value.to_double(), static_cast<double>(r.num)));
      }
      if (base->value.num >= 0) {
        auto rn = rat::iroot(base->value.num, r.den);
        auto rd = rat::iroot(base->value.den, r.den);
        if (rn && rd && *rd != 0) {
          if (auto v = rat::pow_int(Rational(*rn, *rd), r.num)) return num(*v);
        }
      }
      return pow(base, r);
    }
    if (base->kind == Kind::FloatNum) {
      if (base->fvalue > 0 || r.is_integer()) return fnum(std::pow(base->fvalue, r.to_double()));
      return pow(base, r);
    }
    if (base->kind == Kind::Pow) {
      // (b^r2)^r = b^(r2*r) when r is an integer, or when the inner root
      // forces a nonnegative base (even denominator)
      if (r.is_integer() || base->exponent.den % 2 == 0) {
        if (auto e2 = rat::mul(base->exponent, r)) return canon_pow(base->kids[0], *e2);
      }
      return pow(base, r);
    }
    if (base->kind == Kind::Mul) {
      if (r.is_integer()) {
        std::vector<Expr> kids;
        for (const Expr& k : base->kids) kids.push_back(canon_pow(k, r));
        return canon_mul(std::move(kids));
      }
      // pull a positive numeric coefficient through a fractional power
      if (!base->kids.empty() && base->kids[0]->kind == Kind::Num && base->kids[0]->value.num > 0) {
        std::vector<Expr> rest(base->kids.begin() + 1, base->kids.end());
        return canon_mul({canon_pow(base->kids[0], r), pow(canon_mul(std::move(rest)), r)});
      }
      return pow(base, r);
    }
    if (base->kind == Kind::Add && r.is_integer() && r.num >= 2 && r.num <= 6) {
      double sz = std::pow(static_cast<double>(base->kids.size()), static_cast<double>(r.num));
      if (sz <= kExpandBudget) {
        // multiply term lists directly; going through canon_mul(base, base)
        // would just re-merge the pair into the power being expanded
        Expr acc = base;
        for (long long i = 1; i < r.num; ++i) {
          const std::vector<Expr> at = acc->kind == Kind::Add ? acc->kids : std::vector<Expr>{acc};
          std::vector<Expr> next;
          next.reserve(at.size() * base->kids.size());
          for (const Expr& ta : at)
            for (const Expr& tb : base->kids) next.push_back(canon_mul({ta, tb}));
          acc = canon_add(std::move(next));
        }
        return acc;
      }
    }
    return pow(base, r);
  }

  // ---- Call ----
  Expr canon_call(Fn fn, Expr a) {
    if (a->kind == Kind::Call) {
      if (fn == Fn::Log && a->fn == Fn::Exp) return a->kids[0];
      if (fn == Fn::Exp && a->fn == Fn::Log) return a->kids[0];
    }
    if (a->kind == Kind::Num) {
      if (fn == Fn::Sin && a->value.is_zero()) return kZero;
      if (fn == Fn::Cos && a->value.is_zero()) return kOne;
      if (fn == Fn::Exp && a->value.is_zero()) return kOne;
      if (fn == Fn::Log && a->value.is_one()) return kZero;
    }
    // parity normalization for trig arguments with a negative coefficient
    if (fn == Fn::Sin || fn == Fn::Cos) {
      bool neg = (a->kind == Kind::Num && a->value.num < 0) ||
                 (a->kind == Kind::Mul && !a->kids.empty() && a->kids[0]->kind == Kind::Num &&
                  a->kids[0]->value.num < 0);
      if (neg) {
        Expr na = canon_mul({num(-1), a});
        if (fn == Fn::Cos) return call(Fn::Cos, na);
        return canon_mul({num(-1), call(Fn::Sin, na)});
      }
    }
    return call(fn, a);
  }

  // ---- Mul ----
  void flatten_mul(const Expr& e, std::vector<Expr>& out) {
    if (e->kind == Kind::Mul) {
      for (const Expr& k : e->kids) flatten_mul(k, out);
    } else {
      out.push_back(e);
    }
  }

  Expr canon_mul(std::vector<Expr> kids) {
    std::vector<Expr> flat;
    for (const Expr& k : kids) flatten_mul(k, flat);

    Coef coef = Coef::of(Rational(1));
    std::vector<std::pair<Expr, Rational>> bases;  // base -> accumulated exponent
    for (const Expr& f : flat) {
      if (is_const_node(f)) {
        coef *= const_of(f);
        continue;
      }
      auto [b, e] = as_base_exp(f);
      bool merged = false;
      for (auto& [bb, ee] : bases) {
        if (bb.get() == b.get()) {
          if (auto s = rat::add(ee, e)) {
            ee = *s;
            merged = true;
          }
          break;
        }
      }
      if (!merged) bases.emplace_back(b, e);
    }
    if (coef.is_zero()) return coef.to_expr()->kind == Kind::Num ? kZero : fnum(0.0);

    std::vector<Expr> factors;
    std::vector<Expr> add_factors;
    bool reprocess = false;
    for (auto& [b, e] : bases) {
      if (e.is_zero()) continue;
      Expr f = canon_pow(b, e);
      if (is_const_node(f)) {
        coef *= const_of(f);
        continue;
      }
      if (f->kind == Kind::Mul) {
        reprocess = true;
        factors.push_back(f);
        continue;
      }
      if (f->kind == Kind::Add) {
        add_factors.push_back(f);
        continue;
      }
      factors.push_back(f);
    }
    if (coef.is_zero()) return kZero;

    if (reprocess) {
      std::vector<Expr> all;
      all.push_back(coef.to_expr());
      for (auto& f : factors) all.push_back(f);
      for (auto& f : add_factors) all.push_back(f);
      // re-run once; merging above cannot reintroduce nested Muls endlessly
      return canon_mul(std::move(all));
    }

    if (!add_factors.empty()) {
      double sz = 1;
      for (const Expr& a : add_factors) sz *= static_cast<double>(a->kids.size());
      if (sz <= kExpandBudget) return expand_product(coef, factors, add_factors);
      // over budget: keep the sums as factors
      for (const Expr& a : add_factors) factors.push_back(a);
    }

    std::sort(factors.begin(), factors.end(),
              [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    if (factors.empty()) return coef.to_expr();
    if (coef.is_one() && factors.size() == 1) return factors[0];
    std::vector<Expr> out;
    if (!coef.is_one()) out.push_back(coef.to_expr());
    for (auto& f : factors) out.push_back(std::move(f));
    return mul(std::move(out));
  }

  Expr expand_product(const Coef& coef, const std::vector<Expr>& scalars,
                      const std::vector<Expr>& add_factors) {
    std::vector<Expr> terms{kOne};
    for (const Expr& a : add_factors) {
      std::vector<Expr> next;
      next.reserve(terms.size() * a->kids.size());
      for (const Expr& t : terms)
        for (const Expr& k : a->kids) next.push_back(canon_mul({t, k}));
      terms = std::move(next);
    }
    std::vector<Expr> out;
    out.reserve(terms.size());
    for (const Expr& t : terms) {
      std::vector<Expr> fac;
      fac.push_back(coef.to_expr());
      for (const Expr& s : scalars) fac.push_back(s);
      fac.push_back(t);
      out.push_back(canon_mul(std::move(fac)));
    }
    return canon_add(std::move(out));
  }

  // ---- Add ----
  void flatten_add(const Expr& e, std::vector<Expr>& out) {
    if (e->kind == Kind::Add) {
      for (const Expr& k : e->kids) flatten_add(k, out);
    } else {
      out.push_back(e);
    }
  }

  struct TermMap {
    Coef constant = Coef::of(Rational(0));
    std::vector<std::pair<Expr, Coef>> terms;  // key (coefficient-free) -> coef
    std::unordered_map<const Node*, std::size_t> index;

    void accumulate(const Coef& c, const Expr& key) {
      if (is_one_num(key)) {
        constant += c;
        return;
      }
      auto it = index.find(key.get());
      if (it == index.end()) {
        index.emplace(key.get(), terms.size());
        terms.emplace_back(key, c);
      } else {
        terms[it->second].second += c;
      }
    }

    void prune() {
      std::vector<std::pair<Expr, Coef>> keep;
      for (auto& [k, c] : terms)
        if (!c.is_zero()) keep.push_back({k, c});
      terms = std::move(keep);
      index.clear();
      for (std::size_t i = 0; i < terms.size(); ++i) index.emplace(terms[i].first.get(), i);
    }
  };

  Expr canon_add(std::vector<Expr> kids) {
    std::vector<Expr> flat;
    for (const Expr& k : kids) flatten_add(k, flat);

    TermMap tm;
    for (const Expr& t : flat) {
      if (is_zero_num(t)) continue;
      auto [c, key] = split_coef(t);
      tm.accumulate(c, key);
    }
    tm.prune();
    pythagorean(tm);

    if (combine_ && tm.terms.size() + (tm.constant.is_zero() ? 0 : 1) >= 2) {
      if (auto combined = try_combine(tm)) return *combined;
    }

    return assemble(tm);
  }

  Expr assemble(TermMap& tm) {
    std::sort(tm.terms.begin(), tm.terms.end(),
              [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<Expr> out;
    if (!tm.constant.is_zero()) out.push_back(tm.constant.to_expr());
    for (auto& [k, c] : tm.terms) out.push_back(attach_coef(c, k));
    if (out.empty()) return kZero;
    if (out.size() == 1) return out[0];
    return add(std::move(out));
  }

  Expr attach_coef(const Coef& c, const Expr& key) {
    if (is_one_num(key)) return c.to_expr();
    if (c.is_one()) return key;
    std::vector<Expr> kids;
    kids.push_back(c.to_expr());
    for (const Expr& f : factors_of(key)) kids.push_back(f);
    return mul(std::move(kids));
  }

  // sin^2(u) + cos^2(u) -> 1, applied per matching coefficient pair
  void pythagorean(TermMap& tm) {
    bool changed = true;
    int guard = 0;
    while (changed && guard++ < 16) {
      changed = false;
      for (std::size_t i = 0; i < tm.terms.size() && !changed; ++i) {
        std::vector<Expr> fs = factors_of(tm.terms[i].first);
        for (std::size_t fi = 0; fi < fs.size(); ++fi) {
          auto [b, e] = as_base_exp(fs[fi]);
          if (!(e == Rational(2)) || b->kind != Kind::Call || b->fn != Fn::Sin) continue;
          Expr partner_factor = canon_pow(call(Fn::Cos, b->kids[0]), Rational(2));
          std::vector<Expr> pf = fs;
          pf[fi] = partner_factor;
          Expr partner_key = key_from_factors(pf);
          auto it = tm.index.find(partner_key.get());
          if (it == tm.index.end()) continue;
          if (!(tm.terms[it->second].second == tm.terms[i].second)) continue;
          Coef c = tm.terms[i].second;
          std::vector<Expr> rest = fs;
          rest.erase(rest.begin() + fi);
          Expr rest_key = key_from_factors(rest);
          // drop both squared terms, add the reduced one
          std::size_t j = it->second;
          std::vector<std::pair<Expr, Coef>> keep;
          for (std::size_t k = 0; k < tm.terms.size(); ++k)
            if (k != i && k != j) keep.push_back(tm.terms[k]);
          tm.terms = std::move(keep);
          tm.index.clear();
          for (std::size_t k = 0; k < tm.terms.size(); ++k)
            tm.index.emplace(tm.terms[k].first.get(), k);
          tm.accumulate(c, rest_key);
          tm.prune();
          changed = true;
          break;
        }
      }
    }
  }

  Expr key_from_factors(std::vector<Expr> fs) {
    std::sort(fs.begin(), fs.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    if (fs.empty()) return kOne;
    if (fs.size() == 1) return fs[0];
    return mul(std::move(fs));
  }

  // Whole-sum rewrite over a common power base:
  //   sum_i c_i rest_i b^{e_i}  ==  c * b^(m+j)
  // whenever the cofactor sum collapses onto a power of b. This is what
  // turns  2*s^(-1/2) - (x1^2+x2^2)*s^(-3/2)  into  s^(-1/2).
  std::optional<Expr> try_combine(TermMap& tm) {
    // candidate bases: appear with negative exponent in some term
    std::vector<Expr> candidates;
    for (auto& [key, c] : tm.terms) {
      for (const Expr& f : factors_of(key)) {
        auto [b, e] = as_base_exp(f);
        if (e.num >= 0 || is_const_node(b)) continue;
        bool seen = false;
        for (const Expr& cb : candidates)
          if (cb.get() == b.get()) seen = true;
        if (!seen) candidates.push_back(b);
      }
    }
    for (const Expr& b : candidates) {
      if (auto r = try_combine_base(tm, b)) return r;
    }
    return std::nullopt;
  }

  Rational exponent_of(const Expr& key, const Expr& b) {
    for (const Expr& f : factors_of(key)) {
      auto [fb, fe] = as_base_exp(f);
      if (fb.get() == b.get()) return fe;
    }
    return Rational(0);
  }

  Expr strip_base(const Expr& key, const Expr& b) {
    std::vector<Expr> keep;
    for (const Expr& f : factors_of(key)) {
      auto [fb, fe] = as_base_exp(f);
      if (fb.get() == b.get()) continue;
      keep.push_back(f);
    }
    return key_from_factors(std::move(keep));
  }

  std::optional<Expr> try_combine_base(TermMap& tm, const Expr& b) {
    std::vector<std::pair<Expr, Coef>> all = tm.terms;
    if (!tm.constant.is_zero()) all.emplace_back(kOne, tm.constant);

    Rational m(0);
    bool first = true;
    for (auto& [key, c] : all) {
      Rational e = exponent_of(key, b);
      if (first || e < m) m = e;
      first = false;
    }
    if (!(m.num < 0)) return std::nullopt;
    for (auto& [key, c] : all) {
      auto d = rat::sub(exponent_of(key, b), m);
      if (!d || !d->is_integer() || d->num > 8) return std::nullopt;
    }

    Simplifier nc(false);
    std::vector<Expr> inner_terms;
    for (auto& [key, c] : all) {
      Rational d = *rat::sub(exponent_of(key, b), m);
      Expr stripped = strip_base(key, b);
      inner_terms.push_back(nc.run(mul({c.to_expr(), stripped, pow(b, d)})));
    }
    Expr inner = nc.run(add(std::move(inner_terms)));

    if (is_zero_num(inner)) return kZero;
    for (long long j = 0; j <= 2; ++j) {
      Expr bj = j == 0 ? kOne : nc.run(pow(b, Rational(j)));
      if (auto c = divide_const(inner, bj, nc)) {
        auto tot = rat::add(m, Rational(j));
        if (!tot) return std::nullopt;
        Simplifier fin(false);
        return fin.run(mul({c->to_expr(), pow(b, *tot)}));
      }
    }
    return std::nullopt;
  }

  // inner == c * bj for a numeric c? returns c on success
  std::optional<Coef> divide_const(const Expr& inner, const Expr& bj, Simplifier& nc) {
    // pick a reference term of bj and read off the candidate ratio
    Expr ref = bj->kind == Kind::Add ? bj->kids[0] : bj;
    auto [cb, kb] = split_coef(ref);
    if (cb.is_zero()) return std::nullopt;
    Coef ci = Coef::of(Rational(0));
    if (inner->kind == Kind::Add) {
      bool found = false;
      for (const Expr& t : inner->kids) {
        auto [c, k] = split_coef(t);
        if (k.get() == kb.get()) {
          ci = c;
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    } else {
      auto [c, k] = split_coef(inner);
      if (k.get() != kb.get()) return std::nullopt;
      ci = c;
    }
    // c = ci / cb
    Coef c;
    if (ci.exact && cb.exact) {
      auto q = rat::div(ci.r, cb.r);
      if (!q) return std::nullopt;
      c = Coef::of(*q);
    } else {
      c = Coef::of_f(ci.value() / cb.value());
    }
    Expr resid = nc.run(add({inner, mul({num(-1), c.to_expr(), bj})}));
    if (is_zero_num(resid)) return c;
    return std::nullopt;
  }
};

}  // namespace

Expr simplify(const Expr& e, int max_passes) {
  Expr cur = e;
  for (int i = 0; i < max_passes; ++i) {
    Simplifier s(true);
    Expr next = s.run(cur);
    if (next.get() == cur.get()) break;
    cur = next;
  }
  return cur;
}

bool is_zero(const Expr& e) { return is_zero_num(simplify(e)); }

}  // namespace wavered
