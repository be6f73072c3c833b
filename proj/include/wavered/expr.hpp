#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "wavered/errors.hpp"
#include "wavered/rational.hpp"

namespace wavered {

// Immutable symbolic expression tree. Nodes are hash-consed: structurally
// equal expressions are the same object, so equality is pointer equality.
//
// Canonical form conventions (established by simplify(), not by builders):
//   Add  - flattened, constant folded, like terms collected, children sorted
//   Mul  - flattened, numeric coefficient first, powers of equal bases merged
//   Pow  - exponent is always a rational constant; sqrt is Pow(., 1/2),
//          division is Pow(., -1)
// Builders construct raw trees; call simplify() for the normal form.

enum class Kind { Num, FloatNum, Var, Add, Mul, Pow, Call };
enum class Fn { Exp, Log, Sin, Cos };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  Rational value;           // Num
  double fvalue = 0.0;      // FloatNum
  std::string name;         // Var
  Fn fn = Fn::Exp;          // Call
  Rational exponent;        // Pow
  std::vector<Expr> kids;   // Add/Mul children, Pow base, Call argument
  std::size_t hash = 0;
};

// --- construction (hash-consing) ---
Expr num(Rational r);
Expr num(long long n);
Expr num(long long n, long long d);
Expr fnum(double v);
Expr var(const std::string& name);
Expr add(std::vector<Expr> kids);
Expr mul(std::vector<Expr> kids);
Expr pow(Expr base, Rational exponent);
Expr call(Fn fn, Expr arg);

// convenience raw builders
Expr add2(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul2(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr neg(Expr a);
Expr sqrt_(Expr a);

extern const Expr kZero;
extern const Expr kOne;

inline bool is_num(const Expr& e) { return e->kind == Kind::Num; }
inline bool is_zero_num(const Expr& e) { return e->kind == Kind::Num && e->value.is_zero(); }
inline bool is_one_num(const Expr& e) { return e->kind == Kind::Num && e->value.is_one(); }

// Deterministic structural total order (independent of pointer values).
int compare(const Expr& a, const Expr& b);

const char* fn_name(Fn f);

// --- printing ---
// Canonical text form; parse(to_string(e)) round-trips to simplify(e).
std::string to_string(const Expr& e);

// --- variable space ---
// Declares the symbols an expression may use: spacetime coordinates
// x0..xn, reduced variables, and parameters. The three name sets are
// pairwise disjoint.
class VarSpace {
 public:
  VarSpace(int n, std::set<std::string> reduced = {}, std::set<std::string> params = {});

  int n() const { return n_; }
  int dim() const { return n_ + 1; }  // spacetime dimension
  std::string coord(int mu) const { return "x" + std::to_string(mu); }
  std::vector<std::string> coords() const;
  bool is_coord(const std::string& name) const;
  bool is_known(const std::string& name) const;
  const std::set<std::string>& reduced() const { return reduced_; }
  const std::set<std::string>& params() const { return params_; }

 private:
  int n_;
  std::set<std::string> reduced_;
  std::set<std::string> params_;
};

// --- parsing ---
Expr parse(const std::string& text, const VarSpace& space);

// --- structural queries / rewriting ---
void free_vars(const Expr& e, std::set<std::string>& out);
std::set<std::string> free_vars(const Expr& e);
bool contains_var(const Expr& e, const std::string& name);

// depends_on simplifies first, so x1 - x1 does not depend on x1.
bool depends_on(const Expr& e, const std::set<std::string>& vars);

// Replace every occurrence of a variable by an expression (no capture
// issues: there are no binders). Result is simplified.
Expr subst(const Expr& e, const std::string& name, const Expr& replacement);
Expr subst(const Expr& e, const std::map<std::string, Expr>& repl);

// --- calculus ---
Expr diff(const Expr& e, const std::string& name);

// --- simplification ---
// Terminating rewrite system, bounded pass count. Guarantees constant
// folding (exact rational), 0/1 identities, like-monomial collection,
// power merging, and sin^2 + cos^2 -> 1.
Expr simplify(const Expr& e, int max_passes = 8);

// True iff simplify(e) is the literal constant 0.
bool is_zero(const Expr& e);

// --- evaluation ---
// IEEE double evaluation. Throws EvalError on unbound symbols and domain
// violations. singular_tube > 0 additionally rejects points within that
// distance of a singular locus (small denominators, log/sqrt arguments
// near the domain boundary).
double eval(const Expr& e, const std::map<std::string, double>& env, double singular_tube = 0.0);

// Forward-mode dual number: value plus derivative in one seeded direction.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

// Evaluates e with the seed variable carrying derivative 1; returns value
// and d e / d seed. Same domain error behavior as eval().
Dual eval_dual(const Expr& e, const std::map<std::string, double>& env, const std::string& seed,
               double singular_tube = 0.0);

}  // namespace wavered
