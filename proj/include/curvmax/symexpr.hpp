#ifndef CURVMAX_SYMEXPR_HPP
#define CURVMAX_SYMEXPR_HPP

// Minimal computer-algebra core: immutable expression trees over named
// coordinate variables and abstract field components, with exact rational
// constants, symbolic differentiation, canonical simplification and numeric
// evaluation.

#include <boost/rational.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvmax::sym {

using Rational = boost::rational<std::int64_t>;

// Boost 1.74 recurses forever when a rational<int64_t> is compared with a
// plain int; these exact matches win overload resolution.
inline bool operator==(const Rational& a, int b) { return a == Rational(b); }
inline bool operator!=(const Rational& a, int b) { return !(a == Rational(b)); }
inline bool operator<(const Rational& a, int b) { return a < Rational(b); }
inline bool operator>(const Rational& a, int b) { return a > Rational(b); }
inline bool operator<=(const Rational& a, int b) { return !(a > Rational(b)); }
inline bool operator>=(const Rational& a, int b) { return !(a < Rational(b)); }

enum class Kind {
  Constant,
  Variable,
  Field,  // undefined function of listed variables, possibly differentiated
  Add,
  Mul,
  Pow,    // single child, rational exponent stored in the node
  Neg,
  Div,
  Func,
};

enum class Func { Sin, Cos, Tan, Sqrt, Exp, Log, Arctan, Arccos };

const char* func_name(Func f);
std::optional<Func> func_from_name(const std::string& name);

class Expr;

struct Node {
  Kind kind = Kind::Constant;
  Rational value{0};          // constant payload, or exponent of Pow
  std::string name;           // Variable / Field
  Func fn = Func::Sin;        // Func
  std::vector<Expr> children;
  std::vector<std::string> deps;  // Field: variables it depends on
  std::vector<int> orders;        // Field: derivative order per dep
};

/// Shared handle to an immutable node. Copying is cheap; trees are never
/// mutated after construction, so handles are safe to share across threads.
class Expr {
 public:
  Expr();  // constant 0
  Expr(std::int64_t v);  // NOLINT: integers convert implicitly
  Expr(int v) : Expr(static_cast<std::int64_t>(v)) {}  // NOLINT
  Expr(Rational v);  // NOLINT

  static Expr constant(Rational v);
  static Expr variable(std::string name);
  static Expr field(std::string name, std::vector<std::string> deps);
  static Expr jet(std::string name, std::vector<std::string> deps,
                  std::vector<int> orders);
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr pow(Expr base, Rational exponent);
  static Expr neg(Expr x);
  static Expr div(Expr num, Expr den);
  static Expr func(Func f, Expr arg);

  Kind kind() const { return node_->kind; }
  const Node& node() const { return *node_; }
  const std::vector<Expr>& children() const { return node_->children; }
  const Expr& child(std::size_t i) const { return node_->children.at(i); }
  const Rational& value() const { return node_->value; }
  const std::string& name() const { return node_->name; }

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero() const { return is_constant() && value() == 0; }
  bool is_one() const { return is_constant() && value() == 1; }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Raw (unsimplified) construction helpers.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr sin(const Expr& x);
Expr cos(const Expr& x);
Expr tan(const Expr& x);
Expr sqrt(const Expr& x);
Expr exp(const Expr& x);
Expr log(const Expr& x);
Expr arctan(const Expr& x);
Expr arccos(const Expr& x);
Expr pow(const Expr& base, Rational exponent);
Expr var(const std::string& name);
Expr pi();

// Structural total order (kind rank, then payload, then children).
int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const {
    return compare(a, b) < 0;
  }
};

/// Facts the simplifier may rely on, e.g. `r > 0` or `sin(theta) > 0`
/// inside a chart's declared domain.
struct Assumptions {
  std::vector<Expr> positive;
  bool is_positive(const Expr& e) const;
};

Expr simplify(const Expr& e, const Assumptions& assume = {});
Expr diff(const Expr& e, const std::string& v, const Assumptions& assume = {});

/// Free symbols: variable names plus the key of every field jet
/// (e.g. "E1", "diff(E1,phi)"). `pi` is a constant, not a free symbol.
std::vector<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, const std::string& v);

/// Replace variables by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& vars);
/// Replace abstract fields (all their jets) by concrete expressions,
/// differentiating the replacement as the jet demands.
Expr substitute_fields(const Expr& e, const std::map<std::string, Expr>& fields);
/// Map every field jet through `fn` (used for sign flips of selected jets).
Expr map_jets(const Expr& e, const std::function<Expr(const Expr&)>& fn);

/// Key used for a field jet in bindings and printed output.
std::string jet_key(const Node& field);

// ---------------------------------------------------------------- parsing

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ParseContext {
  /// Identifiers that denote abstract fields, with their dependencies.
  std::map<std::string, std::vector<std::string>> fields;
};

Expr parse_expr(const std::string& text, const ParseContext& ctx = {});

// --------------------------------------------------------------- printing

std::string print_expr(const Expr& e);

struct LatexNames {
  /// Overrides for variable / field names, e.g. {"phi", "\\varphi"}.
  std::map<std::string, std::string> names;
};
std::string to_latex(const Expr& e, const LatexNames& names = {});

// ------------------------------------------------------------- evaluation

using Binding = std::map<std::string, double>;

class EvalError : public std::runtime_error {
 public:
  enum class Reason { Unbound, Domain, DivisionByZero };
  EvalError(Reason r, const std::string& what) : std::runtime_error(what), reason_(r) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

double eval_expr(const Expr& e, const Binding& b);

/// Flat stack program with variables resolved to slots; evaluation is
/// reentrant, so one program may be run from several threads.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, std::vector<std::string> slots);

  double operator()(std::span<const double> values) const;
  /// Value together with a rounding-scale estimate (sum of magnitudes of
  /// all summands along the tree).
  std::pair<double, double> eval_with_scale(std::span<const double> values) const;
  const std::vector<std::string>& slots() const { return slots_; }

 private:
  enum class Op : std::uint8_t { Const, Slot, Add, Mul, PowInt, PowHalf, PowReal, Neg, Div, Fn };
  struct Instr {
    Op op;
    int arg = 0;       // slot index, child count, integer exponent
    double num = 0.0;  // constant or real exponent
    Func fn = Func::Sin;
    Expr src;          // subexpression, for error messages
  };
  void emit(const Expr& e);

  std::vector<Instr> code_;
  std::vector<std::string> slots_;
};

struct Interval {
  double lo = 0.1;
  double hi = 2.0;
};

struct EquivalenceOptions {
  std::map<std::string, Interval> domains;
  Interval default_domain{0.1, 2.0};
  int samples = 100;
  double rel_tol = 1e-10;
  std::uint64_t seed = 20120101;
};

class IllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EquivalenceResult {
  bool equal = false;
  int evaluated = 0;
  int failures = 0;
  double max_rel_error = 0.0;
};

EquivalenceResult compare_numeric(const Expr& a, const Expr& b,
                                  const EquivalenceOptions& opt = {});
bool equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opt = {});
/// As above; throws std::invalid_argument if `vars` misses a free symbol.
bool equivalent(const Expr& a, const Expr& b, const std::vector<std::string>& vars,
                const EquivalenceOptions& opt = {});

}  // namespace curvmax::sym

#endif  // CURVMAX_SYMEXPR_HPP
