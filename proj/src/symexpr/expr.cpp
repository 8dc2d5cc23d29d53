#include "curvmax/symexpr.hpp"

#include <algorithm>
#include <set>

namespace curvmax::sym {

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sqrt: return "sqrt";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Arctan: return "arctan";
    case Func::Arccos: return "arccos";
  }
  return "?";
}

std::optional<Func> func_from_name(const std::string& name) {
  static const std::map<std::string, Func> table = {
      {"sin", Func::Sin},       {"cos", Func::Cos},       {"tan", Func::Tan},
      {"sqrt", Func::Sqrt},     {"exp", Func::Exp},       {"log", Func::Log},
      {"arctan", Func::Arctan}, {"arccos", Func::Arccos},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

namespace {

std::shared_ptr<Node> make_node(Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

}  // namespace

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(std::int64_t v) : Expr(Rational(v)) {}
Expr::Expr(Rational v) {
  auto n = make_node(Kind::Constant);
  n->value = v;
  node_ = std::move(n);
}

Expr Expr::constant(Rational v) { return Expr(v); }

Expr Expr::variable(std::string name) {
  auto n = make_node(Kind::Variable);
  n->name = std::move(name);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::field(std::string name, std::vector<std::string> deps) {
  std::vector<int> orders(deps.size(), 0);
  return jet(std::move(name), std::move(deps), std::move(orders));
}

Expr Expr::jet(std::string name, std::vector<std::string> deps, std::vector<int> orders) {
  if (deps.size() != orders.size())
    throw std::invalid_argument("field jet: deps/orders size mismatch");
  auto n = make_node(Kind::Field);
  n->name = std::move(name);
  n->deps = std::move(deps);
  n->orders = std::move(orders);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::add(std::vector<Expr> terms) {
  if (terms.empty()) return Expr(0);
  if (terms.size() == 1) return terms.front();
  auto n = make_node(Kind::Add);
  n->children = std::move(terms);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::mul(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1);
  if (factors.size() == 1) return factors.front();
  auto n = make_node(Kind::Mul);
  n->children = std::move(factors);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::pow(Expr base, Rational exponent) {
  auto n = make_node(Kind::Pow);
  n->value = exponent;
  n->children.push_back(std::move(base));
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::neg(Expr x) {
  auto n = make_node(Kind::Neg);
  n->children.push_back(std::move(x));
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::div(Expr num, Expr den) {
  auto n = make_node(Kind::Div);
  n->children.push_back(std::move(num));
  n->children.push_back(std::move(den));
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::func(Func f, Expr arg) {
  auto n = make_node(Kind::Func);
  n->fn = f;
  n->children.push_back(std::move(arg));
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, Expr::neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }
Expr operator-(const Expr& a) { return Expr::neg(a); }
Expr sin(const Expr& x) { return Expr::func(Func::Sin, x); }
Expr cos(const Expr& x) { return Expr::func(Func::Cos, x); }
Expr tan(const Expr& x) { return Expr::func(Func::Tan, x); }
Expr sqrt(const Expr& x) { return Expr::func(Func::Sqrt, x); }
Expr exp(const Expr& x) { return Expr::func(Func::Exp, x); }
Expr log(const Expr& x) { return Expr::func(Func::Log, x); }
Expr arctan(const Expr& x) { return Expr::func(Func::Arctan, x); }
Expr arccos(const Expr& x) { return Expr::func(Func::Arccos, x); }
Expr pow(const Expr& base, Rational exponent) { return Expr::pow(base, exponent); }
Expr var(const std::string& name) { return Expr::variable(name); }
Expr pi() { return Expr::variable("pi"); }

namespace {

int kind_rank(Kind k) {
  switch (k) {
    case Kind::Constant: return 0;
    case Kind::Variable: return 1;
    case Kind::Field: return 2;
    case Kind::Func: return 3;
    case Kind::Pow: return 4;
    case Kind::Mul: return 5;
    case Kind::Add: return 6;
    case Kind::Neg: return 7;
    case Kind::Div: return 8;
  }
  return 9;
}

int cmp_rational(const Rational& a, const Rational& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
  const Node& x = a.node();
  const Node& y = b.node();
  if (&x == &y) return 0;
  if (int d = kind_rank(x.kind) - kind_rank(y.kind)) return d < 0 ? -1 : 1;
  switch (x.kind) {
    case Kind::Constant:
      return cmp_rational(x.value, y.value);
    case Kind::Variable:
      return x.name.compare(y.name) < 0 ? -1 : (x.name == y.name ? 0 : 1);
    case Kind::Field: {
      if (x.name != y.name) return x.name < y.name ? -1 : 1;
      if (x.deps != y.deps) return x.deps < y.deps ? -1 : 1;
      if (x.orders != y.orders) return x.orders < y.orders ? -1 : 1;
      return 0;
    }
    case Kind::Func:
      if (x.fn != y.fn) return static_cast<int>(x.fn) < static_cast<int>(y.fn) ? -1 : 1;
      break;
    case Kind::Pow:
      if (int c = compare(x.children[0], y.children[0])) return c;
      return cmp_rational(x.value, y.value);
    default:
      break;
  }
  // Lexicographic over children, compared from the last (most significant
  // in canonical sorted order) so that e.g. x*y and z*y group by y.
  const auto& cx = x.children;
  const auto& cy = y.children;
  std::size_t n = std::min(cx.size(), cy.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(cx[cx.size() - 1 - i], cy[cy.size() - 1 - i])) return c;
  }
  if (cx.size() != cy.size()) return cx.size() < cy.size() ? -1 : 1;
  return 0;
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

bool Assumptions::is_positive(const Expr& e) const {
  for (const auto& p : positive)
    if (p == e) return true;
  switch (e.kind()) {
    case Kind::Constant:
      return e.value() > 0;
    case Kind::Variable:
      return e.name() == "pi";
    case Kind::Pow:
      if (is_positive(e.child(0))) return true;
      return false;
    case Kind::Mul:
    case Kind::Add:
      return !e.children().empty() &&
             std::all_of(e.children().begin(), e.children().end(),
                         [&](const Expr& c) { return is_positive(c); });
    case Kind::Func:
      if (e.node().fn == Func::Exp) return true;
      if (e.node().fn == Func::Sqrt) return is_positive(e.child(0));
      return false;
    case Kind::Div:
      return is_positive(e.child(0)) && is_positive(e.child(1));
    default:
      return false;
  }
}

std::string jet_key(const Node& f) {
  std::string s = f.name;
  for (std::size_t i = 0; i < f.deps.size(); ++i)
    for (int k = 0; k < f.orders[i]; ++k) s = "diff(" + s + "," + f.deps[i] + ")";
  return s;
}

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Kind::Constant:
      return;
    case Kind::Variable:
      if (e.name() != "pi") out.insert(e.name());
      return;
    case Kind::Field:
      out.insert(jet_key(e.node()));
      return;
    default:
      for (const auto& c : e.children()) collect_symbols(c, out);
  }
}

template <class Leaf>
Expr rebuild(const Expr& e, const Leaf& leaf) {
  switch (e.kind()) {
    case Kind::Constant:
      return e;
    case Kind::Variable:
    case Kind::Field:
      return leaf(e);
    case Kind::Add: {
      std::vector<Expr> c;
      for (const auto& x : e.children()) c.push_back(rebuild(x, leaf));
      return Expr::add(std::move(c));
    }
    case Kind::Mul: {
      std::vector<Expr> c;
      for (const auto& x : e.children()) c.push_back(rebuild(x, leaf));
      return Expr::mul(std::move(c));
    }
    case Kind::Pow:
      return Expr::pow(rebuild(e.child(0), leaf), e.value());
    case Kind::Neg:
      return Expr::neg(rebuild(e.child(0), leaf));
    case Kind::Div:
      return Expr::div(rebuild(e.child(0), leaf), rebuild(e.child(1), leaf));
    case Kind::Func:
      return Expr::func(e.node().fn, rebuild(e.child(0), leaf));
  }
  return e;
}

}  // namespace

std::vector<std::string> free_symbols(const Expr& e) {
  std::set<std::string> s;
  collect_symbols(e, s);
  return {s.begin(), s.end()};
}

bool depends_on(const Expr& e, const std::string& v) {
  switch (e.kind()) {
    case Kind::Constant:
      return false;
    case Kind::Variable:
      return e.name() == v;
    case Kind::Field:
      return std::find(e.node().deps.begin(), e.node().deps.end(), v) != e.node().deps.end();
    default:
      return std::any_of(e.children().begin(), e.children().end(),
                         [&](const Expr& c) { return depends_on(c, v); });
  }
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& vars) {
  return rebuild(e, [&](const Expr& leaf) {
    if (leaf.kind() == Kind::Variable) {
      auto it = vars.find(leaf.name());
      if (it != vars.end()) return it->second;
    }
    return leaf;
  });
}

Expr substitute_fields(const Expr& e, const std::map<std::string, Expr>& fields) {
  return rebuild(e, [&](const Expr& leaf) {
    if (leaf.kind() != Kind::Field) return leaf;
    auto it = fields.find(leaf.name());
    if (it == fields.end()) return leaf;
    Expr r = it->second;
    const Node& n = leaf.node();
    for (std::size_t i = 0; i < n.deps.size(); ++i)
      for (int k = 0; k < n.orders[i]; ++k) r = diff(r, n.deps[i]);
    return r;
  });
}

Expr map_jets(const Expr& e, const std::function<Expr(const Expr&)>& fn) {
  return rebuild(e, [&](const Expr& leaf) {
    return leaf.kind() == Kind::Field ? fn(leaf) : leaf;
  });
}

}  // namespace curvmax::sym
