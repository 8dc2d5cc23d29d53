#include "curvmax/symexpr.hpp"

#include <algorithm>

namespace curvmax::sym {

namespace {

Expr d(const Expr& e, const std::string& v) {
  switch (e.kind()) {
    case Kind::Constant:
      return Expr(0);
    case Kind::Variable:
      return Expr(e.name() == v ? 1 : 0);
    case Kind::Field: {
      const Node& n = e.node();
      auto it = std::find(n.deps.begin(), n.deps.end(), v);
      if (it == n.deps.end()) return Expr(0);
      auto orders = n.orders;
      ++orders[static_cast<std::size_t>(it - n.deps.begin())];
      return Expr::jet(n.name, n.deps, std::move(orders));
    }
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const auto& c : e.children()) terms.push_back(d(c, v));
      return Expr::add(std::move(terms));
    }
    case Kind::Neg:
      return Expr::neg(d(e.child(0), v));
    case Kind::Mul: {
      const auto& cs = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!depends_on(cs[i], v)) continue;
        std::vector<Expr> fs = cs;
        fs[i] = d(cs[i], v);
        terms.push_back(Expr::mul(std::move(fs)));
      }
      return Expr::add(std::move(terms));
    }
    case Kind::Div: {
      const Expr& a = e.child(0);
      const Expr& b = e.child(1);
      return Expr::div(d(a, v) * b - a * d(b, v), Expr::pow(b, Rational(2)));
    }
    case Kind::Pow: {
      const Expr& b = e.child(0);
      const Rational& q = e.value();
      return Expr::mul({Expr(q), Expr::pow(b, q - 1), d(b, v)});
    }
    case Kind::Func: {
      const Expr& x = e.child(0);
      Expr dx = d(x, v);
      switch (e.node().fn) {
        case Func::Sin: return cos(x) * dx;
        case Func::Cos: return -(sin(x) * dx);
        case Func::Tan: return (Expr(1) + Expr::pow(tan(x), Rational(2))) * dx;
        case Func::Sqrt: return Expr::div(dx, Expr(2) * sqrt(x));
        case Func::Exp: return exp(x) * dx;
        case Func::Log: return Expr::div(dx, x);
        case Func::Arctan: return Expr::div(dx, Expr(1) + Expr::pow(x, Rational(2)));
        case Func::Arccos:
          return -Expr::div(dx, sqrt(Expr(1) - Expr::pow(x, Rational(2))));
      }
    }
  }
  return Expr(0);
}

}  // namespace

Expr diff(const Expr& e, const std::string& v, const Assumptions& assume) {
  return simplify(d(e, v), assume);
}

}  // namespace curvmax::sym
