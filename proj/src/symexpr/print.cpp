#include "curvmax/symexpr.hpp"

#include <cctype>
#include <sstream>

namespace curvmax::sym {

namespace {

std::string rational_text(const Rational& q) {
  std::string s = std::to_string(q.numerator());
  if (q.denominator() != 1) s += "/" + std::to_string(q.denominator());
  return s;
}

bool is_negative_term(const Expr& e) {
  if (e.is_constant()) return e.value() < 0;
  if (e.kind() == Kind::Neg) return true;
  if (e.kind() == Kind::Mul && !e.children().empty() && e.child(0).is_constant())
    return e.child(0).value() < 0;
  return false;
}

Expr negate_term(const Expr& e) {
  if (e.is_constant()) return Expr(-e.value());
  if (e.kind() == Kind::Neg) return e.child(0);
  std::vector<Expr> fs = e.children();
  Rational c = -fs[0].value();
  if (c == 1)
    fs.erase(fs.begin());
  else
    fs[0] = Expr(c);
  return Expr::mul(std::move(fs));
}

// Binding strength of the printed form: 1 sum, 2 product/quotient/unary
// minus, 3 power, 4 atom.
int prec(const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant:
      return (e.value() >= 0 && e.value().denominator() == 1) ? 4 : 2;
    case Kind::Variable:
    case Kind::Field:
    case Kind::Func:
      return 4;
    case Kind::Pow:
      if (e.value() < 0) return 2;
      if (e.value() == Rational(1, 2)) return 4;
      return 3;
    case Kind::Mul:
    case Kind::Neg:
    case Kind::Div:
      return 2;
    case Kind::Add:
      return 1;
  }
  return 4;
}

// Plain-text and LaTeX emitters share the product/quotient layout logic.
class Printer {
 public:
  explicit Printer(const LatexNames* latex) : latex_(latex) {}

  std::string print(const Expr& e) {
    switch (e.kind()) {
      case Kind::Constant:
        return constant(e.value());
      case Kind::Variable:
        return variable(e.name());
      case Kind::Field:
        return field(e.node());
      case Kind::Func:
        return func(e.node().fn, e.child(0));
      case Kind::Add:
        return sum(e);
      case Kind::Mul:
        return product(e);
      case Kind::Pow:
        return power(e);
      case Kind::Neg:
        return "-" + wrap(e.child(0), 2);
      case Kind::Div:
        if (latex_) return "\\frac{" + print(e.child(0)) + "}{" + print(e.child(1)) + "}";
        return wrap(e.child(0), 2) + "/" + wrap(e.child(1), 3);
    }
    return "?";
  }

 private:
  std::string wrap(const Expr& e, int min_prec) {
    std::string s = print(e);
    if (prec(e) >= min_prec) return s;
    return latex_ ? "\\left(" + s + "\\right)" : "(" + s + ")";
  }

  std::string constant(const Rational& q) {
    if (!latex_ || q.denominator() == 1) return rational_text(q);
    std::string s = q < 0 ? "-" : "";
    return s + "\\frac{" + std::to_string(std::abs(q.numerator())) + "}{" +
           std::to_string(q.denominator()) + "}";
  }

  std::string variable(const std::string& name) {
    if (!latex_) return name;
    return latex_name(name);
  }

  std::string latex_name(const std::string& name) {
    auto it = latex_->names.find(name);
    if (it != latex_->names.end()) return it->second;
    static const std::map<std::string, std::string> greek = {
        {"phi", "\\varphi"}, {"theta", "\\vartheta"}, {"rho", "\\rho"},   {"pi", "\\pi"},
        {"mu", "\\mu"},      {"epsilon", "\\varepsilon"}, {"omega", "\\omega"},
        {"psi", "\\psi"},    {"alpha", "\\alpha"},   {"beta", "\\beta"},
    };
    auto g = greek.find(name);
    if (g != greek.end()) return g->second;
    // Trailing digits become a subscript: E3 -> E_{3}.
    std::size_t k = name.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(name[k - 1]))) --k;
    std::string stem = name.substr(0, k);
    auto gs = greek.find(stem);
    if (gs != greek.end()) stem = gs->second;
    if (k == name.size() || k == 0) return stem.size() > 1 && stem[0] != '\\' ? "\\mathrm{" + stem + "}" : stem;
    return stem + "_{" + name.substr(k) + "}";
  }

  std::string field(const Node& n) {
    if (!latex_) return jet_key(n);
    std::string s;
    for (std::size_t i = 0; i < n.deps.size(); ++i)
      for (int k = 0; k < n.orders[i]; ++k) s += "\\partial_{" + latex_name(n.deps[i]) + "}";
    return s + (s.empty() ? "" : " ") + latex_name(n.name);
  }

  std::string func(Func f, const Expr& arg) {
    if (!latex_) return std::string(func_name(f)) + "(" + print(arg) + ")";
    if (f == Func::Sqrt) return "\\sqrt{" + print(arg) + "}";
    static const char* names[] = {"\\sin", "\\cos", "\\tan", "\\sqrt", "\\exp", "\\ln",
                                  "\\arctan", "\\arccos"};
    return std::string(names[static_cast<int>(f)]) + "\\left(" + print(arg) + "\\right)";
  }

  std::string sum(const Expr& e) {
    std::string s;
    bool first = true;
    for (const auto& t : e.children()) {
      if (first) {
        s = print(t);
        first = false;
      } else if (is_negative_term(t)) {
        s += " - " + wrap(negate_term(t), 2);
      } else {
        s += " + " + print(t);
      }
    }
    return s;
  }

  std::string power(const Expr& e) {
    const Expr& b = e.child(0);
    const Rational& q = e.value();
    if (q < 0) {
      Expr positive = Expr::pow(b, -q);
      Expr pos = -q == 1 ? b : positive;
      if (latex_) return "\\frac{1}{" + print(pos) + "}";
      return "1/" + wrap(pos, 3);
    }
    if (q.denominator() == 2) {
      std::string root = latex_ ? "\\sqrt{" + print(b) + "}" : "sqrt(" + print(b) + ")";
      if (q.numerator() == 1) return root;
      return root + (latex_ ? "^{" : "^") + std::to_string(q.numerator()) + (latex_ ? "}" : "");
    }
    std::string exp = q.denominator() == 1 ? rational_text(q) : "(" + rational_text(q) + ")";
    if (latex_) return wrap(b, 4) + "^{" + rational_text(q) + "}";
    return wrap(b, 4) + "^" + exp;
  }

  std::string product(const Expr& e) {
    Rational coef(1);
    std::vector<Expr> num;
    std::vector<Expr> den;
    for (const auto& f : e.children()) {
      if (f.is_constant() && &f == &e.children().front()) {
        coef = f.value();
      } else if (f.kind() == Kind::Pow && f.value() < 0) {
        den.push_back(f.value() == -1 ? f.child(0) : Expr::pow(f.child(0), -f.value()));
      } else {
        num.push_back(f);
      }
    }
    const char* sep = latex_ ? " " : "*";
    std::string sign = coef < 0 ? "-" : "";
    Rational mag = coef < 0 ? -coef : coef;
    std::string ns;
    if (mag.numerator() != 1 || num.empty()) ns = std::to_string(mag.numerator());
    for (const auto& f : num) {
      if (!ns.empty()) ns += sep;
      ns += wrap(f, 3);
    }
    std::vector<std::string> ds;
    if (mag.denominator() != 1) ds.push_back(std::to_string(mag.denominator()));
    for (const auto& f : den) ds.push_back(wrap(f, 3));
    if (ds.empty()) return sign + ns;
    std::string dstr;
    for (std::size_t i = 0; i < ds.size(); ++i) dstr += (i ? sep : "") + ds[i];
    if (latex_) return sign + "\\frac{" + ns + "}{" + dstr + "}";
    if (ds.size() > 1) dstr = "(" + dstr + ")";
    return sign + ns + "/" + dstr;
  }

  const LatexNames* latex_;
};

}  // namespace

std::string print_expr(const Expr& e) { return Printer(nullptr).print(e); }

std::string to_latex(const Expr& e, const LatexNames& names) { return Printer(&names).print(e); }

}  // namespace curvmax::sym
