#include "curvmax/symexpr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace curvmax::sym {

namespace {

double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

[[noreturn]] void domain_error(const char* what, const Expr& src) {
  throw EvalError(EvalError::Reason::Domain, std::string(what) + " in " + print_expr(src));
}

[[noreturn]] void division_by_zero(const Expr& src) {
  throw EvalError(EvalError::Reason::DivisionByZero, "division by zero in " + print_expr(src));
}

double apply_pow(double x, const Rational& q, const Expr& src) {
  if (q.denominator() == 1) {
    if (x == 0.0 && q < 0) division_by_zero(src);
    return std::pow(x, static_cast<double>(q.numerator()));
  }
  if (x < 0.0) domain_error("fractional power of negative value", src);
  if (x == 0.0 && q < 0) division_by_zero(src);
  if (q.denominator() == 2) return std::pow(std::sqrt(x), static_cast<double>(q.numerator()));
  return std::pow(x, to_double(q));
}

double apply_fn(Func f, double x, const Expr& src) {
  switch (f) {
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Tan: {
      double c = std::cos(x);
      if (c == 0.0) division_by_zero(src);
      return std::tan(x);
    }
    case Func::Sqrt:
      if (x < 0.0) domain_error("sqrt of negative value", src);
      return std::sqrt(x);
    case Func::Exp: return std::exp(x);
    case Func::Log:
      if (x <= 0.0) domain_error("log of non-positive value", src);
      return std::log(x);
    case Func::Arctan: return std::atan(x);
    case Func::Arccos:
      if (x < -1.0 || x > 1.0) domain_error("arccos outside [-1, 1]", src);
      return std::acos(x);
  }
  return 0.0;
}

// |f'(x)|, for first-order propagation of the rounding scale.
double fn_slope(Func f, double x, double fx) {
  switch (f) {
    case Func::Sin: return std::abs(std::cos(x));
    case Func::Cos: return std::abs(std::sin(x));
    case Func::Tan: return 1.0 + fx * fx;
    case Func::Sqrt: return fx > 0.0 ? 0.5 / fx : 0.0;
    case Func::Exp: return fx;
    case Func::Log: return 1.0 / std::abs(x);
    case Func::Arctan: return 1.0 / (1.0 + x * x);
    case Func::Arccos: {
      double s = 1.0 - x * x;
      return s > 0.0 ? 1.0 / std::sqrt(s) : 0.0;
    }
  }
  return 0.0;
}

double eval_rec(const Expr& e, const Binding& b) {
  switch (e.kind()) {
    case Kind::Constant:
      return to_double(e.value());
    case Kind::Variable: {
      auto it = b.find(e.name());
      if (it != b.end()) return it->second;
      if (e.name() == "pi") return std::numbers::pi;
      throw EvalError(EvalError::Reason::Unbound, "unbound variable '" + e.name() + "'");
    }
    case Kind::Field: {
      std::string key = jet_key(e.node());
      auto it = b.find(key);
      if (it == b.end())
        throw EvalError(EvalError::Reason::Unbound, "unbound field '" + key + "'");
      return it->second;
    }
    case Kind::Add: {
      double s = 0.0;
      for (const auto& c : e.children()) s += eval_rec(c, b);
      return s;
    }
    case Kind::Mul: {
      double p = 1.0;
      for (const auto& c : e.children()) p *= eval_rec(c, b);
      return p;
    }
    case Kind::Pow:
      return apply_pow(eval_rec(e.child(0), b), e.value(), e);
    case Kind::Neg:
      return -eval_rec(e.child(0), b);
    case Kind::Div: {
      double n = eval_rec(e.child(0), b);
      double d = eval_rec(e.child(1), b);
      if (d == 0.0) division_by_zero(e);
      return n / d;
    }
    case Kind::Func:
      return apply_fn(e.node().fn, eval_rec(e.child(0), b), e);
  }
  return 0.0;
}

}  // namespace

double eval_expr(const Expr& e, const Binding& b) { return eval_rec(e, b); }

CompiledExpr::CompiledExpr(const Expr& e, std::vector<std::string> slots)
    : slots_(std::move(slots)) {
  emit(e);
}

void CompiledExpr::emit(const Expr& e) {
  Instr in;
  switch (e.kind()) {
    case Kind::Constant:
      in.op = Op::Const;
      in.num = to_double(e.value());
      break;
    case Kind::Variable:
    case Kind::Field: {
      std::string key = e.kind() == Kind::Field ? jet_key(e.node()) : e.name();
      auto it = std::find(slots_.begin(), slots_.end(), key);
      if (it == slots_.end()) {
        if (key == "pi") {
          in.op = Op::Const;
          in.num = std::numbers::pi;
          break;
        }
        throw EvalError(EvalError::Reason::Unbound, "unbound symbol '" + key + "'");
      }
      in.op = Op::Slot;
      in.arg = static_cast<int>(it - slots_.begin());
      break;
    }
    case Kind::Add:
    case Kind::Mul:
      for (const auto& c : e.children()) emit(c);
      in.op = e.kind() == Kind::Add ? Op::Add : Op::Mul;
      in.arg = static_cast<int>(e.children().size());
      break;
    case Kind::Pow: {
      emit(e.child(0));
      const Rational& q = e.value();
      if (q.denominator() == 1) {
        in.op = Op::PowInt;
        in.arg = static_cast<int>(q.numerator());
      } else if (q.denominator() == 2) {
        in.op = Op::PowHalf;
        in.arg = static_cast<int>(q.numerator());
      } else {
        in.op = Op::PowReal;
      }
      in.num = to_double(q);
      in.src = e;
      break;
    }
    case Kind::Neg:
      emit(e.child(0));
      in.op = Op::Neg;
      break;
    case Kind::Div:
      emit(e.child(0));
      emit(e.child(1));
      in.op = Op::Div;
      in.src = e;
      break;
    case Kind::Func:
      emit(e.child(0));
      in.op = Op::Fn;
      in.fn = e.node().fn;
      in.src = e;
      break;
  }
  code_.push_back(std::move(in));
}

double CompiledExpr::operator()(std::span<const double> values) const {
  return eval_with_scale(values).first;
}

std::pair<double, double> CompiledExpr::eval_with_scale(std::span<const double> values) const {
  // Each stack entry carries the value and an upper estimate of the sum of
  // magnitudes that went into it.
  std::vector<std::pair<double, double>> st;
  st.reserve(32);
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const:
        st.emplace_back(in.num, std::abs(in.num));
        break;
      case Op::Slot: {
        double v = values[static_cast<std::size_t>(in.arg)];
        st.emplace_back(v, std::abs(v));
        break;
      }
      case Op::Add:
      case Op::Mul: {
        std::size_t n = static_cast<std::size_t>(in.arg);
        auto first = st.end() - static_cast<std::ptrdiff_t>(n);
        double v = in.op == Op::Add ? 0.0 : 1.0;
        double s = in.op == Op::Add ? 0.0 : 1.0;
        for (auto it = first; it != st.end(); ++it) {
          if (in.op == Op::Add) {
            v += it->first;
            s += it->second;
          } else {
            v *= it->first;
            s *= it->second;
          }
        }
        st.erase(first, st.end());
        st.emplace_back(v, std::max(s, std::abs(v)));
        break;
      }
      case Op::PowInt:
      case Op::PowHalf:
      case Op::PowReal: {
        auto [x, sx] = st.back();
        double v = apply_pow(x, in.src.value(), in.src);
        double slope = x != 0.0 ? std::abs(in.num * v / x) : 0.0;
        st.back() = {v, std::abs(v) + slope * sx};
        break;
      }
      case Op::Neg:
        st.back().first = -st.back().first;
        break;
      case Op::Div: {
        auto [d, sd] = st.back();
        st.pop_back();
        auto [n, sn] = st.back();
        if (d == 0.0) division_by_zero(in.src);
        double v = n / d;
        st.back() = {v, std::abs(v) + sn / std::abs(d) + std::abs(v) * sd / std::abs(d)};
        break;
      }
      case Op::Fn: {
        auto [x, sx] = st.back();
        double v = apply_fn(in.fn, x, in.src);
        st.back() = {v, std::abs(v) + fn_slope(in.fn, x, v) * sx};
        break;
      }
    }
  }
  return st.back();
}

EquivalenceResult compare_numeric(const Expr& a, const Expr& b, const EquivalenceOptions& opt) {
  std::set<std::string> syms;
  for (auto& s : free_symbols(a)) syms.insert(s);
  for (auto& s : free_symbols(b)) syms.insert(s);
  std::vector<std::string> slots(syms.begin(), syms.end());
  CompiledExpr ca(a, slots);
  CompiledExpr cb(b, slots);

  std::vector<Interval> dom;
  for (const auto& s : slots) {
    auto it = opt.domains.find(s);
    dom.push_back(it == opt.domains.end() ? opt.default_domain : it->second);
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> pt(slots.size());
  EquivalenceResult res;
  int singular = 0;
  for (int k = 0; k < opt.samples; ++k) {
    for (std::size_t i = 0; i < pt.size(); ++i)
      pt[i] = dom[i].lo + (dom[i].hi - dom[i].lo) * unit(rng);
    std::pair<double, double> va, vb;
    try {
      va = ca.eval_with_scale(pt);
      vb = cb.eval_with_scale(pt);
    } catch (const EvalError&) {
      ++singular;
      continue;
    }
    if (!std::isfinite(va.first) || !std::isfinite(vb.first)) {
      ++singular;
      continue;
    }
    ++res.evaluated;
    double scale = std::max(va.second, vb.second);
    double err = std::abs(va.first - vb.first);
    double rel = scale > 0.0 ? err / scale : 0.0;
    res.max_rel_error = std::max(res.max_rel_error, rel);
    if (rel > opt.rel_tol) ++res.failures;
  }
  if (2 * singular > opt.samples)
    throw IllConditioned("ill-conditioned comparison: " + std::to_string(singular) + " of " +
                         std::to_string(opt.samples) + " sample points singular");
  res.equal = res.failures == 0 && res.evaluated > 0;
  return res;
}

bool equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opt) {
  return compare_numeric(a, b, opt).equal;
}

bool equivalent(const Expr& a, const Expr& b, const std::vector<std::string>& vars,
                const EquivalenceOptions& opt) {
  std::set<std::string> allowed(vars.begin(), vars.end());
  for (const auto* e : {&a, &b})
    for (const auto& s : free_symbols(*e))
      if (!allowed.count(s))
        throw std::invalid_argument("equivalent: variable '" + s + "' not in variable list");
  return compare_numeric(a, b, opt).equal;
}

}  // namespace curvmax::sym
