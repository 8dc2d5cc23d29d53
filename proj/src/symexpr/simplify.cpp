#include "curvmax/symexpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace curvmax::sym {

namespace {

// Products of sums are expanded; this bounds the expansion of a single
// product so pathological inputs fail loudly instead of exhausting memory.
constexpr std::size_t kMaxExpandedTerms = 200000;

bool is_integer(const Rational& q) { return q.denominator() == 1; }

std::optional<std::int64_t> exact_isqrt(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  for (std::int64_t c = std::max<std::int64_t>(0, r - 2); c <= r + 2; ++c)
    if (c * c == v) return c;
  return std::nullopt;
}

Rational rational_ipow(Rational base, std::int64_t n) {
  if (n < 0) {
    if (base == 0) throw std::domain_error("0 to a negative power");
    base = Rational(1) / base;
    n = -n;
  }
  Rational r(1);
  while (n) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

class Simplifier {
 public:
  explicit Simplifier(const Assumptions& a) : assume_(a) {}

  Expr run(const Expr& e) {
    switch (e.kind()) {
      case Kind::Constant:
      case Kind::Variable:
      case Kind::Field:
        return e;
      case Kind::Neg:
        return make_mul({Expr(-1), run(e.child(0))});
      case Kind::Div:
        return make_mul({run(e.child(0)), inverse_power(e.child(1), Rational(-1))});
      case Kind::Pow:
        if (is_integer(e.value()) && e.value() < 0) return inverse_power(e.child(0), e.value());
        return make_pow(run(e.child(0)), e.value());
      case Kind::Func:
        return make_func(e.node().fn, run(e.child(0)));
      case Kind::Add: {
        std::vector<Expr> terms;
        for (const auto& c : e.children()) terms.push_back(run(c));
        return make_add(std::move(terms));
      }
      case Kind::Mul: {
        std::vector<Expr> factors;
        for (const auto& c : e.children()) factors.push_back(run(c));
        return make_mul(std::move(factors));
      }
    }
    return e;
  }

  // Negative integer power of an unsimplified tree. Distributes over the
  // factors first so that 1/(A*B) with sums A, B stays factored instead of
  // inverting the expanded product.
  Expr inverse_power(const Expr& raw, const Rational& q) {
    switch (raw.kind()) {
      case Kind::Mul: {
        std::vector<Expr> fs;
        for (const auto& c : raw.children()) fs.push_back(inverse_power(c, q));
        return make_mul(std::move(fs));
      }
      case Kind::Neg:
        return make_mul({const_pow(Rational(-1), q), inverse_power(raw.child(0), q)});
      case Kind::Div:
        return make_mul({inverse_power(raw.child(0), q), make_pow(run(raw.child(1)), -q)});
      case Kind::Pow:
        if (is_integer(raw.value())) {
          Rational p = raw.value() * q;
          return p < 0 ? inverse_power(raw.child(0), p) : make_pow(run(raw.child(0)), p);
        }
        break;
      default:
        break;
    }
    return make_pow(run(raw), q);
  }

  // ---- functions ----------------------------------------------------------

  Expr make_func(Func f, const Expr& arg) {
    if (f == Func::Sqrt) return make_pow(arg, Rational(1, 2));
    if (arg.is_constant()) {
      const Rational& v = arg.value();
      if (v == 0) {
        switch (f) {
          case Func::Sin: case Func::Tan: case Func::Arctan: return Expr(0);
          case Func::Cos: case Func::Exp: return Expr(1);
          default: break;
        }
      }
      if (v == 1 && f == Func::Log) return Expr(0);
      if (v == 1 && f == Func::Arccos) return Expr(0);
    }
    // Parity: pull a negative coefficient out of odd functions.
    auto [coef, rest] = split_coefficient(arg);
    if (coef < 0) {
      Expr flipped = make_mul({Expr(-coef), rest});
      switch (f) {
        case Func::Sin: case Func::Tan: case Func::Arctan:
          return make_mul({Expr(-1), Expr::func(f, flipped)});
        case Func::Cos:
          return Expr::func(f, flipped);
        default:
          break;
      }
    }
    return Expr::func(f, arg);
  }

  // ---- powers -------------------------------------------------------------

  Expr make_pow(const Expr& base, const Rational& q) {
    if (q == 0) return Expr(1);
    if (q == 1) return base;
    switch (base.kind()) {
      case Kind::Constant:
        return const_pow(base.value(), q);
      case Kind::Pow: {
        const Rational& inner = base.value();
        if (is_integer(q) || assume_.is_positive(base.child(0)) ||
            (is_integer(inner) && inner.numerator() % 2 != 0 && is_integer(inner * q)))
          return make_pow(base.child(0), inner * q);
        // (x^2)^(1/2) with x of unknown sign stays as written.
        return Expr::pow(base, q);
      }
      case Kind::Mul: {
        if (is_integer(q)) {
          std::vector<Expr> fs;
          for (const auto& c : base.children()) fs.push_back(make_pow(c, q));
          return make_mul(std::move(fs));
        }
        std::vector<Expr> positive;
        std::vector<Expr> rest;
        for (const auto& c : base.children()) {
          if (assume_.is_positive(c))
            positive.push_back(make_pow(c, q));
          else
            rest.push_back(c);
        }
        if (positive.empty()) return Expr::pow(base, q);
        if (!rest.empty()) positive.push_back(Expr::pow(make_mul(rest), q));
        return make_mul(std::move(positive));
      }
      case Kind::Add:
        if (is_integer(q) && q > 0 && q <= 8) {
          std::vector<Expr> copies(static_cast<std::size_t>(q.numerator()), base);
          return make_mul(std::move(copies));
        }
        if (is_integer(q) && q < 0) {
          if (auto pulled = pull_content(base, q)) return *pulled;
        }
        return Expr::pow(base, q);
      default:
        return Expr::pow(base, q);
    }
  }

  // (c*m*S)^q -> c^q * m^q * S^q for integer q, where c*m is the common
  // coefficient and monomial of all terms of the sum. Makes inverse powers
  // of sums canonical whatever order the factors arrived in.
  std::optional<Expr> pull_content(const Expr& sum, const Rational& q) {
    std::vector<std::pair<Rational, std::map<Expr, Rational, ExprLess>>> terms;
    for (const auto& t : sum.children()) {
      auto [c, m] = split_coefficient(t);
      std::map<Expr, Rational, ExprLess> pw;
      std::vector<Expr> fs = m.kind() == Kind::Mul ? m.children() : std::vector<Expr>{m};
      for (const auto& f : fs) {
        if (f.is_one()) continue;
        auto [b, e] = split_power(f);
        pw[b] += e;
      }
      terms.emplace_back(c, std::move(pw));
    }
    std::map<Expr, Rational, ExprLess> common = terms.front().second;
    for (std::size_t i = 1; i < terms.size(); ++i) {
      for (auto it = common.begin(); it != common.end();) {
        auto f = terms[i].second.find(it->first);
        if (f == terms[i].second.end()) {
          it = common.erase(it);
          continue;
        }
        it->second = std::min(it->second, f->second);
        ++it;
      }
    }
    for (auto it = common.begin(); it != common.end();) {
      if (it->second == 0 || !is_integer(it->second))
        it = common.erase(it);
      else
        ++it;
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    for (const auto& [c, pw] : terms) {
      num = std::gcd(num, c.numerator());
      den = std::lcm(den, c.denominator());
    }
    Rational content(num, den);
    if (terms.front().first < 0) content = -content;
    if (common.empty() && content == 1) return std::nullopt;

    std::vector<Expr> divisor{Expr(Rational(1) / content)};
    for (const auto& [b, e] : common) divisor.push_back(Expr::pow(b, -e));
    std::vector<Expr> reduced;
    for (const auto& t : sum.children()) {
      std::vector<Expr> fs = divisor;
      fs.push_back(t);
      reduced.push_back(make_mul(std::move(fs)));
    }
    Expr rest = make_add(std::move(reduced));
    std::vector<Expr> out{const_pow(content, q)};
    for (const auto& [b, e] : common) out.push_back(make_pow(b, e * q));
    out.push_back(rest.kind() == Kind::Add ? Expr::pow(rest, q) : make_pow(rest, q));
    return make_mul(std::move(out));
  }

  Expr const_pow(const Rational& v, const Rational& q) {
    if (is_integer(q)) {
      if (v == 0 && q < 0) return Expr::pow(Expr(v), q);  // left for eval to reject
      return Expr(rational_ipow(v, q.numerator()));
    }
    if (v == 0) return Expr(0);
    if (v == 1) return Expr(1);
    if (q.denominator() == 2 && v > 0) {
      auto n = exact_isqrt(v.numerator());
      auto d = exact_isqrt(v.denominator());
      if (n && d) return Expr(rational_ipow(Rational(*n, *d), q.numerator()));
    }
    // Keep the exponent within (-1, 1) and move the integer part out.
    std::int64_t whole = q.numerator() / q.denominator();
    Rational frac = q - whole;
    if (whole != 0)
      return make_mul({Expr(rational_ipow(v, whole)), Expr::pow(Expr(v), frac)});
    return Expr::pow(Expr(v), q);
  }

  // ---- products -----------------------------------------------------------

  static std::pair<Rational, Expr> split_coefficient(const Expr& e) {
    if (e.is_constant()) return {e.value(), Expr(1)};
    if (e.kind() == Kind::Mul && e.child(0).is_constant()) {
      std::vector<Expr> rest(e.children().begin() + 1, e.children().end());
      return {e.child(0).value(), Expr::mul(std::move(rest))};
    }
    return {Rational(1), e};
  }

  static std::pair<Expr, Rational> split_power(const Expr& e) {
    if (e.kind() == Kind::Pow) return {e.child(0), e.value()};
    return {e, Rational(1)};
  }

  Expr make_mul(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    auto flatten_into = [&flat](std::vector<Expr>& src) {
      flat.clear();
      for (auto& f : src) {
        if (f.kind() == Kind::Mul)
          flat.insert(flat.end(), f.children().begin(), f.children().end());
        else
          flat.push_back(std::move(f));
      }
    };
    flatten_into(factors);

    for (int pass = 0; pass < 16; ++pass) {
      Rational coef(1);
      std::map<Expr, Rational, ExprLess> powers;
      for (const auto& f : flat) {
        if (f.is_constant()) {
          coef *= f.value();
          continue;
        }
        auto [b, q] = split_power(f);
        powers[b] += q;
      }
      if (coef == 0) return Expr(0);

      std::vector<Expr> out;
      std::vector<Expr> sums;  // sums raised to positive integer powers
      bool regroup = false;
      for (const auto& [b, q] : powers) {
        if (q == 0) continue;
        if (b.kind() == Kind::Add && is_integer(q) && q > 0) {
          for (std::int64_t k = 0; k < q.numerator(); ++k) sums.push_back(b);
          continue;
        }
        Expr p = make_pow(b, q);
        if (p.is_constant()) {
          coef *= p.value();
        } else if (p.kind() == Kind::Mul) {
          regroup = true;
          out.push_back(p);
        } else if (p.kind() == Kind::Add) {
          sums.push_back(p);
        } else {
          out.push_back(p);
        }
      }
      if (coef == 0) return Expr(0);
      if (regroup) {
        out.push_back(Expr(coef));
        out.insert(out.end(), sums.begin(), sums.end());
        flatten_into(out);
        continue;
      }
      if (!sums.empty()) {
        out.push_back(Expr(coef));
        out.insert(out.end(), sums.begin(), sums.end());
        return expand(out);
      }
      std::sort(out.begin(), out.end(), ExprLess{});
      if (out.empty()) return Expr(coef);
      if (coef == 1 && out.size() == 1) return out.front();
      if (coef != 1) out.insert(out.begin(), Expr(coef));
      return Expr::mul(std::move(out));
    }
    throw std::logic_error("simplify: product did not reach a fixed point");
  }

  Expr expand(const std::vector<Expr>& factors) {
    std::vector<std::vector<Expr>> partial{{}};
    for (const auto& f : factors) {
      const std::vector<Expr> single{f};
      const std::vector<Expr>& options = f.kind() == Kind::Add ? f.children() : single;
      std::vector<std::vector<Expr>> next;
      next.reserve(partial.size() * options.size());
      for (const auto& p : partial)
        for (const auto& o : options) {
          auto q = p;
          q.push_back(o);
          next.push_back(std::move(q));
        }
      if (next.size() > kMaxExpandedTerms)
        throw std::length_error("simplify: expansion exceeds term limit");
      partial = std::move(next);
    }
    std::vector<Expr> terms;
    terms.reserve(partial.size());
    for (auto& p : partial) terms.push_back(make_mul(std::move(p)));
    return make_add(std::move(terms));
  }

  // ---- sums ---------------------------------------------------------------

  static Expr build_term(const Rational& coef, const Expr& mono) {
    if (coef == 0) return Expr(0);
    if (mono.is_one()) return Expr(coef);
    if (coef == 1) return mono;
    std::vector<Expr> fs{Expr(coef)};
    if (mono.kind() == Kind::Mul)
      fs.insert(fs.end(), mono.children().begin(), mono.children().end());
    else
      fs.push_back(mono);
    return Expr::mul(std::move(fs));
  }

  Expr make_add(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (auto& t : terms) {
      if (t.kind() == Kind::Add)
        flat.insert(flat.end(), t.children().begin(), t.children().end());
      else
        flat.push_back(std::move(t));
    }
    std::map<Expr, Rational, ExprLess> collected;
    for (const auto& t : flat) {
      auto [c, m] = split_coefficient(t);
      collected[m] += c;
    }
    for (auto it = collected.begin(); it != collected.end();) {
      if (it->second == 0)
        it = collected.erase(it);
      else
        ++it;
    }
    while (apply_pythagoras(collected)) {
    }
    std::vector<Expr> out;
    for (const auto& [m, c] : collected) out.push_back(build_term(c, m));
    if (out.empty()) return Expr(0);
    if (out.size() == 1) return out.front();
    std::sort(out.begin(), out.end(), ExprLess{});
    return Expr::add(std::move(out));
  }

  // k*M*sin(a)^2 + k*M*cos(a)^2 -> k*M for a matching pair of terms.
  bool apply_pythagoras(std::map<Expr, Rational, ExprLess>& terms) {
    for (const auto& [mono, coef] : terms) {
      std::vector<Expr> fs = mono.kind() == Kind::Mul ? mono.children() : std::vector<Expr>{mono};
      for (const auto& f : fs) {
        auto [b, q] = split_power(f);
        if (b.kind() != Kind::Func || b.node().fn != Func::Sin) continue;
        if (!is_integer(q) || q < 2) continue;
        const Expr& arg = b.child(0);
        Expr reduced = make_mul({mono, Expr::pow(b, Rational(-2))});
        Expr partner = make_mul({reduced, Expr::pow(Expr::func(Func::Cos, arg), Rational(2))});
        auto [pc, pm] = split_coefficient(partner);
        if (pc != 1) continue;
        auto it = terms.find(pm);
        if (it == terms.end() || it->second != coef) continue;
        auto [rc, rm] = split_coefficient(reduced);
        Rational k = coef * rc;
        Expr mono_copy = mono;
        terms.erase(it);
        terms.erase(mono_copy);
        terms[rm] += k;
        if (terms[rm] == 0) terms.erase(rm);
        return true;
      }
    }
    return false;
  }

 private:
  const Assumptions& assume_;
};

}  // namespace

Expr simplify(const Expr& e, const Assumptions& assume) {
  Simplifier s(assume);
  return s.run(e);
}

}  // namespace curvmax::sym
