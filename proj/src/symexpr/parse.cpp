#include "curvmax/symexpr.hpp"

#include <cctype>

namespace curvmax::sym {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(what + " at line " + std::to_string(line) + ", column " +
                         std::to_string(column)),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : src_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.type = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        t.type = Tok::Number;
        bool dot = false;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          if (src_[pos_] == '.') {
            if (dot) throw ParseError("malformed number", line_, col_);
            dot = true;
          }
          t.text += advance();
        }
        if (t.text == ".") throw ParseError("malformed number", t.line, t.column);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.type = Tok::Ident;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          t.text += advance();
      } else if (std::string("+-*/^(),").find(c) != std::string::npos) {
        t.type = Tok::Op;
        t.text = std::string(1, advance());
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
      }
      out.push_back(t);
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Rational parse_number(const std::string& s) {
  auto dot = s.find('.');
  std::string whole = s.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  if (whole.size() + frac.size() > 18) throw std::out_of_range("numeric literal too long");
  std::int64_t num = 0;
  for (char c : whole + frac) num = num * 10 + (c - '0');
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  return Rational(num, den);
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseContext& ctx) : toks_(std::move(toks)), ctx_(ctx) {}

  Expr parse_all() {
    Expr e = expr();
    if (peek().type != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool is_op(const char* op) const { return peek().type == Tok::Op && peek().text == op; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError("syntax error: " + msg, t.line, t.column);
  }
  void expect(const char* op) {
    if (!is_op(op)) fail(std::string("expected '") + op + "'");
    take();
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    while (is_op("+") || is_op("-")) {
      bool minus = take().text == "-";
      Expr t = term();
      terms.push_back(minus ? Expr::neg(t) : t);
    }
    return Expr::add(std::move(terms));
  }

  Expr term() {
    Expr acc = factor();
    std::vector<Expr> fs{acc};
    while (is_op("*") || is_op("/")) {
      bool divide = take().text == "/";
      Expr f = factor();
      if (divide) {
        acc = Expr::div(Expr::mul(std::move(fs)), f);
        fs = {acc};
      } else {
        fs.push_back(f);
      }
    }
    return Expr::mul(std::move(fs));
  }

  // Unary minus binds looser than '^' so that "-x^2" reads as -(x^2).
  Expr factor() {
    if (is_op("-")) {
      take();
      return Expr::neg(factor());
    }
    Expr b = base();
    if (is_op("^")) {
      take();
      b = Expr::pow(b, exponent());
    }
    return b;
  }

  std::int64_t integer() {
    if (peek().type != Tok::Number || peek().text.find('.') != std::string::npos)
      fail("expected integer exponent");
    return parse_number(take().text).numerator();
  }

  Rational exponent() {
    if (is_op("(")) {
      take();
      bool minus = false;
      if (is_op("-")) {
        take();
        minus = true;
      }
      Rational q(integer());
      if (is_op("/")) {
        take();
        auto den = integer();
        if (den == 0) fail("zero denominator in exponent");
        q /= den;
      }
      expect(")");
      return minus ? -q : q;
    }
    if (is_op("-")) {
      take();
      return Rational(-integer());
    }
    return Rational(integer());
  }

  Expr base() {
    const Token& t = peek();
    if (t.type == Tok::Number) return Expr(parse_number(take().text));
    if (t.type == Tok::Ident) {
      Token id = take();
      if (is_op("(")) return call(id);
      auto f = ctx_.fields.find(id.text);
      if (f != ctx_.fields.end()) return Expr::field(id.text, f->second);
      return Expr::variable(id.text);
    }
    if (is_op("(")) {
      take();
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.type == Tok::End) fail("unexpected end of input");
    fail("unexpected '" + t.text + "'");
  }

  Expr call(const Token& id) {
    expect("(");
    if (id.text == "diff") {
      Expr inner = expr();
      expect(",");
      if (peek().type != Tok::Ident) fail("expected variable name in diff");
      std::string v = take().text;
      int times = 1;
      if (is_op(",")) {
        take();
        times = static_cast<int>(integer());
      }
      expect(")");
      Expr r = inner;
      for (int i = 0; i < times; ++i) r = diff(r, v);
      return r;
    }
    auto f = func_from_name(id.text);
    if (!f) throw ParseError("unknown function '" + id.text + "'", id.line, id.column);
    Expr arg = expr();
    expect(")");
    return Expr::func(*f, arg);
  }

  std::vector<Token> toks_;
  const ParseContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const ParseContext& ctx) {
  Lexer lx(text);
  Parser p(lx.run(), ctx);
  return p.parse_all();
}

}  // namespace curvmax::sym
