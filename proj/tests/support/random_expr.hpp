#ifndef CURVMAX_TESTS_RANDOM_EXPR_HPP
#define CURVMAX_TESTS_RANDOM_EXPR_HPP

// Random expression trees that stay finite and well defined when every
// variable lies in (0.1, 2).

#include <random>
#include <string>
#include <vector>

#include "curvmax/symexpr.hpp"

namespace testutil {

using curvmax::sym::Expr;
using curvmax::sym::Rational;

class RandomExpr {
 public:
  RandomExpr(std::uint64_t seed, std::vector<std::string> vars)
      : rng_(seed), vars_(std::move(vars)) {}

  // Strictly positive on the sampling box.
  Expr positive(int depth) {
    if (depth <= 0) return leaf_positive();
    switch (pick(8)) {
      case 0: return leaf_positive();
      case 1: return positive(depth - 1) + positive(depth - 1);
      case 2: return positive(depth - 1) * positive(depth - 1);
      case 3: return positive(depth - 1) / positive(depth - 1);
      case 4: return curvmax::sym::sqrt(positive(depth - 1));
      case 5: return Expr(2) + curvmax::sym::sin(any(depth - 1));
      case 6: return curvmax::sym::pow(positive(depth - 1), Rational(pick(5) - 2, 1 + pick(2)));
      default: return Expr(1) + curvmax::sym::pow(any(depth - 1), Rational(2));
    }
  }

  Expr any(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(9)) {
      case 0: return leaf();
      case 1: return any(depth - 1) - any(depth - 1);
      case 2: return any(depth - 1) * any(depth - 1);
      case 3: return any(depth - 1) / positive(depth - 1);
      case 4: return curvmax::sym::sin(any(depth - 1));
      case 5: return curvmax::sym::cos(any(depth - 1));
      case 6: return curvmax::sym::log(positive(depth - 1));
      case 7: return curvmax::sym::arctan(any(depth - 1));
      default: return -any(depth - 1) + positive(depth - 1);
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  Expr leaf_positive() {
    if (pick(3) == 0) return Expr(Rational(1 + pick(5), 1 + pick(3)));
    return Expr::variable(vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))]);
  }
  Expr leaf() {
    if (pick(4) == 0) return Expr(Rational(pick(9) - 4, 1 + pick(3)));
    return leaf_positive();
  }

  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
};

}  // namespace testutil

#endif
