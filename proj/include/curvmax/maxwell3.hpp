#ifndef CURVMAX_MAXWELL3_HPP
#define CURVMAX_MAXWELL3_HPP

// Maxwell's equations with 3-vectors in an arbitrary chart (CGS units):
// residual assembly and numeric evaluation.

#include <array>
#include <string>
#include <vector>

#include "curvmax/diffops.hpp"

namespace curvmax {

/// E, H covariant; D, B contravariant; all holonomic.
struct FieldSet3 {
  ComponentVector E{{}, Variance::Covariant, Basis::Holonomic};
  ComponentVector H{{}, Variance::Covariant, Basis::Holonomic};
  ComponentVector D{{}, Variance::Contravariant, Basis::Holonomic};
  ComponentVector B{{}, Variance::Contravariant, Basis::Holonomic};
};

struct Sources3 {
  Expr rho{0};
  ComponentVector j{{0, 0, 0}, Variance::Contravariant, Basis::Holonomic};
  Expr c = sym::var("c");
};

/// One equation written as lhs = rhs; its residual is lhs - rhs.
struct Equation {
  std::string id;
  Expr lhs;
  Expr rhs;
  Expr residual;
};

struct MaxwellResiduals3 {
  std::array<Expr, 3> faraday;  // curl E + (1/c) dB/dt
  std::array<Expr, 3> ampere;   // curl H - (1/c) dD/dt - (4 pi/c) j
  Expr gauss_D;                 // div D - 4 pi rho
  Expr gauss_B;                 // div B
  std::vector<Equation> equations;  // the same eight, in lhs = rhs form

  /// faraday1..3, ampere1..3, gauss_D, gauss_B.
  std::vector<Expr> all() const;
  static const std::array<std::string, 8>& names();
};

/// Abstract fields E1..E3, H1..H3, D1..D3, B1..B3 of (t, coords).
FieldSet3 abstract_fields(const std::vector<std::string>& coords);
/// Abstract rho, j1..j3 of (t, coords); c symbolic.
Sources3 abstract_sources(const std::vector<std::string>& coords);
/// Parse context declaring the abstract Maxwell fields and sources.
sym::ParseContext maxwell_context(const std::vector<std::string>& coords);

MaxwellResiduals3 assemble_residuals(const FieldSet3& f, const Sources3& src, const MetricData& m);

/// Evaluates the eight residuals; every symbol (t, coords, c, jets) bound.
std::array<double, 8> eval_residuals(const MaxwellResiduals3& r, const sym::Binding& b);

/// Replace the abstract fields in `r` by concrete expressions.
MaxwellResiduals3 substitute(const MaxwellResiduals3& r, const std::map<std::string, Expr>& fields);

std::string render_maxwell3(const MaxwellResiduals3& r, const std::string& chart, OutputFormat fmt);

}  // namespace curvmax

#endif  // CURVMAX_MAXWELL3_HPP
