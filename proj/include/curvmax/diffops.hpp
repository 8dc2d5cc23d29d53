#ifndef CURVMAX_DIFFOPS_HPP
#define CURVMAX_DIFFOPS_HPP

// grad, div, curl and Laplacian in holonomic and orthonormal bases,
// plus the densitized alternating tensor.

#include <array>
#include <string>
#include <vector>

#include "curvmax/chart.hpp"

namespace curvmax {

/// Covariant holonomic components d_i phi.
ComponentVector grad(const Expr& phi, const MetricData& m);
/// (1/sqrt g) d_i (sqrt g f^i) of contravariant holonomic components.
Expr div(const ComponentVector& v, const MetricData& m);
/// e^{ijk} d_j w_k for covariant holonomic w in three dimensions; the result
/// is contravariant holonomic, (i, j, k) running over cyclic permutations.
ComponentVector curl(const ComponentVector& w, const MetricData& m);
Expr laplacian(const Expr& phi, const MetricData& m);

// Orthonormal-basis variants; inputs and outputs carry Basis::Nonholonomic.
ComponentVector grad_nh(const Expr& phi, const MetricData& m);
Expr div_nh(const ComponentVector& v, const MetricData& m);
ComponentVector curl_nh(const ComponentVector& w, const MetricData& m);

class AlternatingTensor {
 public:
  AlternatingTensor(int n, Expr lower, Expr upper)
      : n_(n), lower_(std::move(lower)), upper_(std::move(upper)) {}

  int dim() const { return n_; }
  const Expr& lower_prefactor() const { return lower_; }
  const Expr& upper_prefactor() const { return upper_; }
  /// Levi-Civita symbol: +1 for even permutations of (0..n-1), -1 for odd,
  /// 0 with a repeated index.
  static int parity(const std::vector<int>& idx);
  Expr lower(const std::vector<int>& idx) const;
  Expr upper(const std::vector<int>& idx) const;

 private:
  int n_;
  Expr lower_;
  Expr upper_;
};

/// n = 3: e_{123} = sqrt|g|, e^{123} = 1/sqrt|g|.
/// n = 4 (det g < 0 required): e_{0123} = sqrt(-g), e^{0123} = -1/sqrt(-g).
AlternatingTensor alternating(const MetricData& m);

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Text, Latex, Csv };

/// Symbolic operator formulas for abstract fields f (scalar) and f1..f3
/// (components) on a chart.
struct OperatorTable {
  std::string chart;
  Basis basis = Basis::Holonomic;
  std::vector<std::string> coords;
  ComponentVector grad;
  Expr div;
  ComponentVector curl;
  Expr laplacian;
};

/// Abstract scalar field f and component fields f1..fn depending on coords.
Expr scalar_field(const std::vector<std::string>& coords, const std::string& name = "f");
std::vector<Expr> component_fields(const std::vector<std::string>& coords,
                                   const std::string& stem = "f");

OperatorTable operator_table(const Chart& chart, Basis basis);
std::string render_operators(const OperatorTable& t, OutputFormat fmt);

}  // namespace curvmax

#endif  // CURVMAX_DIFFOPS_HPP
