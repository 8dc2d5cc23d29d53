#ifndef CURVMAX_CHART_HPP
#define CURVMAX_CHART_HPP

// Holonomic coordinate charts given by a Euclidean embedding, their metric,
// and component conversions between holonomic and orthonormal bases.

#include <optional>
#include <string>
#include <vector>

#include "curvmax/symexpr.hpp"

namespace curvmax {

using sym::Expr;
using Matrix = std::vector<std::vector<Expr>>;

struct Chart {
  std::string name;
  std::vector<std::string> coords;
  std::vector<Expr> embedding;  // Cartesian x_a as functions of coords
  std::map<std::string, sym::Interval> domain;

  std::size_t dim() const { return coords.size(); }
  sym::Interval interval(const std::string& coord) const;
  /// Positivity facts implied by the domain: u > 0 when the interval lies
  /// right of 0, sin(u) > 0 inside [0, pi], cos(u) > 0 inside [-pi/2, pi/2].
  sym::Assumptions assumptions() const;
  /// Sampling options for `equivalent` with this chart's coordinate domains.
  sym::EquivalenceOptions sampling() const;
};

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validates dimension (2 or 3) and that the embedding only uses coords.
Chart make_chart(std::string name, std::vector<std::string> coords,
                 std::vector<Expr> embedding, std::map<std::string, sym::Interval> domain = {});

Chart builtin_chart(const std::string& name);
std::vector<std::string> builtin_chart_names();

/// Parses `[chart]` sections of `key = value` lines.
std::vector<Chart> parse_chart_file(const std::string& text);
std::vector<Chart> load_chart_file(const std::string& path);

Matrix jacobian(const Chart& chart);

struct MetricData {
  Matrix g_lo;
  Matrix g_hi;
  Expr det_g;
  Expr sqrt_abs_g;
  std::optional<std::vector<Expr>> lame;
  std::vector<std::string> coords;
  sym::Assumptions assume;

  std::size_t dim() const { return g_lo.size(); }
  bool orthogonal() const { return lame.has_value(); }
};

MetricData metric_from_chart(const Chart& chart);
/// Builds metric data from a hand-entered symmetric g_ij.
MetricData metric_from_matrix(const Matrix& g_lo, std::vector<std::string> coords,
                              const sym::Assumptions& assume = {});
std::vector<Expr> lame_coefficients(const MetricData& m);

/// Symbolic n x n helpers (n <= 4); results simplified under `assume`.
Expr determinant(const Matrix& a, const sym::Assumptions& assume = {});
Matrix inverse(const Matrix& a, const sym::Assumptions& assume = {});
Matrix multiply(const Matrix& a, const Matrix& b, const sym::Assumptions& assume = {});
Matrix transpose(const Matrix& a);
std::vector<std::vector<double>> evaluate(const Matrix& a, const sym::Binding& b);

enum class Variance { Covariant, Contravariant };
enum class Basis { Holonomic, Nonholonomic };

struct ComponentVector {
  std::vector<Expr> components;
  Variance variance = Variance::Contravariant;
  Basis basis = Basis::Holonomic;
};

ComponentVector convert_basis(const ComponentVector& v, const MetricData& m, Basis target);
ComponentVector raise_index(const ComponentVector& v, const MetricData& m);
ComponentVector lower_index(const ComponentVector& v, const MetricData& m);

}  // namespace curvmax

#endif  // CURVMAX_CHART_HPP
