#ifndef CURVMAX_GOLDEN_HPP
#define CURVMAX_GOLDEN_HPP

// Reference equations stored as text (metric literals, operator tables and
// the Maxwell equations for the built-in charts) and checks of the derived
// results against them.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvmax/maxwell3.hpp"
#include "curvmax/report.hpp"

namespace curvmax {

struct GoldenEntry {
  std::string id;
  std::string text;
  int line = 0;
  Expr lhs;
  Expr rhs;  // 0 for plain expressions
  Expr residual() const;
};

/// Section header "[kind chart]" or "[kind chart basis]"; "@key value"
/// lines set options, "id: lhs = rhs" or "id: expr" lines add entries.
struct GoldenSection {
  std::string kind;   // maxwell | metric | operators
  std::string chart;
  std::string basis;  // operators only: holonomic | nonholonomic
  std::map<std::string, std::string> options;
  std::vector<GoldenEntry> entries;
  int line = 0;
};

struct GoldenCorpus {
  std::vector<GoldenSection> sections;
  const GoldenSection* find(const std::string& kind, const std::string& chart,
                            const std::string& basis = "") const;
};

class GoldenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GoldenCorpus parse_golden(const std::string& text);
GoldenCorpus load_golden(const std::string& path);
const std::string& builtin_golden_text();
const GoldenCorpus& builtin_golden();

struct CheckOptions {
  std::uint64_t seed = 20120101;
  double rel_tol = 1e-10;
  int samples = 100;
};

/// Each assembled Maxwell residual against the stored equation. Ampere
/// equations are compared after flipping the sign of the dD/dt terms when
/// the section sets "@ampere_dt_sign flipped".
CheckReport golden_check(const std::string& chart, const GoldenCorpus& corpus = builtin_golden(),
                         const CheckOptions& opt = {});
/// Metric, inverse metric, sqrt g and Lame coefficients: exact structural
/// equality after simplification. Basis relations: numeric equivalence.
CheckReport check_metric_literals(const std::string& chart, const GoldenCorpus& corpus = builtin_golden());
CheckReport check_operator_tables(const std::string& chart, Basis basis,
                                  const GoldenCorpus& corpus = builtin_golden(),
                                  const CheckOptions& opt = {});

}  // namespace curvmax

#endif  // CURVMAX_GOLDEN_HPP
