#ifndef CURVMAX_REPORT_HPP
#define CURVMAX_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace curvmax {

/// One named check with its measured error.
struct CheckLine {
  std::string name;
  bool pass = false;
  double error = 0.0;
  std::string note;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool all_pass() const;
  int failures() const;
  void append(const CheckReport& other);
  void add(std::string name, double error, double tol, std::string note = "");
  /// "PASS name  err=…" lines and a closing count.
  std::string render() const;
};

}  // namespace curvmax

#endif  // CURVMAX_REPORT_HPP
