#include "curvmax/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace curvmax {

bool CheckReport::all_pass() const { return failures() == 0; }

int CheckReport::failures() const {
  int n = 0;
  for (const auto& l : lines) n += l.pass ? 0 : 1;
  return n;
}

void CheckReport::append(const CheckReport& other) {
  lines.insert(lines.end(), other.lines.begin(), other.lines.end());
}

std::string CheckReport::render() const {
  std::ostringstream os;
  for (const auto& l : lines) {
    os << (l.pass ? "PASS " : "FAIL ") << l.name;
    os << "  err=" << std::scientific << std::setprecision(2) << l.error;
    if (!l.note.empty()) os << "  (" << l.note << ")";
    os << "\n";
  }
  os << (all_pass() ? "all " : "") << lines.size() - static_cast<std::size_t>(failures()) << "/"
     << lines.size() << " checks passed\n";
  return os.str();
}

void CheckReport::add(std::string name, double error, double tol, std::string note) {
  lines.push_back({std::move(name), std::isfinite(error) && error <= tol, error, std::move(note)});
}

}  // namespace curvmax
