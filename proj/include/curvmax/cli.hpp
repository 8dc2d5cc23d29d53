#ifndef CURVMAX_CLI_HPP
#define CURVMAX_CLI_HPP

// Command-line front end: derive, check, simulate, transform.
// Exit codes: 0 success, 1 failed check or run, 2 usage or input error.
// Every error line starts with "error:".

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "curvmax/golden.hpp"
#include "curvmax/report.hpp"

namespace curvmax::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// golden_check for the cylindrical and spherical charts.
CheckReport paper_suite(const GoldenCorpus& corpus, const CheckOptions& opt);
/// Module properties: metric literals, operator tables, the textbook
/// Cartesian equations, pair table, duals, spinor round trip, complex
/// packing, FFT round trip and Parseval, and solver invariants.
CheckReport property_suite(const GoldenCorpus& corpus, const CheckOptions& opt);

/// --seed if given, else CURVMAX_SEED, else the default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag);

}  // namespace curvmax::cli

#endif  // CURVMAX_CLI_HPP
