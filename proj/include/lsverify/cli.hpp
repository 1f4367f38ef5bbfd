#pragma once

// Command-line surface: subcommand dispatch, JSON configuration ingestion,
// report persistence, and exit-code mapping.
//
// Exit codes: 0 when every requested check passes, 1 when a numerical check
// reports a violation, 2 for usage, schema, or module errors.

#include <iosfwd>
#include <string>
#include <vector>

#include "lsverify/verify.hpp"

namespace lsv {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

// Experiment configuration document:
//   {"domain": ..., "thick_set": ..., "bc": "dirichlet" | "neumann",
//    "model": {"type": ...}, "lambda": ..., "rho": ..., "quadrature": {...}?}
// Unknown keys are rejected with their JSON path.  trials / seed / m_max are
// command-line flags, not part of the document.
LsExperimentInput parse_ls_test_config(const Json& j, const std::string& path);

// Full CLI entry point.  `args` holds the command-line arguments without the
// program name; human-readable output goes to `out`, diagnostics to `err`.
// Never throws: all errors are mapped to the exit-code contract above.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsv
