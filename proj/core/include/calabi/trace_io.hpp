#pragma once

#include "calabi/flow.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace calabi {

// On-disk layout of a flow run:
//   <dir>/config.txt        key=value echo of the run configuration
//   <dir>/trace.csv         one row per recorded state (diagnostics)
//   <dir>/steps.csv         one row per attempted step (accept/reject log)
//   <dir>/states/NNNNNN.clbf  binary snapshot per recorded state
//   <dir>/MANIFEST          termination cause, counts, resume step size
// Everything numeric is printed with enough digits to round-trip doubles
// exactly; a written trace reads back bit-identical.

// %.17g, the shortest fixed choice that round-trips IEEE doubles.
std::string format_double(double v);

std::vector<std::pair<std::string, std::string>>
parse_key_value_file(const std::filesystem::path& path);

void write_trace(const std::filesystem::path& dir, const FlowTrace& trace,
                 std::span<const std::pair<std::string, std::string>> extra_config = {});

// Rebuilds the full trace, recomputing state diagnostics from the snapshots
// and cross-checking them against trace.csv; throws TraceIoError on any
// missing or inconsistent piece.
FlowTrace read_trace(const std::filesystem::path& dir);

} // namespace calabi
