#pragma once

#include <string>

#include "hysta/sim.hpp"

namespace hysta {

/// Fixed CSV column order of every trace file.
extern const char* const kTraceHeader;

/// Writes the trace as CSV with a %.17g round-trip format; identical traces
/// produce byte-identical files.
void write_trace_csv(const SimTrace& trace, const std::string& path);

/// Writes the run metadata sidecar (config hash, seed, RNG, controller,
/// row count) as JSON next to the trace.
void write_trace_metadata(const SimTrace& trace, const std::string& path);

/// Reads a CSV written by write_trace_csv. Throws std::runtime_error on a
/// missing file or a header mismatch.
SimTrace read_trace_csv(const std::string& path);

} // namespace hysta
