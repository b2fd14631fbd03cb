#pragma once

// On-disk flow-state checkpoints.  Two self-describing formats share one
// loader: a little-endian binary layout (magic "VFSNAP01") and a text layout
// (first line "VFSNAPCSV01") whose doubles are printed with %.17g so that a
// save/load round trip reproduces every value bit-for-bit.  The file carries
// the grid and group data, so a snapshot alone reconstructs the full state.

#include <string>

#include "vortexflow/flow.hpp"

namespace vortexflow {

// Write `st` to `path`; binary selects the format.  Throws IoError on any
// filesystem failure.
void save_snapshot(const std::string& path, const FlowState& st,
                   bool binary = true);

// Read a snapshot written by save_snapshot, auto-detecting the format.
// Throws IoError if the file is missing, truncated, or malformed.
FlowState load_snapshot(const std::string& path);

}  // namespace vortexflow
