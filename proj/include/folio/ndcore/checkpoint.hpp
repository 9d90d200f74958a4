#pragma once

#include <string>

#include "folio/ndcore/graph.hpp"

namespace folio::nd {

// Checkpoint file layout (JSON, format_version 1):
//   {
//     "format_version": 1,
//     "params": { "<name>": { "shape": [d0, ...], "data": [v0, ...] }, ... }
//   }
// Doubles are serialized shortest-round-trip, so save/load is lossless.

void save_checkpoint(const Graph& graph, const std::string& path);

// Loads into an already-built graph. The checkpoint must contain exactly
// the graph's parameter names with matching shapes; any mismatch fails
// naming the offending entries.
void load_checkpoint(Graph& graph, const std::string& path);

} // namespace folio::nd
