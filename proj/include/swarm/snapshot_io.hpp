#pragma once

#include <string>

#include "swarm/scenario.hpp"

namespace swarm {

// Snapshot files are CSV with `# key=value` header lines followed by a
// column line and one row per cell:
//   1D: i,x1,rho,u1,l
//   2D: i,j,x1,x2,rho,u1,u2,l
// Values use 17 significant digits so a write/read cycle is lossless.

/// Writes one `snap_<step>.csv` per snapshot into `directory` (created when
/// missing). Existing snap_*.csv files there are removed first so the
/// directory always holds exactly one series.
void write_snapshot(const SnapshotSeries& series, const std::string& directory);

/// Reads a single snapshot file, or every snap_*.csv in a directory ordered by
/// step. Throws ParseError naming the missing key or malformed line.
SnapshotSeries read_snapshot(const std::string& path);

/// Text of one snapshot file.
std::string format_snapshot(const SnapshotSeries& series, std::size_t index);

}  // namespace swarm
